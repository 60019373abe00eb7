// Copyright 2026 sessim developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sessim/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "sessim/text.hpp"

namespace sessim {

void Bm25Params::validate() const
{
    if (!(k1 > 0.0)) {
        throw std::invalid_argument("bm25 k1 must be > 0");
    }
    if (!(b >= 0.0 && b <= 1.0)) {
        throw std::invalid_argument("bm25 b must be in [0, 1]");
    }
}

namespace {

auto term_weight(Bm25Params const& params, double idf_raw, double tf, double doc_len, double avgdl) -> double
{
    double norm = params.k1 * (1.0 - params.b + params.b * doc_len / avgdl);
    return idf_raw * tf * (params.k1 + 1.0) / (tf + norm);
}

auto ranks_before(ScoredDoc const& lhs, ScoredDoc const& rhs) -> bool
{
    if (lhs.score != rhs.score) {
        return lhs.score > rhs.score;
    }
    return lhs.doc_id < rhs.doc_id;
}

}  // namespace

auto bm25_score(InvertedIndex const& index,
                Bm25Params const& params,
                std::span<std::string const> query_terms,
                std::string_view doc_id) -> double
{
    auto doc = index.ordinal(doc_id);
    double dl = index.doc_len(doc);
    double score = 0.0;
    for (auto const& term : query_terms) {
        auto tf = index.tf(term, doc);
        if (tf == 0) {
            continue;
        }
        score += term_weight(params, idf(index, term).raw, tf, dl, index.avgdl());
    }
    return score;
}

auto retrieve(InvertedIndex const& index, Bm25Params const& params, std::string_view query, std::size_t k)
    -> RankedList
{
    RankedList result{std::string(query), {}};
    if (k == 0 || index.num_docs() == 0) {
        return result;
    }
    auto terms = tokenize(query);
    // Term-at-a-time accumulation in query-term order.
    std::unordered_map<DocOrdinal, double> accumulators;
    for (auto const& term : terms) {
        auto list = index.postings(term);
        if (list.empty()) {
            continue;
        }
        auto w = idf(index, term).raw;
        for (auto const& p : list) {
            accumulators[p.doc] += term_weight(params, w, p.tf, index.doc_len(p.doc), index.avgdl());
        }
    }
    std::vector<ScoredDoc> scored;
    scored.reserve(accumulators.size());
    for (auto const& [doc, score] : accumulators) {
        scored.push_back(ScoredDoc{index.doc_id(doc), score});
    }
    auto top = std::min(k, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(top), scored.end(), ranks_before);
    scored.resize(top);
    result.items = std::move(scored);
    return result;
}

auto RerankConfig::describe() const -> std::string
{
    return is_identity() ? std::string("identity") : provider->describe();
}

auto rerank(RankedList const& ranked, RerankConfig const& config, Corpus const& corpus) -> RankedList
{
    if (config.is_identity() || ranked.items.empty()) {
        return ranked;
    }
    if (config.cutoff == 0) {
        throw std::invalid_argument("rerank cutoff must be > 0");
    }
    auto head = std::min(config.cutoff, ranked.items.size());
    std::vector<RerankDoc> docs;
    docs.reserve(head);
    for (std::size_t i = 0; i < head; ++i) {
        auto const& id = ranked.items[i].doc_id;
        auto const* doc = corpus.find(id);
        docs.push_back(RerankDoc{id, doc != nullptr ? doc->text : std::string{}});
    }
    auto scores = config.provider->score(ranked.query, docs);
    if (scores.size() != head) {
        throw ProviderError("reranker returned " + std::to_string(scores.size()) + " scores for " +
                            std::to_string(head) + " documents");
    }
    RankedList out{ranked.query, {}};
    out.items.reserve(ranked.items.size());
    for (std::size_t i = 0; i < head; ++i) {
        if (!std::isfinite(scores[i])) {
            throw ProviderError("reranker returned a non-finite score");
        }
        out.items.push_back(ScoredDoc{ranked.items[i].doc_id, scores[i]});
    }
    std::sort(out.items.begin(), out.items.end(), ranks_before);
    out.items.insert(out.items.end(), ranked.items.begin() + static_cast<std::ptrdiff_t>(head), ranked.items.end());
    return out;
}

}  // namespace sessim
