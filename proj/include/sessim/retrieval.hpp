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

#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sessim/collection.hpp"
#include "sessim/index.hpp"
#include "sessim/provider.hpp"

namespace sessim {

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;

    /// Throws std::invalid_argument unless k1 > 0 and b in [0, 1].
    void validate() const;

    friend bool operator==(Bm25Params const&, Bm25Params const&) = default;
};

struct ScoredDoc {
    std::string doc_id;
    double score;

    friend bool operator==(ScoredDoc const&, ScoredDoc const&) = default;
};

/// Distinct doc ids in rank order. retrieve() yields non-increasing scores;
/// after rerank() the head carries reranker scores and the tail keeps BM25 scores.
struct RankedList {
    std::string query;
    std::vector<ScoredDoc> items;

    friend bool operator==(RankedList const&, RankedList const&) = default;
};

/// Sum over query terms of idf_raw(t) * tf (k1 + 1) / (tf + k1 (1 - b + b dl / avgdl)).
/// Duplicate query terms contribute once per occurrence.
[[nodiscard]] auto bm25_score(InvertedIndex const& index,
                              Bm25Params const& params,
                              std::span<std::string const> query_terms,
                              std::string_view doc_id) -> double;

/// Top-k documents containing at least one query term, by descending BM25 score
/// with ascending doc_id as the tie-break.
[[nodiscard]] auto retrieve(InvertedIndex const& index,
                            Bm25Params const& params,
                            std::string_view query,
                            std::size_t k) -> RankedList;

struct RerankDoc {
    std::string id;
    std::string text;
};

/// Second-stage scorer. Returns one score per document, positionally aligned.
class RerankProvider {
  public:
    virtual ~RerankProvider() = default;
    virtual auto score(std::string const& query, std::span<RerankDoc const> docs) -> std::vector<double> = 0;
    /// Short name used in configuration fingerprints, e.g. "http:http://host:8000".
    [[nodiscard]] virtual auto describe() const -> std::string = 0;
};

/// `provider == nullptr` is the Identity reranker.
struct RerankConfig {
    std::size_t cutoff = 100;
    std::shared_ptr<RerankProvider> provider;

    [[nodiscard]] auto is_identity() const noexcept -> bool { return provider == nullptr; }
    [[nodiscard]] auto describe() const -> std::string;
};

/// Rescores the first min(cutoff, |ranked|) items and reorders them by the new
/// score (descending, doc_id tie-break); the tail keeps its original order.
/// Identity returns the input unchanged. Document texts come from `corpus`.
[[nodiscard]] auto rerank(RankedList const& ranked, RerankConfig const& config, Corpus const& corpus)
    -> RankedList;

}  // namespace sessim
