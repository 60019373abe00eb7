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

#include "sessim/index.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "sessim/text.hpp"

namespace sessim {

namespace {
constexpr std::string_view kSnapshotMagic = "sessim-index v1";
}

auto InvertedIndex::build(Corpus const& corpus) -> InvertedIndex
{
    InvertedIndex index;
    index.doc_ids_.reserve(corpus.size());
    index.doc_lens_.reserve(corpus.size());
    std::unordered_map<std::string, std::uint32_t> counts;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        auto const& doc = corpus[i];
        auto ordinal = static_cast<DocOrdinal>(i);
        auto terms = tokenize(doc.text);
        index.doc_ids_.push_back(doc.doc_id);
        index.doc_lens_.push_back(static_cast<std::uint32_t>(terms.size()));
        counts.clear();
        for (auto& term : terms) {
            ++counts[std::move(term)];
        }
        for (auto const& [term, tf] : counts) {
            index.postings_[term].push_back(Posting{ordinal, tf});
        }
    }
    index.finalize();
    return index;
}

void InvertedIndex::finalize()
{
    ordinals_.clear();
    ordinals_.reserve(doc_ids_.size());
    for (std::size_t i = 0; i < doc_ids_.size(); ++i) {
        ordinals_.emplace(doc_ids_[i], static_cast<DocOrdinal>(i));
    }
    double total = 0.0;
    for (auto len : doc_lens_) {
        total += len;
    }
    avgdl_ = doc_ids_.empty() ? 0.0 : total / static_cast<double>(doc_ids_.size());
    for (auto& [term, list] : postings_) {
        std::sort(list.begin(), list.end(), [](auto const& a, auto const& b) { return a.doc < b.doc; });
    }
}

auto InvertedIndex::df(std::string_view term) const -> std::size_t
{
    return postings(term).size();
}

auto InvertedIndex::postings(std::string_view term) const -> std::span<Posting const>
{
    auto it = postings_.find(std::string(term));
    if (it == postings_.end()) {
        return {};
    }
    return it->second;
}

auto InvertedIndex::tf(std::string_view term, DocOrdinal doc) const -> std::uint32_t
{
    auto list = postings(term);
    auto it = std::lower_bound(
        list.begin(), list.end(), doc, [](Posting const& p, DocOrdinal d) { return p.doc < d; });
    return (it != list.end() && it->doc == doc) ? it->tf : 0;
}

auto InvertedIndex::ordinal(std::string_view doc_id) const -> DocOrdinal
{
    auto it = ordinals_.find(std::string(doc_id));
    if (it == ordinals_.end()) {
        throw std::out_of_range("unknown doc_id '" + std::string(doc_id) + "'");
    }
    return it->second;
}

auto InvertedIndex::contains(std::string_view doc_id) const -> bool
{
    return ordinals_.contains(std::string(doc_id));
}

auto InvertedIndex::sorted_terms() const -> std::vector<std::string>
{
    std::vector<std::string> terms;
    terms.reserve(postings_.size());
    for (auto const& entry : postings_) {
        terms.push_back(entry.first);
    }
    std::sort(terms.begin(), terms.end());
    return terms;
}

// Layout:
//   sessim-index v1
//   docs <N>
//   <len> <doc_id as JSON string> (N lines)
//   terms <T>
//   <term> <df> <doc>:<tf> ... (T lines, sorted by term)
void InvertedIndex::save(std::filesystem::path const& path) const
{
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write index snapshot " + path.string());
    }
    out << kSnapshotMagic << '\n' << "docs " << doc_ids_.size() << '\n';
    for (std::size_t i = 0; i < doc_ids_.size(); ++i) {
        out << doc_lens_[i] << ' ' << nlohmann::json(doc_ids_[i]).dump() << '\n';
    }
    auto terms = sorted_terms();
    out << "terms " << terms.size() << '\n';
    for (auto const& term : terms) {
        auto const& list = postings_.at(term);
        out << term << ' ' << list.size();
        for (auto const& p : list) {
            out << ' ' << p.doc << ':' << p.tf;
        }
        out << '\n';
    }
}

auto InvertedIndex::load(std::filesystem::path const& path) -> InvertedIndex
{
    std::ifstream in(path);
    if (!in) {
        throw ParseError(path.string(), 0, "cannot open index snapshot");
    }
    auto source = path.string();
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line) || line != kSnapshotMagic) {
        throw ParseError(source, line_no, "not a sessim index snapshot");
    }
    auto expect_header = [&](std::string_view keyword) {
        ++line_no;
        std::string word;
        std::size_t count = 0;
        if (!std::getline(in, line)) {
            throw ParseError(source, line_no, "truncated snapshot");
        }
        std::istringstream fields(line);
        if (!(fields >> word >> count) || word != keyword) {
            throw ParseError(source, line_no, "expected '" + std::string(keyword) + " <count>'");
        }
        return count;
    };

    InvertedIndex index;
    auto n_docs = expect_header("docs");
    for (std::size_t i = 0; i < n_docs; ++i) {
        ++line_no;
        std::uint32_t len = 0;
        std::string id;
        if (!std::getline(in, line)) {
            throw ParseError(source, line_no, "truncated snapshot");
        }
        auto space = line.find(' ');
        try {
            len = static_cast<std::uint32_t>(std::stoul(line.substr(0, space)));
            id = nlohmann::json::parse(line.substr(space + 1)).get<std::string>();
        } catch (std::exception const&) {
            throw ParseError(source, line_no, "bad document line");
        }
        index.doc_ids_.push_back(std::move(id));
        index.doc_lens_.push_back(len);
    }
    auto n_terms = expect_header("terms");
    for (std::size_t i = 0; i < n_terms; ++i) {
        ++line_no;
        if (!std::getline(in, line)) {
            throw ParseError(source, line_no, "truncated snapshot");
        }
        std::istringstream fields(line);
        std::string term;
        std::size_t df = 0;
        if (!(fields >> term >> df)) {
            throw ParseError(source, line_no, "bad term line");
        }
        std::vector<Posting> list;
        list.reserve(df);
        std::string pair;
        while (fields >> pair) {
            auto colon = pair.find(':');
            if (colon == std::string::npos) {
                throw ParseError(source, line_no, "bad posting '" + pair + "'");
            }
            auto doc = static_cast<DocOrdinal>(std::stoul(pair.substr(0, colon)));
            auto tf = static_cast<std::uint32_t>(std::stoul(pair.substr(colon + 1)));
            if (doc >= n_docs || tf == 0) {
                throw ParseError(source, line_no, "posting out of range");
            }
            list.push_back(Posting{doc, tf});
        }
        if (list.size() != df) {
            throw ParseError(source, line_no, "df does not match posting count");
        }
        index.postings_.emplace(std::move(term), std::move(list));
    }
    index.finalize();
    return index;
}

auto idf(InvertedIndex const& index, std::string_view term) -> Idf
{
    auto const n = static_cast<double>(index.num_docs());
    if (index.num_docs() == 0) {
        throw std::domain_error("idf undefined on an empty index");
    }
    auto const df = static_cast<double>(index.df(term));
    double raw = std::log(1.0 + (n - df + 0.5) / (df + 0.5));
    double normalized = 1.0;
    if (df > 0) {
        normalized = index.num_docs() == 1 ? 0.0 : std::clamp(std::log(n / df) / std::log(n), 0.0, 1.0);
    }
    return Idf{raw, normalized};
}

}  // namespace sessim
