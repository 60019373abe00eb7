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

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sessim/collection.hpp"

namespace sessim {

using DocOrdinal = std::uint32_t;

struct Posting {
    DocOrdinal doc;
    std::uint32_t tf;

    friend bool operator==(Posting const&, Posting const&) = default;
};

/// Term -> postings sorted by document ordinal, plus the collection statistics
/// BM25 and idf need. Ordinals follow corpus order.
class InvertedIndex {
  public:
    InvertedIndex() = default;

    [[nodiscard]] static auto build(Corpus const& corpus) -> InvertedIndex;

    [[nodiscard]] auto num_docs() const noexcept -> std::size_t { return doc_ids_.size(); }
    [[nodiscard]] auto avgdl() const noexcept -> double { return avgdl_; }
    [[nodiscard]] auto num_terms() const noexcept -> std::size_t { return postings_.size(); }

    [[nodiscard]] auto df(std::string_view term) const -> std::size_t;
    [[nodiscard]] auto postings(std::string_view term) const -> std::span<Posting const>;
    [[nodiscard]] auto tf(std::string_view term, DocOrdinal doc) const -> std::uint32_t;

    [[nodiscard]] auto doc_id(DocOrdinal doc) const -> std::string const& { return doc_ids_.at(doc); }
    [[nodiscard]] auto doc_len(DocOrdinal doc) const -> std::uint32_t { return doc_lens_.at(doc); }
    /// Throws std::out_of_range for unknown ids.
    [[nodiscard]] auto ordinal(std::string_view doc_id) const -> DocOrdinal;
    [[nodiscard]] auto contains(std::string_view doc_id) const -> bool;

    /// Terms in lexicographic order (stable across runs).
    [[nodiscard]] auto sorted_terms() const -> std::vector<std::string>;

    /// Single-file text snapshot.
    void save(std::filesystem::path const& path) const;
    [[nodiscard]] static auto load(std::filesystem::path const& path) -> InvertedIndex;

    friend bool operator==(InvertedIndex const&, InvertedIndex const&) = default;

  private:
    void finalize();

    std::unordered_map<std::string, std::vector<Posting>> postings_;
    std::vector<std::string> doc_ids_;
    std::vector<std::uint32_t> doc_lens_;
    std::unordered_map<std::string, DocOrdinal> ordinals_;
    double avgdl_ = 0.0;
};

struct Idf {
    double raw;
    double normalized;
};

/// raw = ln(1 + (N - df + 0.5) / (df + 0.5)), df = 0 for unseen terms.
/// normalized = ln(N / df) / ln(N) clamped to [0, 1]; unseen terms are 1,
/// and seen terms in a single-document collection are 0.
/// Throws std::domain_error when the index is empty.
[[nodiscard]] auto idf(InvertedIndex const& index, std::string_view term) -> Idf;

}  // namespace sessim
