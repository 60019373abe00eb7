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

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace sessim {

/// Lowercases ASCII letters and splits on every character that is not an ASCII
/// letter or digit. Bytes >= 0x80 (UTF-8 sequences) are kept as term characters,
/// so non-ASCII words survive as single terms. No stemming.
[[nodiscard]] auto tokenize(std::string_view text) -> std::vector<std::string>;

/// Terms joined by single spaces. Used as the normalized form of a query.
[[nodiscard]] auto join_terms(std::vector<std::string> const& terms) -> std::string;

[[nodiscard]] inline auto normalize_query(std::string_view text) -> std::string
{
    return join_terms(tokenize(text));
}

class Stopwords {
  public:
    Stopwords() = default;
    /// Throws std::invalid_argument on entries that are not lowercase or contain whitespace.
    explicit Stopwords(std::vector<std::string> const& terms);

    /// The bundled English list.
    [[nodiscard]] static auto english() -> Stopwords const&;

    [[nodiscard]] auto contains(std::string_view term) const -> bool;
    [[nodiscard]] auto size() const noexcept -> std::size_t { return terms_.size(); }

  private:
    std::unordered_set<std::string> terms_;
};

/// One term per line; blank lines and lines starting with '#' are ignored.
/// Entries are lowercased before validation.
[[nodiscard]] auto load_stopwords(std::filesystem::path const& path) -> Stopwords;

}  // namespace sessim
