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
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace sessim {

/// Raised for unreadable or malformed input files. `line()` is 1-based, 0 when
/// the error is not tied to a particular line.
class ParseError : public std::runtime_error {
  public:
    ParseError(std::string const& source, std::size_t line, std::string const& message);

    [[nodiscard]] auto line() const noexcept -> std::size_t { return line_; }

  private:
    std::size_t line_;
};

struct Document {
    std::string doc_id;
    std::string text;

    friend bool operator==(Document const&, Document const&) = default;
};

struct Topic {
    std::string topic_id;
    std::string title;
    std::string description;
    std::string narrative;

    friend bool operator==(Topic const&, Topic const&) = default;
};

struct QrelEntry {
    std::string topic_id;
    std::string doc_id;
    int grade = 0;

    friend bool operator==(QrelEntry const&, QrelEntry const&) = default;
};

/// Either a judged grade (>= 0) or Unjudged. Judged(0) and Unjudged are distinct.
class RelevanceGrade {
  public:
    constexpr RelevanceGrade() = default;

    static auto judged(int grade) -> RelevanceGrade;
    static constexpr auto unjudged() -> RelevanceGrade { return RelevanceGrade{}; }

    [[nodiscard]] constexpr auto is_judged() const noexcept -> bool { return grade_.has_value(); }
    /// Precondition: is_judged().
    [[nodiscard]] constexpr auto value() const -> int { return grade_.value(); }
    /// Binarized relevance: Judged(g) with g > 0.
    [[nodiscard]] constexpr auto is_relevant() const noexcept -> bool
    {
        return grade_.has_value() && *grade_ > 0;
    }
    /// Graded gain with Unjudged mapped to 0.
    [[nodiscard]] constexpr auto gain() const noexcept -> int { return grade_.value_or(0); }

    friend constexpr bool operator==(RelevanceGrade const&, RelevanceGrade const&) = default;

  private:
    std::optional<int> grade_;
};

/// Documents in file order with a doc_id lookup. Immutable once loaded.
class Corpus {
  public:
    Corpus() = default;
    explicit Corpus(std::vector<Document> documents);

    [[nodiscard]] auto size() const noexcept -> std::size_t { return documents_.size(); }
    [[nodiscard]] auto empty() const noexcept -> bool { return documents_.empty(); }
    [[nodiscard]] auto documents() const noexcept -> std::vector<Document> const& { return documents_; }
    [[nodiscard]] auto operator[](std::size_t i) const -> Document const& { return documents_[i]; }
    [[nodiscard]] auto find(std::string_view doc_id) const -> Document const*;

    [[nodiscard]] auto begin() const noexcept { return documents_.begin(); }
    [[nodiscard]] auto end() const noexcept { return documents_.end(); }

  private:
    std::vector<Document> documents_;
    std::unordered_map<std::string, std::size_t> by_id_;
};

/// (topic_id, doc_id) -> grade.
class QrelStore {
  public:
    QrelStore() = default;
    explicit QrelStore(std::vector<QrelEntry> entries);

    [[nodiscard]] auto grade(std::string_view topic_id, std::string_view doc_id) const -> RelevanceGrade;
    /// Entries in load order.
    [[nodiscard]] auto entries() const noexcept -> std::vector<QrelEntry> const& { return entries_; }
    /// All judgments of one topic as (doc_id, grade), in load order.
    [[nodiscard]] auto judgments(std::string_view topic_id) const -> std::vector<std::pair<std::string, int>>;

  private:
    std::vector<QrelEntry> entries_;
    std::unordered_map<std::string, std::unordered_map<std::string, int>> grades_;
};

[[nodiscard]] auto load_corpus(std::filesystem::path const& path) -> Corpus;
[[nodiscard]] auto parse_corpus(std::istream& in, std::string const& source = "<stream>") -> Corpus;
void write_corpus(std::ostream& out, Corpus const& corpus);

[[nodiscard]] auto load_topics(std::filesystem::path const& path) -> std::vector<Topic>;
[[nodiscard]] auto parse_topics(std::istream& in, std::string const& source = "<stream>")
    -> std::vector<Topic>;
void write_topics(std::ostream& out, std::vector<Topic> const& topics);

[[nodiscard]] auto load_qrels(std::filesystem::path const& path) -> QrelStore;
[[nodiscard]] auto parse_qrels(std::istream& in, std::string const& source = "<stream>") -> QrelStore;
void write_qrels(std::ostream& out, QrelStore const& qrels);

[[nodiscard]] inline auto grade(QrelStore const& qrels, std::string_view topic_id, std::string_view doc_id)
    -> RelevanceGrade
{
    return qrels.grade(topic_id, doc_id);
}

}  // namespace sessim
