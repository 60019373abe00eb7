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
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sessim/collection.hpp"
#include "sessim/index.hpp"
#include "sessim/querygen.hpp"
#include "sessim/retrieval.hpp"
#include "sessim/usermodel.hpp"

namespace sessim {

/// One simulated user configuration. Defaults give the baseline run:
/// BM25 without reranking, GPT queries, informational clicks, 10 results per page.
struct SessionConfig {
    /// Run identifier used in file names and CSV rows. Not part of the fingerprint.
    std::string name = "default";
    Strategy strategy = Strategy::Gpt;
    ClickModel click = ClickModel::informational();
    StopPolicy stop = StaticStop{10};
    JudgeModel judge = PerfectJudge{};
    CostModel costs;
    RerankConfig rerank;
    Bm25Params bm25;
    std::size_t retrieval_k = 100;
    double global_budget = 2000.0;
    std::uint64_t seed = 42;
    TermOrder term_order = TermOrder::Fifo;
    double max_normalized_idf = 0.5;

    /// Throws std::invalid_argument on any out-of-range field.
    void validate() const;
    /// Canonical JSON of every field except `name`.
    [[nodiscard]] auto canonical_json() const -> std::string;
    /// 16 hex digits of FNV-1a over canonical_json().
    [[nodiscard]] auto fingerprint() const -> std::string;
};

enum class EventType { IssueQuery, ExamineSnippet, Click, Read, Judge, StopQuery, EndSession };

[[nodiscard]] auto to_string(EventType type) -> std::string_view;
[[nodiscard]] auto parse_event_type(std::string_view name) -> EventType;

struct SessionEvent {
    /// Cumulative time after the action completed.
    double t = 0.0;
    EventType action = EventType::IssueQuery;
    /// 1-based index of the query the action belongs to (0 before the first query).
    int query_index = 0;
    std::optional<std::string> doc_id;
    std::optional<RelevanceGrade> grade;
    std::optional<bool> judged_relevant;
    double cost = 0.0;

    friend bool operator==(SessionEvent const&, SessionEvent const&) = default;
};

struct QueryRecord {
    int query_index = 0;
    std::string query;
    RankedList ranking;
    /// Qrel grade of every ranked item, aligned with ranking.items.
    std::vector<RelevanceGrade> grades;
    /// Snippets scanned for this query.
    std::size_t examined_depth = 0;

    friend bool operator==(QueryRecord const&, QueryRecord const&) = default;
};

struct SessionLog {
    std::string topic_id;
    std::string run_id;
    std::string fingerprint;
    std::string config_json;
    std::vector<SessionEvent> events;
    std::vector<QueryRecord> queries;

    [[nodiscard]] auto queries_issued() const noexcept -> std::size_t { return queries.size(); }
    [[nodiscard]] auto total_time() const noexcept -> double { return events.empty() ? 0.0 : events.back().t; }

    friend bool operator==(SessionLog const&, SessionLog const&) = default;
};

/// Checks ordering and grammar: t non-decreasing (strictly across costed
/// actions), click directly after examine_snippet of the same doc, read after
/// click, judge after read, examined_depth consistent with the events.
/// Throws std::invalid_argument describing the first violation.
void validate_log(SessionLog const& log);

/// JSON lines: a header object, one object per event, then one per query ranking.
void write_session_log(std::ostream& out, SessionLog const& log);
void save_session_log(std::filesystem::path const& path, SessionLog const& log);
[[nodiscard]] auto parse_session_log(std::istream& in, std::string const& source = "<stream>") -> SessionLog;
[[nodiscard]] auto load_session_log(std::filesystem::path const& path) -> SessionLog;

/// Shared read-only resources of a simulation. Providers must be safe to call
/// from several sessions at once.
struct SimulationContext {
    Corpus const& corpus;
    InvertedIndex const& index;
    QrelStore const& qrels;
    Stopwords const& stopwords;
    /// Context-free pools (GPT, GPT**).
    PoolSet const* gpt_pools = nullptr;
    /// Context pools (GPT+, GPT*).
    PoolSet const* gpt_plus_pools = nullptr;
    /// Doc2Query source for the D2Q strategies.
    D2QProvider* d2q = nullptr;
};

/// A session that failed mid-way; carries the events logged before the failure.
class SessionError : public std::runtime_error {
  public:
    SessionError(std::string const& message, SessionLog partial)
        : std::runtime_error(message), partial_(std::move(partial))
    {}

    [[nodiscard]] auto partial() const noexcept -> SessionLog const& { return partial_; }

  private:
    SessionLog partial_;
};

/// Runs one session of the search loop: formulate a query, retrieve and
/// rerank, scan snippets, click, read, judge, and stop per policy, until the
/// global budget is used up or the strategy runs out of queries.
[[nodiscard]] auto run_session(Topic const& topic, SessionConfig const& config, SimulationContext const& context)
    -> SessionLog;

struct SessionOutcome {
    std::string topic_id;
    std::size_t config_index = 0;
    std::optional<SessionLog> log;
    std::string error;
    /// Last events before a failure.
    std::vector<SessionEvent> log_tail;

    [[nodiscard]] auto ok() const noexcept -> bool { return log.has_value(); }
};

/// One outcome per (topic, config), topic-major, independent of `parallelism`.
/// Failures are recorded per session and do not stop the batch.
[[nodiscard]] auto run_batch(std::vector<Topic> const& topics,
                             std::vector<SessionConfig> const& configs,
                             SimulationContext const& context,
                             std::size_t parallelism = 1) -> std::vector<SessionOutcome>;

}  // namespace sessim
