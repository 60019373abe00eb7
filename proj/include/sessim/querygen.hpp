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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "sessim/collection.hpp"
#include "sessim/index.hpp"
#include "sessim/rng.hpp"
#include "sessim/text.hpp"

namespace sessim {

enum class Strategy { Gpt, GptPlus, GptStar, GptStarStar, D2Q, D2QPlus, D2QPlusPlus };

/// "gpt", "gpt+", "gpt*", "gpt**", "d2q", "d2q+", "d2q++".
[[nodiscard]] auto to_string(Strategy strategy) -> std::string_view;
/// Throws std::invalid_argument on unknown names.
[[nodiscard]] auto parse_strategy(std::string_view name) -> Strategy;

[[nodiscard]] constexpr auto is_d2q_family(Strategy s) noexcept -> bool
{
    return s == Strategy::D2Q || s == Strategy::D2QPlus || s == Strategy::D2QPlusPlus;
}
[[nodiscard]] constexpr auto uses_pool(Strategy s) noexcept -> bool
{
    return s == Strategy::Gpt || s == Strategy::GptPlus;
}
[[nodiscard]] constexpr auto uses_vocabulary(Strategy s) noexcept -> bool
{
    return s == Strategy::GptStar || s == Strategy::GptStarStar;
}
/// Whether the strategy's pool (or the pool its vocabulary derives from) was
/// generated with topic context. GPT+ and GPT* use the context pool.
[[nodiscard]] constexpr auto uses_context_pool(Strategy s) noexcept -> bool
{
    return s == Strategy::GptPlus || s == Strategy::GptStar;
}

// ---------------------------------------------------------------------------
// LLM prompting and query pools

/// "Please generate one-hundred keyword queries about <title>." optionally
/// followed by " <description> <narrative>", with trailing whitespace trimmed.
/// Throws std::invalid_argument on an empty title.
[[nodiscard]] auto build_prompt(Topic const& topic, bool include_context) -> std::string;

/// One query per non-empty line, with leading enumeration ("12.", "12)", "-",
/// "*"), surrounding quotes and whitespace stripped.
[[nodiscard]] auto parse_llm_queries(std::string_view response) -> std::vector<std::string>;

/// Ordered distinct queries for one topic (distinct after normalize_query),
/// consumed through a cursor.
class QueryPool {
  public:
    QueryPool() = default;
    explicit QueryPool(std::string topic_id) : topic_id_(std::move(topic_id)) {}

    /// Appends unless an equivalent query is already present or the query
    /// normalizes to nothing. Returns whether it was added.
    auto add(std::string query) -> bool;

    [[nodiscard]] auto topic_id() const noexcept -> std::string const& { return topic_id_; }
    [[nodiscard]] auto queries() const noexcept -> std::vector<std::string> const& { return queries_; }
    [[nodiscard]] auto size() const noexcept -> std::size_t { return queries_.size(); }
    [[nodiscard]] auto cursor() const noexcept -> std::size_t { return cursor_; }

    /// Next query and advance, or nullopt when exhausted.
    auto next() -> std::optional<std::string>;

  private:
    std::string topic_id_;
    std::vector<std::string> queries_;
    std::unordered_set<std::string> normalized_;
    std::size_t cursor_ = 0;
};

using PoolSet = std::map<std::string, QueryPool>;

/// JSON lines {"topic_id", "rank", "query"}, rank 1-based in pool order.
void write_pools(std::ostream& out, PoolSet const& pools);
void save_pools(std::filesystem::path const& path, PoolSet const& pools);
[[nodiscard]] auto parse_pools(std::istream& in, std::string const& source = "<stream>") -> PoolSet;
[[nodiscard]] auto load_pools(std::filesystem::path const& path) -> PoolSet;

/// Chat-completion backend: one prompt in, the assistant's text out.
class ChatClient {
  public:
    virtual ~ChatClient() = default;
    virtual auto complete(std::string const& prompt) -> std::string = 0;
};

/// Issues `rounds` completions of build_prompt(topic, include_context) and
/// concatenates the parsed queries, keeping the first occurrence of each.
/// Throws std::runtime_error if no query could be parsed.
[[nodiscard]] auto generate_pool(Topic const& topic, bool include_context, ChatClient& client, int rounds = 4)
    -> QueryPool;

/// Tokenized pool queries in pool order, deduplicated, stopwords removed.
[[nodiscard]] auto build_vocabulary(QueryPool const& pool, Stopwords const& stopwords)
    -> std::vector<std::string>;

// ---------------------------------------------------------------------------
// Doc2Query and knowledge states

/// Document -> question strings.
class D2QProvider {
  public:
    virtual ~D2QProvider() = default;
    virtual auto generate(Document const& doc) -> std::vector<std::string> = 0;
    [[nodiscard]] virtual auto describe() const -> std::string = 0;
};

/// Offline stand-in: the document's top-n terms by tf * raw idf (ties by
/// term), each emitted as a one-term question.
class FallbackD2QProvider final : public D2QProvider {
  public:
    explicit FallbackD2QProvider(InvertedIndex const& index, std::size_t n = 5) : index_(&index), n_(n) {}

    auto generate(Document const& doc) -> std::vector<std::string> override;
    [[nodiscard]] auto describe() const -> std::string override;

  private:
    InvertedIndex const* index_;
    std::size_t n_;
};

/// Term filter shared by the knowledge state and topic terms.
struct TermFilter {
    InvertedIndex const* index;
    Stopwords const* stopwords;
    double max_normalized_idf = 0.5;

    /// normalized idf(t) < threshold and t is not a stopword.
    [[nodiscard]] auto accepts(std::string_view term) const -> bool;
};

/// Terms of the provider's questions for every document, filtered by
/// `filter`, deduplicated in first-occurrence order.
[[nodiscard]] auto phi_terms(std::span<Document const> docs, D2QProvider& provider, TermFilter const& filter)
    -> std::vector<std::string>;

/// Insertion-ordered set of terms.
class OrderedTerms {
  public:
    OrderedTerms() = default;
    OrderedTerms(std::initializer_list<std::string> terms);

    auto insert(std::string const& term) -> bool;
    [[nodiscard]] auto contains(std::string_view term) const -> bool;
    [[nodiscard]] auto terms() const noexcept -> std::vector<std::string> const& { return terms_; }
    [[nodiscard]] auto size() const noexcept -> std::size_t { return terms_.size(); }
    [[nodiscard]] auto empty() const noexcept -> bool { return terms_.empty(); }

    friend bool operator==(OrderedTerms const& a, OrderedTerms const& b) { return a.terms_ == b.terms_; }

  private:
    std::vector<std::string> terms_;
    std::unordered_set<std::string> index_;
};

struct KnowledgeState {
    OrderedTerms ks;
    OrderedTerms ks_rel;
    OrderedTerms topic_terms;
    std::unordered_set<std::string> used;
    std::vector<std::string> seed;

    /// seed = tokenize(title); topic_terms from description and narrative
    /// (filled for D2Q++ only).
    [[nodiscard]] static auto for_topic(Topic const& topic, Strategy strategy, TermFilter const& filter)
        -> KnowledgeState;

    friend bool operator==(KnowledgeState const&, KnowledgeState const&) = default;
};

/// topic_terms for D2Q++: filtered tokens of "<description> <narrative>".
[[nodiscard]] auto topic_terms(Topic const& topic, TermFilter const& filter) -> std::vector<std::string>;

/// ks grows by phi(seen), ks_rel by phi(relevant). `used` is untouched.
/// Precondition: every relevant document is also in `seen`.
void update_knowledge_state(KnowledgeState& state,
                            std::span<Document const> seen,
                            std::span<Document const> relevant,
                            D2QProvider& provider,
                            TermFilter const& filter);

// ---------------------------------------------------------------------------
// Per-session query generation

enum class TermOrder { Fifo, SeededRandom };

/// Where the last emitted query came from.
enum class QuerySource { Pool, Seed, Vocabulary, TopicTerms, RelevantKnowledge, Knowledge };

struct GeneratorOptions {
    TermOrder order = TermOrder::Fifo;
    /// Required for TermOrder::SeededRandom.
    Rng* rng = nullptr;
};

/// Produces the successive queries of one session under one strategy.
/// Never emits the same (normalized) query twice.
class QueryGenerator {
  public:
    using Options = GeneratorOptions;

    /// GPT and GPT+: `pool` is copied and consumed from its start.
    static auto from_pool(Strategy strategy, QueryPool pool) -> QueryGenerator;
    /// GPT* and GPT**: title seed expanded with one vocabulary term per query.
    static auto from_vocabulary(Strategy strategy, Topic const& topic, std::vector<std::string> vocabulary,
                                Options options = {}) -> QueryGenerator;
    /// D2Q, D2Q+, D2Q++: the first query is the seed itself.
    static auto from_knowledge(Strategy strategy, KnowledgeState state, Options options = {}) -> QueryGenerator;

    /// Next query, or nullopt once the strategy is exhausted.
    auto next() -> std::optional<std::string>;

    /// Feeds the documents seen for the last query back into the knowledge
    /// state. No-op for strategies without a knowledge state.
    void observe(std::span<Document const> seen,
                 std::span<Document const> relevant,
                 D2QProvider& provider,
                 TermFilter const& filter);

    [[nodiscard]] auto strategy() const noexcept -> Strategy { return strategy_; }
    [[nodiscard]] auto state() const noexcept -> KnowledgeState const& { return state_; }
    [[nodiscard]] auto last_source() const noexcept -> std::optional<QuerySource> { return last_source_; }
    /// Expansion term of the last query, empty for pool and seed queries.
    [[nodiscard]] auto last_term() const noexcept -> std::string const& { return last_term_; }

  private:
    QueryGenerator(Strategy strategy, Options options) : strategy_(strategy), options_(options) {}

    auto take_term(std::vector<std::string> const& candidates, std::unordered_set<std::string>& used)
        -> std::optional<std::string>;
    auto try_expand(std::vector<std::string> const& candidates, std::unordered_set<std::string>& used,
                    QuerySource source) -> std::optional<std::string>;
    auto emit(std::string query, QuerySource source, std::string term) -> std::optional<std::string>;

    Strategy strategy_;
    Options options_;
    QueryPool pool_;
    std::vector<std::string> vocabulary_;
    std::unordered_set<std::string> vocabulary_used_;
    KnowledgeState state_;
    std::string seed_query_;
    bool seed_issued_ = false;
    std::unordered_set<std::string> emitted_;
    std::unordered_map<std::string, std::vector<std::string>> phi_cache_;
    std::optional<QuerySource> last_source_;
    std::string last_term_;
};

}  // namespace sessim
