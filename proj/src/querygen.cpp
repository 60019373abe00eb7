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

#include "sessim/querygen.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace sessim {

namespace {

constexpr std::string_view kPromptPrefix = "Please generate one-hundred keyword queries about ";

struct StrategyName {
    Strategy strategy;
    std::string_view name;
};

constexpr StrategyName kStrategyNames[] = {
    {Strategy::Gpt, "gpt"},
    {Strategy::GptPlus, "gpt+"},
    {Strategy::GptStar, "gpt*"},
    {Strategy::GptStarStar, "gpt**"},
    {Strategy::D2Q, "d2q"},
    {Strategy::D2QPlus, "d2q+"},
    {Strategy::D2QPlusPlus, "d2q++"},
};

auto trim(std::string_view s) -> std::string_view
{
    auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
    while (!s.empty() && is_space(s.front())) {
        s.remove_prefix(1);
    }
    while (!s.empty() && is_space(s.back())) {
        s.remove_suffix(1);
    }
    return s;
}

auto strip_enumeration(std::string_view s) -> std::string_view
{
    if (!s.empty() && (s.front() == '-' || s.front() == '*')) {
        return trim(s.substr(1));
    }
    std::size_t digits = 0;
    while (digits < s.size() && std::isdigit(static_cast<unsigned char>(s[digits])) != 0) {
        ++digits;
    }
    if (digits > 0 && digits < s.size() && (s[digits] == '.' || s[digits] == ')')) {
        return trim(s.substr(digits + 1));
    }
    return s;
}

auto strip_quotes(std::string_view s) -> std::string_view
{
    constexpr std::string_view kOpenCurly = "\xE2\x80\x9C";
    constexpr std::string_view kCloseCurly = "\xE2\x80\x9D";
    while (true) {
        if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') || (s.front() == '\'' && s.back() == '\''))) {
            s = trim(s.substr(1, s.size() - 2));
        } else if (s.size() >= 6 && s.starts_with(kOpenCurly) && s.ends_with(kCloseCurly)) {
            s = trim(s.substr(3, s.size() - 6));
        } else {
            return s;
        }
    }
}

}  // namespace

auto to_string(Strategy strategy) -> std::string_view
{
    for (auto const& entry : kStrategyNames) {
        if (entry.strategy == strategy) {
            return entry.name;
        }
    }
    return "unknown";
}

auto parse_strategy(std::string_view name) -> Strategy
{
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    for (auto const& entry : kStrategyNames) {
        if (entry.name == lower) {
            return entry.strategy;
        }
    }
    throw std::invalid_argument("unknown query strategy '" + std::string(name) + "'");
}

auto build_prompt(Topic const& topic, bool include_context) -> std::string
{
    if (topic.title.empty()) {
        throw std::invalid_argument("topic " + topic.topic_id + " has an empty title");
    }
    std::string prompt(kPromptPrefix);
    prompt += topic.title;
    prompt += '.';
    if (include_context) {
        prompt += ' ';
        prompt += topic.description;
        prompt += ' ';
        prompt += topic.narrative;
    }
    return std::string(trim(prompt));
}

auto parse_llm_queries(std::string_view response) -> std::vector<std::string>
{
    std::vector<std::string> queries;
    std::size_t start = 0;
    while (start <= response.size()) {
        auto end = response.find('\n', start);
        if (end == std::string_view::npos) {
            end = response.size();
        }
        auto line = strip_quotes(strip_enumeration(trim(response.substr(start, end - start))));
        if (!line.empty()) {
            queries.emplace_back(line);
        }
        start = end + 1;
    }
    return queries;
}

auto QueryPool::add(std::string query) -> bool
{
    auto normalized = normalize_query(query);
    if (normalized.empty() || !normalized_.insert(std::move(normalized)).second) {
        return false;
    }
    queries_.push_back(std::move(query));
    return true;
}

auto QueryPool::next() -> std::optional<std::string>
{
    if (cursor_ >= queries_.size()) {
        return std::nullopt;
    }
    return queries_[cursor_++];
}

void write_pools(std::ostream& out, PoolSet const& pools)
{
    for (auto const& [topic_id, pool] : pools) {
        std::size_t rank = 1;
        for (auto const& query : pool.queries()) {
            out << nlohmann::json{{"topic_id", topic_id}, {"rank", rank++}, {"query", query}}.dump() << '\n';
        }
    }
}

void save_pools(std::filesystem::path const& path, PoolSet const& pools)
{
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write pool file " + path.string());
    }
    write_pools(out, pools);
}

auto parse_pools(std::istream& in, std::string const& source) -> PoolSet
{
    struct Row {
        long long rank;
        std::size_t order;
        std::string query;
    };
    std::map<std::string, std::vector<Row>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (nlohmann::json::parse_error const& e) {
            throw ParseError(source, line_no, std::string("malformed JSON: ") + e.what());
        }
        if (!obj.is_object() || !obj.contains("topic_id") || !obj["topic_id"].is_string() ||
            !obj.contains("query") || !obj["query"].is_string()) {
            throw ParseError(source, line_no, "expected {\"topic_id\", \"rank\", \"query\"}");
        }
        long long rank = obj.contains("rank") && obj["rank"].is_number_integer() ? obj["rank"].get<long long>()
                                                                                 : static_cast<long long>(line_no);
        rows[obj["topic_id"].get<std::string>()].push_back(Row{rank, line_no, obj["query"].get<std::string>()});
    }
    PoolSet pools;
    for (auto& [topic_id, list] : rows) {
        std::stable_sort(list.begin(), list.end(), [](Row const& a, Row const& b) { return a.rank < b.rank; });
        QueryPool pool(topic_id);
        for (auto& row : list) {
            pool.add(std::move(row.query));
        }
        pools.emplace(topic_id, std::move(pool));
    }
    return pools;
}

auto load_pools(std::filesystem::path const& path) -> PoolSet
{
    std::ifstream in(path);
    if (!in) {
        throw ParseError(path.string(), 0, "cannot open pool file");
    }
    return parse_pools(in, path.string());
}

auto generate_pool(Topic const& topic, bool include_context, ChatClient& client, int rounds) -> QueryPool
{
    if (rounds <= 0) {
        throw std::invalid_argument("rounds must be > 0");
    }
    auto prompt = build_prompt(topic, include_context);
    QueryPool pool(topic.topic_id);
    for (int round = 0; round < rounds; ++round) {
        for (auto& query : parse_llm_queries(client.complete(prompt))) {
            pool.add(std::move(query));
        }
    }
    if (pool.size() == 0) {
        throw std::runtime_error("no parseable queries for topic " + topic.topic_id);
    }
    return pool;
}

auto build_vocabulary(QueryPool const& pool, Stopwords const& stopwords) -> std::vector<std::string>
{
    OrderedTerms vocab;
    for (auto const& query : pool.queries()) {
        for (auto const& term : tokenize(query)) {
            if (!stopwords.contains(term)) {
                vocab.insert(term);
            }
        }
    }
    return vocab.terms();
}

auto FallbackD2QProvider::generate(Document const& doc) -> std::vector<std::string>
{
    std::unordered_map<std::string, std::uint32_t> counts;
    for (auto& term : tokenize(doc.text)) {
        ++counts[std::move(term)];
    }
    std::vector<std::pair<double, std::string>> weighted;
    weighted.reserve(counts.size());
    for (auto const& [term, tf] : counts) {
        double raw = index_->num_docs() > 0 ? idf(*index_, term).raw : 0.0;
        weighted.emplace_back(tf * raw, term);
    }
    auto top = std::min(n_, weighted.size());
    std::partial_sort(weighted.begin(), weighted.begin() + static_cast<std::ptrdiff_t>(top), weighted.end(),
                      [](auto const& a, auto const& b) {
                          if (a.first != b.first) {
                              return a.first > b.first;
                          }
                          return a.second < b.second;
                      });
    std::vector<std::string> questions;
    questions.reserve(top);
    for (std::size_t i = 0; i < top; ++i) {
        questions.push_back(std::move(weighted[i].second));
    }
    return questions;
}

auto FallbackD2QProvider::describe() const -> std::string
{
    return "fallback:top" + std::to_string(n_);
}

auto TermFilter::accepts(std::string_view term) const -> bool
{
    if (stopwords->contains(term)) {
        return false;
    }
    return idf(*index, term).normalized < max_normalized_idf;
}

auto phi_terms(std::span<Document const> docs, D2QProvider& provider, TermFilter const& filter)
    -> std::vector<std::string>
{
    OrderedTerms terms;
    for (auto const& doc : docs) {
        for (auto const& question : provider.generate(doc)) {
            for (auto const& term : tokenize(question)) {
                if (!terms.contains(term) && filter.accepts(term)) {
                    terms.insert(term);
                }
            }
        }
    }
    return terms.terms();
}

OrderedTerms::OrderedTerms(std::initializer_list<std::string> terms)
{
    for (auto const& t : terms) {
        insert(t);
    }
}

auto OrderedTerms::insert(std::string const& term) -> bool
{
    if (!index_.insert(term).second) {
        return false;
    }
    terms_.push_back(term);
    return true;
}

auto OrderedTerms::contains(std::string_view term) const -> bool
{
    return index_.contains(std::string(term));
}

auto topic_terms(Topic const& topic, TermFilter const& filter) -> std::vector<std::string>
{
    OrderedTerms terms;
    for (auto const& term : tokenize(topic.description + " " + topic.narrative)) {
        if (!terms.contains(term) && filter.accepts(term)) {
            terms.insert(term);
        }
    }
    return terms.terms();
}

auto KnowledgeState::for_topic(Topic const& topic, Strategy strategy, TermFilter const& filter) -> KnowledgeState
{
    KnowledgeState state;
    state.seed = tokenize(topic.title);
    if (state.seed.empty()) {
        throw std::invalid_argument("topic " + topic.topic_id + " title has no terms");
    }
    if (strategy == Strategy::D2QPlusPlus) {
        for (auto const& term : sessim::topic_terms(topic, filter)) {
            state.topic_terms.insert(term);
        }
    }
    return state;
}

void update_knowledge_state(KnowledgeState& state,
                            std::span<Document const> seen,
                            std::span<Document const> relevant,
                            D2QProvider& provider,
                            TermFilter const& filter)
{
    for (auto const& term : phi_terms(seen, provider, filter)) {
        state.ks.insert(term);
    }
    for (auto const& term : phi_terms(relevant, provider, filter)) {
        state.ks_rel.insert(term);
    }
}

auto QueryGenerator::from_pool(Strategy strategy, QueryPool pool) -> QueryGenerator
{
    if (!uses_pool(strategy)) {
        throw std::invalid_argument("strategy " + std::string(to_string(strategy)) + " does not use a pool");
    }
    QueryGenerator gen(strategy, {});
    gen.pool_ = std::move(pool);
    return gen;
}

auto QueryGenerator::from_vocabulary(Strategy strategy, Topic const& topic, std::vector<std::string> vocabulary,
                                     Options options) -> QueryGenerator
{
    if (!uses_vocabulary(strategy)) {
        throw std::invalid_argument("strategy " + std::string(to_string(strategy)) + " does not use a vocabulary");
    }
    QueryGenerator gen(strategy, options);
    gen.seed_query_ = normalize_query(topic.title);
    if (gen.seed_query_.empty()) {
        throw std::invalid_argument("topic " + topic.topic_id + " title has no terms");
    }
    gen.vocabulary_ = std::move(vocabulary);
    return gen;
}

auto QueryGenerator::from_knowledge(Strategy strategy, KnowledgeState state, Options options) -> QueryGenerator
{
    if (!is_d2q_family(strategy)) {
        throw std::invalid_argument("strategy " + std::string(to_string(strategy)) + " has no knowledge state");
    }
    if (state.seed.empty()) {
        throw std::invalid_argument("knowledge state needs a non-empty seed");
    }
    QueryGenerator gen(strategy, options);
    gen.seed_query_ = join_terms(state.seed);
    gen.state_ = std::move(state);
    return gen;
}

auto QueryGenerator::emit(std::string query, QuerySource source, std::string term) -> std::optional<std::string>
{
    if (!emitted_.insert(normalize_query(query)).second) {
        return std::nullopt;
    }
    last_source_ = source;
    last_term_ = std::move(term);
    return query;
}

auto QueryGenerator::take_term(std::vector<std::string> const& candidates, std::unordered_set<std::string>& used)
    -> std::optional<std::string>
{
    if (options_.order == TermOrder::SeededRandom) {
        if (options_.rng == nullptr) {
            throw std::logic_error("seeded-random term order needs an rng");
        }
        std::vector<std::string const*> unused;
        for (auto const& term : candidates) {
            if (!used.contains(term)) {
                unused.push_back(&term);
            }
        }
        if (unused.empty()) {
            return std::nullopt;
        }
        auto const& pick = *unused[options_.rng->below(unused.size())];
        used.insert(pick);
        return pick;
    }
    for (auto const& term : candidates) {
        if (used.insert(term).second) {
            return term;
        }
    }
    return std::nullopt;
}

auto QueryGenerator::try_expand(std::vector<std::string> const& candidates, std::unordered_set<std::string>& used,
                                QuerySource source) -> std::optional<std::string>
{
    // Candidates whose query would repeat an earlier one are consumed and skipped.
    while (auto term = take_term(candidates, used)) {
        if (auto query = emit(seed_query_ + " " + *term, source, *term)) {
            return query;
        }
    }
    return std::nullopt;
}

auto QueryGenerator::next() -> std::optional<std::string>
{
    switch (strategy_) {
    case Strategy::Gpt:
    case Strategy::GptPlus:
        while (auto query = pool_.next()) {
            if (auto out = emit(std::move(*query), QuerySource::Pool, {})) {
                return out;
            }
        }
        return std::nullopt;
    case Strategy::GptStar:
    case Strategy::GptStarStar:
        return try_expand(vocabulary_, vocabulary_used_, QuerySource::Vocabulary);
    case Strategy::D2Q:
    case Strategy::D2QPlus:
    case Strategy::D2QPlusPlus:
        break;
    }

    if (!seed_issued_) {
        seed_issued_ = true;
        if (auto query = emit(seed_query_, QuerySource::Seed, {})) {
            return query;
        }
    }
    if (strategy_ == Strategy::D2QPlusPlus) {
        if (auto query = try_expand(state_.topic_terms.terms(), state_.used, QuerySource::TopicTerms)) {
            return query;
        }
    }
    if (strategy_ == Strategy::D2QPlus || strategy_ == Strategy::D2QPlusPlus) {
        if (auto query = try_expand(state_.ks_rel.terms(), state_.used, QuerySource::RelevantKnowledge)) {
            return query;
        }
    }
    return try_expand(state_.ks.terms(), state_.used, QuerySource::Knowledge);
}

void QueryGenerator::observe(std::span<Document const> seen,
                             std::span<Document const> relevant,
                             D2QProvider& provider,
                             TermFilter const& filter)
{
    if (!is_d2q_family(strategy_)) {
        return;
    }
    auto terms_of = [&](Document const& doc) -> std::vector<std::string> const& {
        auto it = phi_cache_.find(doc.doc_id);
        if (it == phi_cache_.end()) {
            it = phi_cache_.emplace(doc.doc_id, phi_terms(std::span(&doc, 1), provider, filter)).first;
        }
        return it->second;
    };
    for (auto const& doc : seen) {
        for (auto const& term : terms_of(doc)) {
            state_.ks.insert(term);
        }
    }
    for (auto const& doc : relevant) {
        for (auto const& term : terms_of(doc)) {
            state_.ks_rel.insert(term);
        }
    }
}

}  // namespace sessim
