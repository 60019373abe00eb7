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

#include "sessim/session.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <thread>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "sessim/rng.hpp"

namespace sessim {

using nlohmann::json;

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr std::pair<EventType, std::string_view> kEventNames[] = {
    {EventType::IssueQuery, "issue_query"},
    {EventType::ExamineSnippet, "examine_snippet"},
    {EventType::Click, "click"},
    {EventType::Read, "read"},
    {EventType::Judge, "judge"},
    {EventType::StopQuery, "stop_query"},
    {EventType::EndSession, "end_session"},
};

constexpr std::size_t kLogTail = 20;

auto config_to_json(SessionConfig const& c) -> json
{
    json stop = std::visit(overloaded{[](StaticStop const& s) { return json{{"static", s.rpp}}; },
                                      [](DynamicStop const& d) { return json{{"dynamic", d.tnr}}; }},
                           c.stop);
    json judge = std::visit(overloaded{[](PerfectJudge const&) { return json("perfect"); },
                                       [](NoisyJudge const& n) { return json{{"noisy", n.p_correct}}; }},
                            c.judge);
    return json{
        {"strategy", to_string(c.strategy)},
        {"click", {{"name", c.click.name}, {"p_rel", c.click.p_rel}, {"p_nrel", c.click.p_nrel}}},
        {"stop", stop},
        {"judge", judge},
        {"costs", {{"query", c.costs.query}, {"snippet", c.costs.snippet}, {"read", c.costs.read}, {"judge", c.costs.judge}}},
        {"rerank", {{"provider", c.rerank.describe()}, {"cutoff", c.rerank.cutoff}}},
        {"bm25", {{"k1", c.bm25.k1}, {"b", c.bm25.b}}},
        {"retrieval_k", c.retrieval_k},
        {"global_budget", c.global_budget},
        {"seed", c.seed},
        {"term_order", c.term_order == TermOrder::Fifo ? "fifo" : "random"},
        {"max_normalized_idf", c.max_normalized_idf},
    };
}

auto is_costed(EventType type) -> bool
{
    return type != EventType::Click && type != EventType::StopQuery && type != EventType::EndSession;
}

auto event_to_json(SessionEvent const& e) -> json
{
    json obj{{"type", "event"}, {"t", e.t}, {"action", to_string(e.action)}, {"query_index", e.query_index}};
    if (e.doc_id) {
        obj["doc_id"] = *e.doc_id;
    }
    if (e.grade) {
        obj["grade"] = e.grade->is_judged() ? json(e.grade->value()) : json(nullptr);
    }
    if (e.judged_relevant) {
        obj["judged_relevant"] = *e.judged_relevant;
    }
    obj["cost"] = e.cost;
    return obj;
}

auto grade_from_json(json const& value) -> RelevanceGrade
{
    return value.is_null() ? RelevanceGrade::unjudged() : RelevanceGrade::judged(value.get<int>());
}

auto make_generator(Topic const& topic, SessionConfig const& config, SimulationContext const& context,
                    TermFilter const& filter, Rng* rng) -> QueryGenerator
{
    QueryGenerator::Options options{config.term_order, rng};
    auto strategy = config.strategy;
    if (is_d2q_family(strategy)) {
        if (context.d2q == nullptr) {
            throw std::runtime_error("strategy " + std::string(to_string(strategy)) + " needs a doc2query provider");
        }
        return QueryGenerator::from_knowledge(strategy, KnowledgeState::for_topic(topic, strategy, filter), options);
    }
    auto const* pools = uses_context_pool(strategy) ? context.gpt_plus_pools : context.gpt_pools;
    auto const* pool_name = uses_context_pool(strategy) ? "gpt+" : "gpt";
    if (pools == nullptr) {
        throw std::runtime_error(std::string("no ") + pool_name + " pools loaded");
    }
    auto it = pools->find(topic.topic_id);
    if (it == pools->end()) {
        throw std::runtime_error(std::string("no ") + pool_name + " pool for topic " + topic.topic_id);
    }
    if (uses_pool(strategy)) {
        return QueryGenerator::from_pool(strategy, it->second);
    }
    return QueryGenerator::from_vocabulary(strategy, topic, build_vocabulary(it->second, context.stopwords), options);
}

/// Mutable state of one running session.
class SessionRun {
  public:
    SessionRun(Topic const& topic, SessionConfig const& config, SimulationContext const& context)
        : topic_(topic), config_(config), context_(context),
          filter_{&context.index, &context.stopwords, config.max_normalized_idf},
          rng_(Rng(config.seed).derive(topic.topic_id).derive(config.fingerprint()))
    {
        log_.topic_id = topic.topic_id;
        log_.run_id = config.name;
        log_.fingerprint = config.fingerprint();
        log_.config_json = config.canonical_json();
    }

    auto run() -> SessionLog
    {
        try {
            loop();
        } catch (std::exception const& e) {
            throw SessionError(e.what(), std::move(log_));
        }
        return std::move(log_);
    }

  private:
    void push(EventType action, double cost, std::optional<std::string> doc = std::nullopt,
              std::optional<RelevanceGrade> grade = std::nullopt, std::optional<bool> judged = std::nullopt)
    {
        time_ += cost;
        log_.events.push_back(SessionEvent{time_, action, query_index_, std::move(doc), grade, judged, cost});
    }

    [[nodiscard]] auto out_of_budget() const -> bool { return time_ >= config_.global_budget; }

    void loop()
    {
        // Built before the first event so misconfiguration fails with an empty log.
        auto generator = make_generator(topic_, config_, context_, filter_, &rng_);
        auto const& costs = config_.costs;
        while (true) {
            auto query = generator.next();
            if (!query) {
                push(EventType::EndSession, 0.0);
                return;
            }
            ++query_index_;
            push(EventType::IssueQuery, action_cost(costs, Action::Query));

            auto ranking = rerank(retrieve(context_.index, config_.bm25, *query, config_.retrieval_k),
                                  config_.rerank, context_.corpus);
            QueryRecord record{query_index_, *query, std::move(ranking), {}, 0};
            record.grades.reserve(record.ranking.items.size());
            for (auto const& item : record.ranking.items) {
                record.grades.push_back(context_.qrels.grade(topic_.topic_id, item.doc_id));
            }

            bool over = out_of_budget();
            std::vector<Document> seen;
            std::vector<Document> relevant;
            if (!over) {
                over = scan(record, seen, relevant);
            }
            log_.queries.push_back(std::move(record));
            if (over) {
                push(EventType::EndSession, 0.0);
                return;
            }
            push(EventType::StopQuery, 0.0);
            if (context_.d2q != nullptr) {
                generator.observe(seen, relevant, *context_.d2q, filter_);
            }
        }
    }

    /// Scans the result list of the current query. Returns true when the global
    /// budget ran out.
    auto scan(QueryRecord& record, std::vector<Document>& seen, std::vector<Document>& relevant) -> bool
    {
        auto const& costs = config_.costs;
        double since_relevant = 0.0;
        int examined = 0;
        for (std::size_t rank = 0; rank < record.ranking.items.size(); ++rank) {
            auto const& doc_id = record.ranking.items[rank].doc_id;
            if (clicked_.contains(doc_id)) {
                continue;
            }
            auto grade = record.grades[rank];
            auto const* doc = context_.corpus.find(doc_id);
            if (doc == nullptr) {
                throw std::runtime_error("ranked document '" + doc_id + "' is not in the corpus");
            }

            auto snippet = action_cost(costs, Action::Snippet);
            push(EventType::ExamineSnippet, snippet, doc_id, grade);
            ++examined;
            record.examined_depth = static_cast<std::size_t>(examined);
            since_relevant += snippet;
            seen.push_back(*doc);
            if (out_of_budget()) {
                return true;
            }

            if (decide_click(config_.click, grade, rng_)) {
                clicked_.insert(doc_id);
                push(EventType::Click, 0.0, doc_id, grade);
                auto read = action_cost(costs, Action::Read);
                push(EventType::Read, read, doc_id, grade);
                since_relevant += read;
                if (out_of_budget()) {
                    return true;
                }
                bool is_relevant = judge_document(config_.judge, grade, rng_);
                auto judge = action_cost(costs, Action::Judge);
                push(EventType::Judge, judge, doc_id, grade, is_relevant);
                since_relevant += judge;
                if (is_relevant) {
                    since_relevant = 0.0;
                    relevant.push_back(*doc);
                }
                if (out_of_budget()) {
                    return true;
                }
            }
            if (should_stop(config_.stop, examined, since_relevant)) {
                break;
            }
        }
        return false;
    }

    Topic const& topic_;
    SessionConfig const& config_;
    SimulationContext const& context_;
    TermFilter filter_;
    Rng rng_;
    SessionLog log_;
    double time_ = 0.0;
    int query_index_ = 0;
    std::unordered_set<std::string> clicked_;
};

}  // namespace

void SessionConfig::validate() const
{
    click.validate();
    sessim::validate(stop);
    sessim::validate(judge);
    costs.validate();
    bm25.validate();
    if (rerank.cutoff == 0) {
        throw std::invalid_argument("rerank cutoff must be > 0");
    }
    if (retrieval_k == 0) {
        throw std::invalid_argument("retrieval_k must be > 0");
    }
    if (!(global_budget > 0.0)) {
        throw std::invalid_argument("global_budget must be > 0");
    }
    if (!(max_normalized_idf > 0.0 && max_normalized_idf <= 1.0)) {
        throw std::invalid_argument("max_normalized_idf must be in (0, 1]");
    }
}

auto SessionConfig::canonical_json() const -> std::string
{
    return config_to_json(*this).dump();
}

auto SessionConfig::fingerprint() const -> std::string
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(canonical_json())));
    return buf;
}

auto to_string(EventType type) -> std::string_view
{
    for (auto const& [t, name] : kEventNames) {
        if (t == type) {
            return name;
        }
    }
    return "unknown";
}

auto parse_event_type(std::string_view name) -> EventType
{
    for (auto const& [t, n] : kEventNames) {
        if (n == name) {
            return t;
        }
    }
    throw std::invalid_argument("unknown event action '" + std::string(name) + "'");
}

void validate_log(SessionLog const& log)
{
    auto fail = [](std::size_t i, std::string const& what) {
        throw std::invalid_argument("event " + std::to_string(i) + ": " + what);
    };
    std::vector<std::size_t> examined(log.queries.size() + 1, 0);
    double last_t = 0.0;
    for (std::size_t i = 0; i < log.events.size(); ++i) {
        auto const& e = log.events[i];
        if (e.t < last_t || (is_costed(e.action) && !(e.t > last_t))) {
            fail(i, "time does not increase");
        }
        if (is_costed(e.action) ? !(e.cost > 0.0) : e.cost != 0.0) {
            fail(i, "bad cost for " + std::string(to_string(e.action)));
        }
        last_t = e.t;
        if (e.query_index < 0 || static_cast<std::size_t>(e.query_index) > log.queries.size()) {
            fail(i, "query_index out of range");
        }
        auto previous_is = [&](EventType type) {
            return i > 0 && log.events[i - 1].action == type && log.events[i - 1].doc_id == e.doc_id;
        };
        switch (e.action) {
        case EventType::ExamineSnippet:
            if (!e.doc_id) {
                fail(i, "examine_snippet without doc_id");
            }
            ++examined[static_cast<std::size_t>(e.query_index)];
            break;
        case EventType::Click:
            if (!previous_is(EventType::ExamineSnippet)) {
                fail(i, "click not preceded by examine_snippet of the same doc");
            }
            break;
        case EventType::Read:
            if (!previous_is(EventType::Click)) {
                fail(i, "read not preceded by click on the same doc");
            }
            break;
        case EventType::Judge:
            if (!previous_is(EventType::Read)) {
                fail(i, "judge not preceded by read of the same doc");
            }
            if (!e.judged_relevant) {
                fail(i, "judge without verdict");
            }
            break;
        case EventType::EndSession:
            if (i + 1 != log.events.size()) {
                fail(i, "end_session is not the last event");
            }
            break;
        default:
            break;
        }
    }
    for (auto const& q : log.queries) {
        if (q.examined_depth > q.ranking.items.size()) {
            throw std::invalid_argument("query " + std::to_string(q.query_index) + ": examined_depth exceeds ranking");
        }
        if (q.grades.size() != q.ranking.items.size()) {
            throw std::invalid_argument("query " + std::to_string(q.query_index) + ": grades not aligned");
        }
        if (q.query_index < 1 || examined[static_cast<std::size_t>(q.query_index)] != q.examined_depth) {
            throw std::invalid_argument("query " + std::to_string(q.query_index) +
                                        ": examined_depth disagrees with events");
        }
    }
}

void write_session_log(std::ostream& out, SessionLog const& log)
{
    json header{{"type", "header"},
                {"topic_id", log.topic_id},
                {"run_id", log.run_id},
                {"fingerprint", log.fingerprint},
                {"config", log.config_json.empty() ? json::object() : json::parse(log.config_json)}};
    out << header.dump() << '\n';
    for (auto const& e : log.events) {
        out << event_to_json(e).dump() << '\n';
    }
    for (auto const& q : log.queries) {
        json items = json::array();
        for (std::size_t i = 0; i < q.ranking.items.size(); ++i) {
            auto const& item = q.ranking.items[i];
            auto const& g = q.grades[i];
            items.push_back(json{{"doc_id", item.doc_id},
                                 {"score", item.score},
                                 {"grade", g.is_judged() ? json(g.value()) : json(nullptr)}});
        }
        out << json{{"type", "ranking"},
                    {"query_index", q.query_index},
                    {"query", q.query},
                    {"examined_depth", q.examined_depth},
                    {"items", items}}
                   .dump()
            << '\n';
    }
}

void save_session_log(std::filesystem::path const& path, SessionLog const& log)
{
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write session log " + path.string());
    }
    write_session_log(out, log);
}

auto parse_session_log(std::istream& in, std::string const& source) -> SessionLog
{
    SessionLog log;
    bool have_header = false;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        try {
            auto obj = json::parse(line);
            auto type = obj.at("type").get<std::string>();
            if (type == "header") {
                if (have_header) {
                    throw ParseError(source, line_no, "duplicate header");
                }
                have_header = true;
                log.topic_id = obj.at("topic_id").get<std::string>();
                log.run_id = obj.at("run_id").get<std::string>();
                log.fingerprint = obj.at("fingerprint").get<std::string>();
                log.config_json = obj.at("config").dump();
                continue;
            }
            if (!have_header) {
                throw ParseError(source, line_no, "missing header line");
            }
            if (type == "event") {
                SessionEvent e;
                e.t = obj.at("t").get<double>();
                e.action = parse_event_type(obj.at("action").get<std::string>());
                e.query_index = obj.at("query_index").get<int>();
                if (obj.contains("doc_id")) {
                    e.doc_id = obj["doc_id"].get<std::string>();
                }
                if (obj.contains("grade")) {
                    e.grade = grade_from_json(obj["grade"]);
                }
                if (obj.contains("judged_relevant")) {
                    e.judged_relevant = obj["judged_relevant"].get<bool>();
                }
                e.cost = obj.at("cost").get<double>();
                log.events.push_back(std::move(e));
            } else if (type == "ranking") {
                QueryRecord q;
                q.query_index = obj.at("query_index").get<int>();
                q.query = obj.at("query").get<std::string>();
                q.ranking.query = q.query;
                q.examined_depth = obj.at("examined_depth").get<std::size_t>();
                for (auto const& item : obj.at("items")) {
                    q.ranking.items.push_back(
                        ScoredDoc{item.at("doc_id").get<std::string>(), item.at("score").get<double>()});
                    q.grades.push_back(grade_from_json(item.at("grade")));
                }
                log.queries.push_back(std::move(q));
            } else {
                throw ParseError(source, line_no, "unknown line type '" + type + "'");
            }
        } catch (json::exception const& e) {
            throw ParseError(source, line_no, e.what());
        } catch (std::invalid_argument const& e) {
            throw ParseError(source, line_no, e.what());
        }
    }
    if (!have_header) {
        throw ParseError(source, 0, "empty session log");
    }
    return log;
}

auto load_session_log(std::filesystem::path const& path) -> SessionLog
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError(path.string(), 0, "cannot open session log");
    }
    return parse_session_log(in, path.string());
}

auto run_session(Topic const& topic, SessionConfig const& config, SimulationContext const& context) -> SessionLog
{
    config.validate();
    return SessionRun(topic, config, context).run();
}

auto run_batch(std::vector<Topic> const& topics,
               std::vector<SessionConfig> const& configs,
               SimulationContext const& context,
               std::size_t parallelism) -> std::vector<SessionOutcome>
{
    std::vector<SessionOutcome> outcomes(topics.size() * configs.size());
    for (std::size_t t = 0; t < topics.size(); ++t) {
        for (std::size_t c = 0; c < configs.size(); ++c) {
            auto& slot = outcomes[t * configs.size() + c];
            slot.topic_id = topics[t].topic_id;
            slot.config_index = c;
        }
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (auto i = next++; i < outcomes.size(); i = next++) {
            auto& slot = outcomes[i];
            auto const& topic = topics[i / configs.size()];
            auto const& config = configs[slot.config_index];
            try {
                slot.log = run_session(topic, config, context);
            } catch (SessionError const& e) {
                slot.error = e.what();
                auto const& events = e.partial().events;
                auto tail = events.size() > kLogTail ? events.end() - kLogTail : events.begin();
                slot.log_tail.assign(tail, events.end());
            } catch (std::exception const& e) {
                slot.error = e.what();
            }
        }
    };
    auto threads = std::clamp<std::size_t>(parallelism, 1, std::max<std::size_t>(outcomes.size(), 1));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (std::size_t i = 0; i < threads; ++i) {
            pool.emplace_back(worker);
        }
    }
    return outcomes;
}

}  // namespace sessim
