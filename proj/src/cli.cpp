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

#include "sessim/cli.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "sessim/collection.hpp"
#include "sessim/config.hpp"
#include "sessim/index.hpp"
#include "sessim/metrics.hpp"
#include "sessim/providers.hpp"
#include "sessim/querygen.hpp"
#include "sessim/session.hpp"
#include "sessim/text.hpp"

namespace sessim {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::size_t kAdhocDepth = 10;

auto logger() -> spdlog::logger&
{
    static auto instance = [] {
        auto log = std::make_shared<spdlog::logger>("sessim", std::make_shared<spdlog::sinks::stderr_color_sink_mt>());
        log->set_pattern("[%l] %v");
        return log;
    }();
    return *instance;
}

struct Options {
    std::string config_path;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::size_t parallel = 1;
};

/// Inputs shared by the subcommands, loaded from an experiment config.
struct Workspace {
    ExperimentConfig config;
    fs::path out;
    Corpus corpus;
    std::vector<Topic> topics;
    QrelStore qrels;
    std::optional<Stopwords> custom_stopwords;
    std::optional<InvertedIndex> index;

    [[nodiscard]] auto stopwords() const -> Stopwords const&
    {
        return custom_stopwords ? *custom_stopwords : Stopwords::english();
    }
};

auto utc_now() -> std::string
{
    auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream out;
    out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return out.str();
}

/// Records wall-clock times of a subcommand in <out>/metadata.json, the only
/// output file that differs between identical runs.
void record_metadata(fs::path const& out, std::string const& command, std::string const& started,
                     std::string const& config_path)
{
    fs::create_directories(out);
    auto path = out / "metadata.json";
    json meta = json::object();
    if (std::ifstream in(path); in) {
        try {
            meta = json::parse(in);
        } catch (json::exception const&) {
            meta = json::object();
        }
    }
    meta[command] = {{"started_at", started}, {"finished_at", utc_now()}, {"config", config_path}};
    std::ofstream(path, std::ios::binary) << meta.dump(2) << '\n';
}

void write_text(fs::path const& path, std::string const& text)
{
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << text;
}

void write_csv(fs::path const& path, std::vector<CurveRow> const& rows)
{
    std::ostringstream out;
    write_curve_csv(out, rows);
    write_text(path, out.str());
}

auto read_csv(fs::path const& path) -> std::vector<CurveRow>
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string() + " (run evaluate first)");
    }
    return parse_curve_csv(in, path.string());
}

auto load_config(Options const& options) -> ExperimentConfig
{
    auto config = load_experiment_config(options.config_path);
    check_paths(config, options.config_path);
    if (options.seed) {
        config.seeds = {*options.seed};
    }
    if (options.out) {
        config.output = *options.out;
    }
    if (char const* url = std::getenv("SIDECAR_URL"); url != nullptr && *url != '\0') {
        config.sidecar_url = url;
    }
    if (config.needs_sidecar() && !config.sidecar_url) {
        throw ConfigError(options.config_path, 0, "sidecar.url", "a sidecar provider is selected but no URL is set "
                                                                 "(config sidecar.url or SIDECAR_URL)");
    }
    return config;
}

auto load_workspace(Options const& options, bool with_index) -> Workspace
{
    Workspace ws{load_config(options), {}, {}, {}, {}, {}, {}};
    ws.out = ws.config.output;
    ws.corpus = load_corpus(ws.config.corpus);
    ws.topics = load_topics(ws.config.topics);
    ws.qrels = load_qrels(ws.config.qrels);
    if (!ws.config.stopwords.empty()) {
        ws.custom_stopwords = load_stopwords(ws.config.stopwords);
    }
    if (with_index) {
        if (!ws.config.index.empty() && fs::exists(ws.config.index)) {
            auto index = InvertedIndex::load(ws.config.index);
            bool matches = index.num_docs() == ws.corpus.size();
            for (std::size_t i = 0; matches && i < ws.corpus.size(); ++i) {
                matches = index.doc_id(static_cast<DocOrdinal>(i)) == ws.corpus[i].doc_id;
            }
            if (!matches) {
                throw std::runtime_error("index snapshot " + ws.config.index.string() +
                                         " does not match the corpus; rerun `sessim index`");
            }
            ws.index = std::move(index);
        } else {
            ws.index = InvertedIndex::build(ws.corpus);
        }
    }
    return ws;
}

auto load_pool_file(fs::path const& dir, char const* name) -> std::optional<PoolSet>
{
    if (dir.empty() || !fs::exists(dir / name)) {
        return std::nullopt;
    }
    return load_pools(dir / name);
}

auto log_files(fs::path const& logs_dir) -> std::vector<fs::path>
{
    if (!fs::exists(logs_dir)) {
        throw std::runtime_error("no session logs in " + logs_dir.string() + " (run simulate first)");
    }
    std::vector<fs::path> files;
    for (auto const& entry : fs::recursive_directory_iterator(logs_dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".jsonl") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    return files;
}

auto cmd_index(Options const& options) -> int
{
    auto ws = load_workspace(options, false);
    auto index = InvertedIndex::build(ws.corpus);
    auto path = ws.config.index.empty() ? ws.out / "index.txt" : ws.config.index;
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    index.save(path);
    logger().info("indexed {} documents, {} terms, avgdl {:.2f} -> {}", index.num_docs(), index.num_terms(),
                  index.avgdl(), path.string());
    return kExitSuccess;
}

auto cmd_poolgen(Options const& options) -> int
{
    auto ws = load_workspace(options, false);
    if (ws.config.pool_directory.empty()) {
        throw ConfigError(options.config_path, 0, "pools.directory", "required by poolgen");
    }
    auto client = OpenAiChatClient::from_env();
    PoolSet plain;
    PoolSet context;
    for (auto const& topic : ws.topics) {
        plain.emplace(topic.topic_id, generate_pool(topic, false, client, ws.config.pool_rounds));
        context.emplace(topic.topic_id, generate_pool(topic, true, client, ws.config.pool_rounds));
        logger().info("topic {}: {} context-free and {} context queries", topic.topic_id,
                      plain.at(topic.topic_id).size(), context.at(topic.topic_id).size());
    }
    fs::create_directories(ws.config.pool_directory);
    save_pools(ws.config.pool_directory / "gpt.jsonl", plain);
    save_pools(ws.config.pool_directory / "gpt_plus.jsonl", context);
    return kExitSuccess;
}

auto cmd_simulate(Options const& options) -> int
{
    auto ws = load_workspace(options, true);
    auto const& index = *ws.index;
    auto gpt = load_pool_file(ws.config.pool_directory, "gpt.jsonl");
    auto gpt_plus = load_pool_file(ws.config.pool_directory, "gpt_plus.jsonl");

    std::shared_ptr<SidecarClient const> sidecar;
    if (ws.config.needs_sidecar()) {
        sidecar = std::make_shared<SidecarClient>(*ws.config.sidecar_url);
        auto health = sidecar->wait_until_ready();
        for (auto const& [role, model] : health.models) {
            logger().info("sidecar {} model: {}", role, model);
        }
    }
    std::unique_ptr<D2QProvider> d2q;
    if (ws.config.doc2query == ProviderKind::Sidecar && sidecar) {
        d2q = std::make_unique<HttpD2QProvider>(sidecar, ws.config.doc2query_n);
    } else {
        d2q = std::make_unique<FallbackD2QProvider>(index, static_cast<std::size_t>(ws.config.doc2query_n));
    }
    std::shared_ptr<RerankProvider> reranker;
    if (sidecar) {
        reranker = std::make_shared<HttpRerankProvider>(sidecar);
    }

    std::vector<SessionConfig> configs;
    for (auto seed : ws.config.seeds) {
        for (auto const& variant : ws.config.variants) {
            auto session = variant.session;
            session.name = run_id(variant.session.name, seed);
            session.seed = seed;
            if (variant.rerank == ProviderKind::Sidecar) {
                session.rerank.provider = reranker;
            }
            configs.push_back(std::move(session));
        }
    }

    SimulationContext context{ws.corpus, index, ws.qrels, ws.stopwords(),
                              gpt ? &*gpt : nullptr, gpt_plus ? &*gpt_plus : nullptr, d2q.get()};
    logger().info("simulating {} topics x {} runs with {} worker(s)", ws.topics.size(), configs.size(),
                  options.parallel);
    auto outcomes = run_batch(ws.topics, configs, context, options.parallel);

    auto logs_dir = ws.out / "logs";
    fs::remove_all(logs_dir);
    json failures = json::array();
    for (auto const& outcome : outcomes) {
        auto const& name = configs[outcome.config_index].name;
        if (outcome.ok()) {
            save_session_log(logs_dir / name / (outcome.topic_id + ".jsonl"), *outcome.log);
            continue;
        }
        logger().error("run {} topic {}: {}", name, outcome.topic_id, outcome.error);
        json tail = json::array();
        for (auto const& e : outcome.log_tail) {
            tail.push_back({{"t", e.t}, {"action", to_string(e.action)}, {"query_index", e.query_index}});
        }
        failures.push_back({{"run_id", name}, {"topic_id", outcome.topic_id}, {"error", outcome.error},
                            {"log_tail", tail}});
    }
    auto failures_path = ws.out / "failures.json";
    if (failures.empty()) {
        fs::remove(failures_path);
        logger().info("wrote {} session logs to {}", outcomes.size(), logs_dir.string());
        return kExitSuccess;
    }
    write_text(failures_path, failures.dump(2) + "\n");
    logger().error("{} of {} sessions failed; details in {}", failures.size(), outcomes.size(),
                   failures_path.string());
    return kExitPartialFailure;
}

auto cmd_evaluate(Options const& options) -> int
{
    auto ws = load_workspace(options, false);
    auto const& params = ws.config.metrics;
    std::vector<CurveRow> curves;
    std::vector<CurveRow> totals;
    std::vector<CurveRow> adhoc;
    auto files = log_files(ws.out / "logs");
    for (auto const& file : files) {
        auto log = load_session_log(file);
        validate_log(log);
        auto effect = effect_curve(log);
        auto dcg = sdcg(log, params);
        auto rbp = srbp(log, params);
        append_rows(curves, log.run_id, log.topic_id, "effect", effect);
        append_rows(curves, log.run_id, log.topic_id, "sdcg_query", dcg.by_query);
        append_rows(curves, log.run_id, log.topic_id, "sdcg_cost", dcg.by_cost);
        append_rows(curves, log.run_id, log.topic_id, "srbp_query", rbp.by_query);
        append_rows(curves, log.run_id, log.topic_id, "srbp_cost", rbp.by_cost);

        auto queries = static_cast<double>(log.queries_issued());
        totals.push_back({log.run_id, log.topic_id, log.total_time(), effect.final_value(), "effect"});
        totals.push_back({log.run_id, log.topic_id, queries, dcg.total, "sdcg"});
        totals.push_back({log.run_id, log.topic_id, queries, rbp.total, "srbp"});

        for (auto const& q : log.queries) {
            auto scores = adhoc_eval(q.ranking, ws.qrels, log.topic_id, kAdhocDepth);
            auto x = static_cast<double>(q.query_index);
            adhoc.push_back({log.run_id, log.topic_id, x, scores.precision, "p@10"});
            adhoc.push_back({log.run_id, log.topic_id, x, scores.ndcg, "ndcg@10"});
            adhoc.push_back({log.run_id, log.topic_id, x, scores.bpref, "bpref"});
        }
    }
    auto eval_dir = ws.out / "eval";
    write_csv(eval_dir / "curves.csv", curves);
    write_csv(eval_dir / "totals.csv", totals);
    write_csv(eval_dir / "adhoc.csv", adhoc);
    logger().info("evaluated {} session logs -> {}", files.size(), eval_dir.string());
    return kExitSuccess;
}

auto cmd_report(Options const& options) -> int
{
    auto ws = load_workspace(options, false);
    auto rows = read_csv(ws.out / "eval" / "curves.csv");

    // (variant, measure) -> (run_id, topic_id) -> curve
    std::map<std::pair<std::string, std::string>, std::map<std::pair<std::string, std::string>, GainCurve>> grouped;
    for (auto const& row : rows) {
        grouped[{variant_of(row.run_id), row.measure}][{row.run_id, row.topic_id}].points.push_back({row.x, row.y});
    }

    std::vector<CurveRow> means;
    std::vector<CurveRow> finals;
    for (auto const& [key, runs] : grouped) {
        auto const& [variant, measure] = key;
        bool by_query = measure.ends_with("_query");
        double max_x = 0.0;
        std::vector<GainCurve> curves;
        std::map<std::string, std::vector<double>> per_topic;
        for (auto const& [run_topic, curve] : runs) {
            max_x = std::max(max_x, curve.points.empty() ? 0.0 : curve.points.back().x);
            curves.push_back(curve);
            per_topic[run_topic.second].push_back(curve.final_value());
        }
        double step = by_query ? 1.0 : ws.config.report_cost_step;
        std::vector<double> grid;
        for (std::size_t i = 0; static_cast<double>(i) * step <= max_x + step * 0.5; ++i) {
            grid.push_back(static_cast<double>(i) * step);
        }
        append_rows(means, variant, "all", measure, mean_curve(curves, grid));

        double sum_all = 0.0;
        std::size_t n_all = 0;
        for (auto const& [topic, values] : per_topic) {
            double sum = 0.0;
            for (double v : values) {
                sum += v;
            }
            sum_all += sum;
            n_all += values.size();
            finals.push_back({variant, topic, static_cast<double>(values.size()),
                              sum / static_cast<double>(values.size()), measure});
        }
        finals.push_back({variant, "all", static_cast<double>(n_all), sum_all / static_cast<double>(n_all), measure});
    }

    std::map<std::string, std::vector<SessionLog>> logs_by_variant;
    for (auto const& file : log_files(ws.out / "logs")) {
        auto log = load_session_log(file);
        auto variant = variant_of(log.run_id);
        logs_by_variant[variant].push_back(std::move(log));
    }
    std::vector<CurveRow> snippets;
    for (auto const& [variant, logs] : logs_by_variant) {
        for (auto const& s : snippet_distribution(logs)) {
            auto x = static_cast<double>(s.position);
            snippets.push_back({variant, "all", x, s.mean, "snippets_mean"});
            snippets.push_back({variant, "all", x, s.std, "snippets_std"});
            snippets.push_back({variant, "all", x, static_cast<double>(s.count), "snippets_count"});
        }
    }

    auto report_dir = ws.out / "report";
    write_csv(report_dir / "mean_curves.csv", means);
    write_csv(report_dir / "finals.csv", finals);
    write_csv(report_dir / "snippets.csv", snippets);
    logger().info("report for {} variants -> {}", logs_by_variant.size(), report_dir.string());
    return kExitSuccess;
}

}  // namespace

auto run_cli(std::vector<std::string> const& args) -> int
{
    CLI::App app{"Simulated interactive search sessions and their evaluation", "sessim"};
    app.require_subcommand(1);
    Options options;

    auto add_common = [&](CLI::App* sub, bool with_out) {
        sub->add_option("--config", options.config_path, "Experiment configuration (YAML)")->required();
        if (with_out) {
            sub->add_option("--out", options.out, "Output directory (overrides the config)");
        }
    };
    auto* index = app.add_subcommand("index", "Build and snapshot the inverted index");
    add_common(index, true);
    auto* poolgen = app.add_subcommand("poolgen", "Generate query pools with a chat model (API_* variables)");
    add_common(poolgen, false);
    auto* simulate = app.add_subcommand("simulate", "Run all session variants over all topics");
    add_common(simulate, true);
    simulate->add_option("--seed", options.seed, "Single seed replacing the configured seed list");
    simulate->add_option("--parallel", options.parallel, "Worker threads")->check(CLI::PositiveNumber);
    auto* evaluate = app.add_subcommand("evaluate", "Compute Effect, sDCG, sRBP and adhoc measures per log");
    add_common(evaluate, true);
    auto* report = app.add_subcommand("report", "Average curves over topics and summarize snippet counts");
    add_common(report, true);

    std::vector<std::string> argv_storage{"sessim"};
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<char const*> argv;
    for (auto const& a : argv_storage) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (CLI::CallForHelp const& e) {
        return app.exit(e);
    } catch (CLI::CallForAllHelp const& e) {
        return app.exit(e);
    } catch (CLI::ParseError const& e) {
        app.exit(e);
        return kExitUsage;
    }

    auto* sub = app.get_subcommands().front();
    auto command = sub->get_name();
    auto started = utc_now();
    try {
        int status = kExitSuccess;
        if (command == "index") {
            status = cmd_index(options);
        } else if (command == "poolgen") {
            status = cmd_poolgen(options);
        } else if (command == "simulate") {
            status = cmd_simulate(options);
        } else if (command == "evaluate") {
            status = cmd_evaluate(options);
        } else {
            status = cmd_report(options);
        }
        auto out = options.out ? fs::path(*options.out) : load_experiment_config(options.config_path).output;
        record_metadata(out, command, started, options.config_path);
        return status;
    } catch (ConfigError const& e) {
        logger().error("configuration error: {}", e.what());
        return kExitUsage;
    } catch (std::exception const& e) {
        logger().error("{}: {}", command, e.what());
        return kExitPartialFailure;
    }
}

}  // namespace sessim
