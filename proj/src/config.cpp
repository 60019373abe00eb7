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

#include "sessim/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace sessim {

namespace {

auto format_message(std::string const& source, int line, std::string const& field, std::string const& message)
    -> std::string
{
    std::ostringstream out;
    out << source;
    if (line > 0) {
        out << ':' << line;
    }
    if (!field.empty()) {
        out << ": " << field;
    }
    out << ": " << message;
    return out.str();
}

/// Typed access to YAML nodes with field paths and line numbers in errors.
class Reader {
  public:
    Reader(std::string source, std::filesystem::path base_dir)
        : source_(std::move(source)), base_dir_(std::move(base_dir))
    {}

    [[noreturn]] void fail(YAML::Node const& node, std::string const& field, std::string const& message) const
    {
        int line = node.IsDefined() && node.Mark().line >= 0 ? node.Mark().line + 1 : 0;
        throw ConfigError(source_, line, field, message);
    }

    void expect_map(YAML::Node const& node, std::string const& field, std::set<std::string> const& keys) const
    {
        if (!node.IsMap()) {
            fail(node, field, "expected a mapping");
        }
        for (auto const& entry : node) {
            auto key = entry.first.as<std::string>();
            if (!keys.contains(key)) {
                fail(entry.first, join(field, key), "unknown key");
            }
        }
    }

    template <typename T>
    auto get(YAML::Node const& node, std::string const& field) const -> T
    {
        if (!node.IsScalar()) {
            fail(node, field, "expected a scalar value");
        }
        try {
            return node.as<T>();
        } catch (YAML::Exception const&) {
            fail(node, field, "invalid value '" + node.Scalar() + "'");
        }
    }

    template <typename T>
    void read(YAML::Node const& parent, std::string const& parent_field, char const* key, T& out) const
    {
        if (auto node = parent[key]; node.IsDefined() && !node.IsNull()) {
            out = get<T>(node, join(parent_field, key));
        }
    }

    void read_path(YAML::Node const& parent, std::string const& parent_field, char const* key,
                   std::filesystem::path& out) const
    {
        std::string value;
        read(parent, parent_field, key, value);
        if (!value.empty()) {
            std::filesystem::path p(value);
            out = p.is_absolute() ? p : base_dir_ / p;
        }
    }

    /// Runs `check` and converts std::invalid_argument into a ConfigError at `node`.
    template <typename Fn>
    void checked(YAML::Node const& node, std::string const& field, Fn&& check) const
    {
        try {
            check();
        } catch (std::invalid_argument const& e) {
            fail(node, field, e.what());
        }
    }

    [[nodiscard]] static auto join(std::string const& parent, std::string const& key) -> std::string
    {
        return parent.empty() ? key : parent + "." + key;
    }

    [[nodiscard]] auto source() const -> std::string const& { return source_; }

  private:
    std::string source_;
    std::filesystem::path base_dir_;
};

/// Recursively overlays `over` onto `base`. Nodes are shared rather than
/// copied so that error messages keep their source lines.
auto merge(YAML::Node const& base, YAML::Node const& over) -> YAML::Node
{
    if (!base.IsDefined() || !base.IsMap() || !over.IsMap()) {
        return over;
    }
    YAML::Node result(YAML::NodeType::Map);
    for (auto const& entry : base) {
        if (!over[entry.first.as<std::string>()].IsDefined()) {
            result.force_insert(entry.first, entry.second);
        }
    }
    for (auto const& entry : over) {
        result.force_insert(entry.first, merge(base[entry.first.as<std::string>()], entry.second));
    }
    return result;
}

auto read_provider(Reader const& r, YAML::Node const& node, std::string const& field, char const* builtin_name)
    -> ProviderKind
{
    auto name = r.get<std::string>(node, field);
    if (name == builtin_name) {
        return ProviderKind::Builtin;
    }
    if (name == "sidecar") {
        return ProviderKind::Sidecar;
    }
    r.fail(node, field, "expected '" + std::string(builtin_name) + "' or 'sidecar'");
}

auto read_variant(Reader const& r, YAML::Node const& node, std::string const& field) -> VariantSpec
{
    r.expect_map(node, field,
                 {"name", "strategy", "click", "stop", "judge", "costs", "rerank", "bm25", "retrieval_k",
                  "global_budget", "term_order", "max_normalized_idf"});
    VariantSpec spec;
    auto& s = spec.session;
    r.read(node, field, "name", s.name);
    if (s.name.empty() || s.name.find_first_of("@,/\\ \t\n") != std::string::npos) {
        r.fail(node["name"], Reader::join(field, "name"), "must be non-empty without '@', ',', '/' or spaces");
    }

    if (auto n = node["strategy"]; n.IsDefined()) {
        auto f = Reader::join(field, "strategy");
        r.checked(n, f, [&] { s.strategy = parse_strategy(r.get<std::string>(n, f)); });
    }

    if (auto n = node["click"]; n.IsDefined()) {
        auto f = Reader::join(field, "click");
        if (n.IsScalar()) {
            r.checked(n, f, [&] { s.click = ClickModel::preset(r.get<std::string>(n, f)); });
        } else {
            r.expect_map(n, f, {"name", "p_rel", "p_nrel"});
            ClickModel custom{"custom", 0.0, 0.0};
            r.read(n, f, "name", custom.name);
            if (!n["p_rel"].IsDefined() || !n["p_nrel"].IsDefined()) {
                r.fail(n, f, "custom click model needs p_rel and p_nrel");
            }
            r.read(n, f, "p_rel", custom.p_rel);
            r.read(n, f, "p_nrel", custom.p_nrel);
            s.click = custom;
        }
        r.checked(n, f, [&] { s.click.validate(); });
    }

    if (auto n = node["stop"]; n.IsDefined()) {
        auto f = Reader::join(field, "stop");
        r.expect_map(n, f, {"policy", "rpp", "tnr"});
        std::string policy = "static";
        r.read(n, f, "policy", policy);
        if (policy == "static") {
            StaticStop stop;
            r.read(n, f, "rpp", stop.rpp);
            s.stop = stop;
        } else if (policy == "dynamic") {
            DynamicStop stop;
            r.read(n, f, "tnr", stop.tnr);
            s.stop = stop;
        } else {
            r.fail(n["policy"], Reader::join(f, "policy"), "expected 'static' or 'dynamic'");
        }
        r.checked(n, f, [&] { validate(s.stop); });
    }

    if (auto n = node["judge"]; n.IsDefined()) {
        auto f = Reader::join(field, "judge");
        r.expect_map(n, f, {"model", "p_correct"});
        std::string model = "perfect";
        r.read(n, f, "model", model);
        if (model == "perfect") {
            s.judge = PerfectJudge{};
        } else if (model == "noisy") {
            NoisyJudge judge;
            r.read(n, f, "p_correct", judge.p_correct);
            s.judge = judge;
        } else {
            r.fail(n["model"], Reader::join(f, "model"), "expected 'perfect' or 'noisy'");
        }
        r.checked(n, f, [&] { validate(s.judge); });
    }

    if (auto n = node["costs"]; n.IsDefined()) {
        auto f = Reader::join(field, "costs");
        r.expect_map(n, f, {"query", "snippet", "read", "judge"});
        r.read(n, f, "query", s.costs.query);
        r.read(n, f, "snippet", s.costs.snippet);
        r.read(n, f, "read", s.costs.read);
        r.read(n, f, "judge", s.costs.judge);
        r.checked(n, f, [&] { s.costs.validate(); });
    }

    if (auto n = node["rerank"]; n.IsDefined()) {
        auto f = Reader::join(field, "rerank");
        r.expect_map(n, f, {"provider", "cutoff"});
        if (auto p = n["provider"]; p.IsDefined()) {
            spec.rerank = read_provider(r, p, Reader::join(f, "provider"), "identity");
        }
        r.read(n, f, "cutoff", s.rerank.cutoff);
    }

    if (auto n = node["bm25"]; n.IsDefined()) {
        auto f = Reader::join(field, "bm25");
        r.expect_map(n, f, {"k1", "b"});
        r.read(n, f, "k1", s.bm25.k1);
        r.read(n, f, "b", s.bm25.b);
        r.checked(n, f, [&] { s.bm25.validate(); });
    }

    r.read(node, field, "retrieval_k", s.retrieval_k);
    r.read(node, field, "global_budget", s.global_budget);
    r.read(node, field, "max_normalized_idf", s.max_normalized_idf);
    if (auto n = node["term_order"]; n.IsDefined()) {
        auto f = Reader::join(field, "term_order");
        auto order = r.get<std::string>(n, f);
        if (order == "fifo") {
            s.term_order = TermOrder::Fifo;
        } else if (order == "random") {
            s.term_order = TermOrder::SeededRandom;
        } else {
            r.fail(n, f, "expected 'fifo' or 'random'");
        }
    }
    r.checked(node, field, [&] { s.validate(); });
    return spec;
}

}  // namespace

ConfigError::ConfigError(std::string const& source, int line, std::string field, std::string const& message)
    : std::runtime_error(format_message(source, line, field, message)), line_(line), field_(std::move(field))
{}

auto ExperimentConfig::needs_sidecar() const -> bool
{
    bool d2q = doc2query == ProviderKind::Sidecar &&
               std::any_of(variants.begin(), variants.end(),
                           [](auto const& v) { return is_d2q_family(v.session.strategy); });
    return d2q || std::any_of(variants.begin(), variants.end(),
                              [](auto const& v) { return v.rerank == ProviderKind::Sidecar; });
}

auto parse_experiment_config(std::string const& text, std::string const& source,
                             std::filesystem::path const& base_dir) -> ExperimentConfig
{
    Reader r(source, base_dir);
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (YAML::ParserException const& e) {
        throw ConfigError(source, e.mark.line + 1, "", e.msg);
    }
    r.expect_map(root, "",
                 {"collection", "pools", "sidecar", "doc2query", "seeds", "metrics", "report", "output", "defaults",
                  "variants"});

    ExperimentConfig config;
    auto collection = root["collection"];
    if (!collection.IsDefined()) {
        r.fail(root, "collection", "missing section");
    }
    r.expect_map(collection, "collection", {"corpus", "topics", "qrels", "stopwords", "index"});
    for (auto const* key : {"corpus", "topics", "qrels"}) {
        if (!collection[key].IsDefined()) {
            r.fail(collection, Reader::join("collection", key), "required");
        }
    }
    r.read_path(collection, "collection", "corpus", config.corpus);
    r.read_path(collection, "collection", "topics", config.topics);
    r.read_path(collection, "collection", "qrels", config.qrels);
    r.read_path(collection, "collection", "stopwords", config.stopwords);
    r.read_path(collection, "collection", "index", config.index);

    if (auto n = root["pools"]; n.IsDefined()) {
        r.expect_map(n, "pools", {"directory", "rounds"});
        r.read_path(n, "pools", "directory", config.pool_directory);
        r.read(n, "pools", "rounds", config.pool_rounds);
        if (config.pool_rounds < 1) {
            r.fail(n["rounds"], "pools.rounds", "must be >= 1");
        }
    }

    if (auto n = root["sidecar"]; n.IsDefined()) {
        r.expect_map(n, "sidecar", {"url"});
        std::string url;
        r.read(n, "sidecar", "url", url);
        if (!url.empty()) {
            config.sidecar_url = url;
        }
    }

    if (auto n = root["doc2query"]; n.IsDefined()) {
        r.expect_map(n, "doc2query", {"provider", "n"});
        if (auto p = n["provider"]; p.IsDefined()) {
            config.doc2query = read_provider(r, p, "doc2query.provider", "builtin");
        }
        r.read(n, "doc2query", "n", config.doc2query_n);
        if (config.doc2query_n < 1 || config.doc2query_n > 20) {
            r.fail(n["n"], "doc2query.n", "must be in [1, 20]");
        }
    }

    if (auto n = root["seeds"]; n.IsDefined()) {
        if (!n.IsSequence() || n.size() == 0) {
            r.fail(n, "seeds", "expected a non-empty list");
        }
        config.seeds.clear();
        for (std::size_t i = 0; i < n.size(); ++i) {
            config.seeds.push_back(r.get<std::uint64_t>(n[i], "seeds[" + std::to_string(i) + "]"));
        }
    }

    if (auto n = root["metrics"]; n.IsDefined()) {
        r.expect_map(n, "metrics", {"bq", "p", "b", "gain", "depth"});
        r.read(n, "metrics", "bq", config.metrics.bq);
        r.read(n, "metrics", "p", config.metrics.p);
        r.read(n, "metrics", "b", config.metrics.b);
        if (auto g = n["gain"]; g.IsDefined()) {
            r.checked(g, "metrics.gain", [&] { config.metrics.gain = parse_gain_source(r.get<std::string>(g, "metrics.gain")); });
        }
        if (auto d = n["depth"]; d.IsDefined()) {
            r.checked(d, "metrics.depth", [&] { config.metrics.depth = parse_eval_depth(r.get<std::string>(d, "metrics.depth")); });
        }
        r.checked(n, "metrics", [&] { config.metrics.validate(); });
    }

    if (auto n = root["report"]; n.IsDefined()) {
        r.expect_map(n, "report", {"cost_step"});
        r.read(n, "report", "cost_step", config.report_cost_step);
        if (!(config.report_cost_step > 0.0)) {
            r.fail(n["cost_step"], "report.cost_step", "must be > 0");
        }
    }

    config.output = base_dir / config.output;
    r.read_path(root, "", "output", config.output);

    auto defaults = root["defaults"];
    if (defaults.IsDefined() && !defaults.IsMap()) {
        r.fail(defaults, "defaults", "expected a mapping");
    }
    auto variants = root["variants"];
    if (!variants.IsDefined()) {
        config.variants.push_back(read_variant(r, defaults.IsDefined() ? defaults : YAML::Node(YAML::NodeType::Map), "defaults"));
    } else {
        if (!variants.IsSequence() || variants.size() == 0) {
            r.fail(variants, "variants", "expected a non-empty list");
        }
        std::set<std::string> names;
        for (std::size_t i = 0; i < variants.size(); ++i) {
            auto field = "variants[" + std::to_string(i) + "]";
            if (!variants[i].IsMap()) {
                r.fail(variants[i], field, "expected a mapping");
            }
            auto spec = read_variant(r, merge(defaults, variants[i]), field);
            if (!variants[i]["name"].IsDefined()) {
                r.fail(variants[i], field + ".name", "required");
            }
            if (!names.insert(spec.session.name).second) {
                r.fail(variants[i]["name"], field + ".name", "duplicate variant name '" + spec.session.name + "'");
            }
            config.variants.push_back(std::move(spec));
        }
    }
    return config;
}

auto load_experiment_config(std::filesystem::path const& path) -> ExperimentConfig
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError(path.string(), 0, "", "cannot open config file");
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    auto base = path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path();
    return parse_experiment_config(buffer.str(), path.string(), base);
}

void check_paths(ExperimentConfig const& config, std::string const& source)
{
    auto require = [&](std::filesystem::path const& p, char const* field) {
        if (!p.empty() && !std::filesystem::exists(p)) {
            throw ConfigError(source, 0, field, "file not found: " + p.string());
        }
    };
    require(config.corpus, "collection.corpus");
    require(config.topics, "collection.topics");
    require(config.qrels, "collection.qrels");
    require(config.stopwords, "collection.stopwords");
}

auto run_id(std::string const& variant, std::uint64_t seed) -> std::string
{
    return variant + "@" + std::to_string(seed);
}

auto variant_of(std::string const& run_id) -> std::string
{
    return run_id.substr(0, run_id.rfind('@'));
}

}  // namespace sessim
