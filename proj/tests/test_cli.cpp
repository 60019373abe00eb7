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

#include <catch_amalgamated.hpp>

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <map>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "sessim/cli.hpp"
#include "sessim/metrics.hpp"
#include "sessim/session.hpp"
#include "test_support.hpp"

using namespace sessim;
namespace fs = std::filesystem;

namespace {

auto cli(std::vector<std::string> args) -> int
{
    return run_cli(args);
}

/// Config over the bundled synthetic collection with two click models.
auto write_config(fs::path const& dir, std::string const& extra = "") -> fs::path
{
    auto data = test::synthetic_dir();
    std::string text = "collection:\n"
                       "  corpus: " + (data / "corpus.jsonl").string() + "\n"
                       "  topics: " + (data / "topics.jsonl").string() + "\n"
                       "  qrels: " + (data / "qrels.txt").string() + "\n"
                       "pools:\n"
                       "  directory: " + (data / "pools").string() + "\n"
                       "seeds: [1, 2]\n"
                       "output: out\n" +
                       extra;
    if (extra.find("variants:") == std::string::npos) {
        text += "variants:\n"
                "  - name: perfect\n"
                "    click: perfect\n"
                "  - name: dynamic\n"
                "    click: almost_random\n"
                "    stop: {policy: dynamic, tnr: 50}\n";
    }
    auto path = dir / "exp.yaml";
    test::write_file(path, text);
    return path;
}

/// Every file below `root` except metadata.json, keyed by relative path.
auto snapshot(fs::path const& root) -> std::map<std::string, std::string>
{
    std::map<std::string, std::string> files;
    for (auto const& entry : fs::recursive_directory_iterator(root)) {
        if (entry.is_regular_file() && entry.path().filename() != "metadata.json") {
            files[fs::relative(entry.path(), root).string()] = test::read_file(entry.path());
        }
    }
    return files;
}

auto run_pipeline(fs::path const& config, fs::path const& out, std::string const& parallel) -> void
{
    REQUIRE(cli({"simulate", "--config", config.string(), "--out", out.string(), "--parallel", parallel}) == 0);
    REQUIRE(cli({"evaluate", "--config", config.string(), "--out", out.string()}) == 0);
    REQUIRE(cli({"report", "--config", config.string(), "--out", out.string()}) == 0);
}

}  // namespace

TEST_CASE("usage errors exit with 2")
{
    REQUIRE(cli({}) == kExitUsage);
    REQUIRE(cli({"fly"}) == kExitUsage);
    REQUIRE(cli({"simulate"}) == kExitUsage);
    REQUIRE(cli({"simulate", "--config", "x.yaml", "--parallel", "0"}) == kExitUsage);

    test::TempDir dir("cli-usage");
    REQUIRE(cli({"simulate", "--config", (dir.path() / "missing.yaml").string()}) == kExitUsage);
    test::write_file(dir.path() / "bad.yaml", "collection: {corpus: a, topics: b, qrels: c}\nbogus: 1\n");
    REQUIRE(cli({"simulate", "--config", (dir.path() / "bad.yaml").string()}) == kExitUsage);
    test::write_file(dir.path() / "nofiles.yaml", "collection: {corpus: a, topics: b, qrels: c}\n");
    REQUIRE(cli({"index", "--config", (dir.path() / "nofiles.yaml").string()}) == kExitUsage);
}

TEST_CASE("a sidecar variant without a sidecar URL is a configuration error")
{
    test::TempDir dir("cli-nosidecar");
    ::unsetenv("SIDECAR_URL");
    auto config = write_config(dir.path(), "variants:\n  - name: ce\n    rerank: {provider: sidecar, cutoff: 5}\n");
    REQUIRE(cli({"simulate", "--config", config.string()}) == kExitUsage);
}

TEST_CASE("simulate, evaluate and report end to end")
{
    test::TempDir dir("cli-e2e");
    auto config = write_config(dir.path());
    auto out = dir.path() / "out";

    REQUIRE(cli({"index", "--config", config.string()}) == 0);
    REQUIRE(fs::exists(out / "index.txt"));
    run_pipeline(config, out, "4");

    auto logs = out / "logs";
    REQUIRE(fs::exists(logs / "perfect@1" / "1.jsonl"));
    REQUIRE(fs::exists(logs / "dynamic@2" / "5.jsonl"));
    REQUIRE_FALSE(fs::exists(out / "failures.json"));
    auto log = load_session_log(logs / "perfect@1" / "3.jsonl");
    REQUIRE(log.run_id == "perfect@1");
    REQUIRE(log.topic_id == "3");
    REQUIRE_NOTHROW(validate_log(log));

    std::ifstream curves_in(out / "eval" / "curves.csv");
    auto curves = parse_curve_csv(curves_in);
    std::set<std::string> measures;
    std::set<std::string> runs;
    for (auto const& row : curves) {
        measures.insert(row.measure);
        runs.insert(row.run_id);
    }
    REQUIRE(measures == std::set<std::string>{"effect", "sdcg_query", "sdcg_cost", "srbp_query", "srbp_cost"});
    REQUIRE(runs == std::set<std::string>{"perfect@1", "perfect@2", "dynamic@1", "dynamic@2"});

    for (auto const* name : {"totals.csv", "adhoc.csv"}) {
        std::ifstream in(out / "eval" / name);
        REQUIRE_FALSE(parse_curve_csv(in).empty());
    }
    for (auto const* name : {"mean_curves.csv", "finals.csv", "snippets.csv"}) {
        std::ifstream in(out / "report" / name);
        REQUIRE_FALSE(parse_curve_csv(in).empty());
    }

    std::ifstream snippets_in(out / "report" / "snippets.csv");
    for (auto const& row : parse_curve_csv(snippets_in)) {
        if (row.run_id == "perfect" && row.measure == "snippets_std") {
            REQUIRE(row.y == 0.0);
        }
    }

    auto metadata = nlohmann::json::parse(test::read_file(out / "metadata.json"));
    for (auto const* command : {"index", "simulate", "evaluate", "report"}) {
        REQUIRE(metadata.contains(command));
        REQUIRE(metadata[command].contains("started_at"));
    }
}

TEST_CASE("outputs are byte-identical across reruns and thread counts")
{
    test::TempDir dir("cli-determinism");
    auto config = write_config(dir.path());
    run_pipeline(config, dir.path() / "a", "1");
    run_pipeline(config, dir.path() / "b", "8");
    run_pipeline(config, dir.path() / "c", "8");
    auto a = snapshot(dir.path() / "a");
    REQUIRE(a.size() > 20);
    REQUIRE(a == snapshot(dir.path() / "b"));
    REQUIRE(a == snapshot(dir.path() / "c"));
}

TEST_CASE("failed sessions are reported and give exit code 1")
{
    test::TempDir dir("cli-failures");
    // Pools for topic 1 only.
    fs::create_directories(dir.path() / "pools");
    std::ofstream(dir.path() / "pools" / "gpt.jsonl") << "{\"topic_id\": \"1\", \"rank\": 1, \"query\": \"coral\"}\n";
    auto config = write_config(dir.path(), "variants:\n  - name: base\n");
    auto text = test::read_file(config);
    auto pos = text.find((test::synthetic_dir() / "pools").string());
    text.replace(pos, (test::synthetic_dir() / "pools").string().size(), (dir.path() / "pools").string());
    test::write_file(config, text);

    REQUIRE(cli({"simulate", "--config", config.string(), "--seed", "7"}) == kExitPartialFailure);
    auto out = dir.path() / "out";
    REQUIRE(fs::exists(out / "logs" / "base@7" / "1.jsonl"));
    REQUIRE_FALSE(fs::exists(out / "logs" / "base@7" / "2.jsonl"));
    auto failures = nlohmann::json::parse(test::read_file(out / "failures.json"));
    REQUIRE(failures.is_array());
    REQUIRE(failures.size() == 4);
}

TEST_CASE("sidecar reranking through the command line")
{
    httplib::Server server;
    std::atomic<int> rerank_calls{0};
    server.Get("/health", [](auto const&, httplib::Response& res) {
        res.set_content(R"({"ready": true, "models": {"rerank": "mock"}})", "application/json");
    });
    server.Post("/rerank", [&](httplib::Request const& req, httplib::Response& res) {
        ++rerank_calls;
        auto body = nlohmann::json::parse(req.body);
        nlohmann::json scores = nlohmann::json::array();
        for (auto const& doc : body["docs"]) {
            scores.push_back(static_cast<double>(doc["text"].get<std::string>().size()));
        }
        res.set_content(nlohmann::json{{"scores", scores}}.dump(), "application/json");
    });
    int port = server.bind_to_any_port("127.0.0.1");
    std::thread thread([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    test::TempDir dir("cli-sidecar");
    auto config = write_config(dir.path(), "variants:\n  - name: ce\n    rerank: {provider: sidecar, cutoff: 5}\n");
    ::setenv("SIDECAR_URL", ("http://127.0.0.1:" + std::to_string(port)).c_str(), 1);
    auto status = cli({"simulate", "--config", config.string(), "--seed", "1"});
    ::unsetenv("SIDECAR_URL");
    server.stop();
    thread.join();

    REQUIRE(status == 0);
    REQUIRE(rerank_calls > 0);
    auto log = load_session_log(dir.path() / "out" / "logs" / "ce@1" / "1.jsonl");
    REQUIRE(log.config_json.find("http://127.0.0.1") != std::string::npos);
}
