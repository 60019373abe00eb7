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
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "sessim/http.hpp"
#include "sessim/providers.hpp"
#include "sessim/retrieval.hpp"

using namespace sessim;
using nlohmann::json;

namespace {

/// httplib server on an ephemeral localhost port, running on its own thread.
class MockServer {
  public:
    MockServer()
    {
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~MockServer()
    {
        server_.stop();
        thread_.join();
    }
    MockServer(MockServer const&) = delete;
    auto operator=(MockServer const&) -> MockServer& = delete;

    [[nodiscard]] auto url() const -> std::string { return "http://127.0.0.1:" + std::to_string(port_); }
    auto server() -> httplib::Server& { return server_; }

  private:
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
};

auto no_wait_retry(int attempts = 3) -> RetryPolicy
{
    RetryPolicy policy;
    policy.max_attempts = attempts;
    policy.sleep = [](std::chrono::milliseconds) {};
    return policy;
}

void reply(httplib::Response& res, json const& body, int status = 200)
{
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

}  // namespace

TEST_CASE("retry policy doubles up to the cap")
{
    RetryPolicy policy;
    REQUIRE(policy.delay(0) == std::chrono::milliseconds(500));
    REQUIRE(policy.delay(1) == std::chrono::milliseconds(1000));
    REQUIRE(policy.delay(4) == std::chrono::milliseconds(8000));
    REQUIRE(policy.delay(10) == std::chrono::milliseconds(8000));
}

TEST_CASE("with_retry retries transient errors only")
{
    std::vector<std::chrono::milliseconds> waits;
    RetryPolicy policy;
    policy.max_attempts = 4;
    policy.sleep = [&](std::chrono::milliseconds d) { waits.push_back(d); };

    int calls = 0;
    auto value = with_retry(policy, [&] {
        if (++calls < 3) {
            throw TransientProviderError("busy");
        }
        return 7;
    });
    REQUIRE(value == 7);
    REQUIRE(calls == 3);
    REQUIRE(waits == std::vector<std::chrono::milliseconds>{std::chrono::milliseconds(500),
                                                             std::chrono::milliseconds(1000)});

    calls = 0;
    REQUIRE_THROWS_WITH(with_retry(policy, [&]() -> int {
                            ++calls;
                            throw TransientProviderError("down");
                        }),
                        Catch::Matchers::ContainsSubstring("gave up after 4 attempts"));
    REQUIRE(calls == 4);

    calls = 0;
    REQUIRE_THROWS_AS(with_retry(policy, [&]() -> int {
                          ++calls;
                          throw ProviderError("bad request");
                      }),
                      ProviderError);
    REQUIRE(calls == 1);
}

TEST_CASE("JsonHttpClient URL handling")
{
    REQUIRE_THROWS_AS(JsonHttpClient("localhost:8000"), std::invalid_argument);
    REQUIRE_THROWS_AS(JsonHttpClient("ftp://host"), std::invalid_argument);
    REQUIRE(JsonHttpClient("http://host:1/v1/").base_url() == "http://host:1/v1");
}

TEST_CASE("JsonHttpClient status mapping")
{
    MockServer mock;
    mock.server().Get("/v1/ok", [](auto const&, auto& res) { reply(res, {{"a", 1}}); });
    mock.server().Get("/v1/busy", [](auto const&, auto& res) { reply(res, {{"error", "x"}}, 503); });
    mock.server().Get("/v1/limited", [](auto const&, auto& res) { reply(res, {{"error", "x"}}, 429); });
    mock.server().Get("/v1/bad", [](auto const&, auto& res) { reply(res, {{"error", "x"}}, 400); });
    mock.server().Get("/v1/garbage", [](auto const&, auto& res) { res.set_content("<html>", "text/html"); });

    JsonHttpClient client(mock.url() + "/v1", std::chrono::seconds(5));
    REQUIRE(client.get("/ok") == json{{"a", 1}});
    REQUIRE_THROWS_AS(client.get("/busy"), TransientProviderError);
    REQUIRE_THROWS_AS(client.get("/limited"), TransientProviderError);
    try {
        (void)client.get("/bad");
        FAIL("expected ProviderError");
    } catch (TransientProviderError const&) {
        FAIL("400 must not be retryable");
    } catch (ProviderError const&) {
    }
    REQUIRE_THROWS_AS(client.get("/garbage"), ProviderError);

    JsonHttpClient unreachable("http://127.0.0.1:1", std::chrono::seconds(1));
    REQUIRE_THROWS_AS(unreachable.get("/ok"), TransientProviderError);
}

TEST_CASE("sidecar rerank client")
{
    MockServer mock;
    json last_request;
    mock.server().Post("/rerank", [&](httplib::Request const& req, httplib::Response& res) {
        last_request = json::parse(req.body);
        json scores = json::array();
        for (auto const& doc : last_request["docs"]) {
            scores.push_back(doc["text"].get<std::string>().size());
        }
        reply(res, {{"scores", scores}});
    });
    auto client = std::make_shared<SidecarClient>(mock.url(), no_wait_retry());

    std::vector<RerankDoc> docs{{"a", "x"}, {"b", "xyz"}, {"c", "xy"}};
    auto scores = client->rerank("query", docs);
    REQUIRE(scores == std::vector<double>{1.0, 3.0, 2.0});
    REQUIRE(last_request["query"] == "query");
    REQUIRE(last_request["docs"][1] == json{{"id", "b"}, {"text", "xyz"}});
    REQUIRE(client->rerank("q", {}).empty());

    SECTION("end to end through rerank() with cutoff 2")
    {
        Corpus corpus({{"a", "x"}, {"b", "xyz"}, {"c", "xyzw"}});
        RankedList ranked{"q", {{"a", 3.0}, {"b", 2.0}, {"c", 1.0}}};
        auto out = rerank(ranked, RerankConfig{2, std::make_shared<HttpRerankProvider>(client)}, corpus);
        REQUIRE(out.items[0].doc_id == "b");
        REQUIRE(out.items[1].doc_id == "a");
        REQUIRE(out.items[2] == ranked.items[2]);
    }
}

TEST_CASE("sidecar rerank rejects misaligned responses")
{
    MockServer mock;
    mock.server().Post("/rerank", [](auto const&, auto& res) { reply(res, {{"scores", {1.0}}}); });
    SidecarClient client(mock.url(), no_wait_retry());
    std::vector<RerankDoc> docs{{"a", "x"}, {"b", "y"}};
    REQUIRE_THROWS_WITH(client.rerank("q", docs), Catch::Matchers::ContainsSubstring("1 scores for 2"));
}

TEST_CASE("sidecar doc2query client")
{
    MockServer mock;
    std::atomic<int> calls{0};
    mock.server().Post("/doc2query", [&](httplib::Request const& req, httplib::Response& res) {
        ++calls;
        auto body = json::parse(req.body);
        json queries = json::array();
        for (int i = 0; i < body["n"].get<int>(); ++i) {
            queries.push_back("what is " + body["text"].get<std::string>() + " " + std::to_string(i));
        }
        reply(res, {{"queries", queries}, {"model", "mock"}});
    });
    auto client = std::make_shared<SidecarClient>(mock.url(), no_wait_retry());
    REQUIRE(client->doc2query("coral", 2) == std::vector<std::string>{"what is coral 0", "what is coral 1"});
    REQUIRE(client->doc2query("", 2).empty());
    REQUIRE(calls == 1);
    REQUIRE_THROWS_AS(client->doc2query("x", 0), std::invalid_argument);
    REQUIRE_THROWS_AS(client->doc2query("x", 21), std::invalid_argument);

    HttpD2QProvider provider(client, 3);
    Document doc{"d1", "reef"};
    auto first = provider.generate(doc);
    auto second = provider.generate(doc);
    REQUIRE(first.size() == 3);
    REQUIRE(first == second);
    REQUIRE(calls == 2);
}

TEST_CASE("sidecar health: not ready is retried until ready")
{
    MockServer mock;
    std::atomic<int> polls{0};
    mock.server().Get("/health", [&](auto const&, auto& res) {
        bool ready = ++polls >= 3;
        reply(res, {{"ready", ready}, {"models", {{"rerank", "mini-ce"}, {"doc2query", "t5"}}}});
    });
    SidecarClient client(mock.url(), no_wait_retry(5));
    REQUIRE_THROWS_AS(client.health(), TransientProviderError);
    auto health = client.wait_until_ready();
    REQUIRE(health.ready);
    REQUIRE(health.models.at("rerank") == "mini-ce");
    REQUIRE(polls == 3);
}

TEST_CASE("sidecar health gives up when the service never becomes ready")
{
    MockServer mock;
    mock.server().Get("/health", [](auto const&, auto& res) { reply(res, {{"error", "loading"}}, 503); });
    SidecarClient client(mock.url(), no_wait_retry(2));
    REQUIRE_THROWS_WITH(client.wait_until_ready(), Catch::Matchers::ContainsSubstring("gave up after 2 attempts"));
}

TEST_CASE("OpenAI-compatible chat client")
{
    MockServer mock;
    json last_request;
    std::string auth;
    std::atomic<int> calls{0};
    mock.server().Post("/v1/chat/completions", [&](httplib::Request const& req, httplib::Response& res) {
        if (++calls == 1) {
            reply(res, {{"error", "rate limited"}}, 429);
            return;
        }
        last_request = json::parse(req.body);
        auth = req.get_header_value("Authorization");
        reply(res, {{"choices", {{{"message", {{"role", "assistant"}, {"content", "1. coral\n2. reef"}}}}}}});
    });
    OpenAiChatClient client(mock.url() + "/v1", "secret", "test-model", no_wait_retry());
    REQUIRE(client.complete("hello") == "1. coral\n2. reef");
    REQUIRE(calls == 2);
    REQUIRE(auth == "Bearer secret");
    REQUIRE(last_request["model"] == "test-model");
    REQUIRE(last_request["messages"][0] == json{{"role", "user"}, {"content", "hello"}});
}

TEST_CASE("chat client configuration comes from the environment")
{
    ::unsetenv("API_BASE_URL");
    ::setenv("API_KEY", "k", 1);
    ::setenv("API_MODEL", "m", 1);
    REQUIRE_THROWS_WITH(OpenAiChatClient::from_env(), Catch::Matchers::ContainsSubstring("API_BASE_URL"));
    ::setenv("API_BASE_URL", "http://127.0.0.1:1", 1);
    REQUIRE(OpenAiChatClient::from_env().model() == "m");
    ::unsetenv("API_BASE_URL");
    ::unsetenv("API_KEY");
    ::unsetenv("API_MODEL");
}
