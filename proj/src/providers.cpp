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

#include "sessim/providers.hpp"

#include <cmath>
#include <cstdlib>

namespace sessim {

using nlohmann::json;

namespace {

constexpr int kMaxD2QQueries = 20;

auto require_env(char const* name) -> std::string
{
    char const* value = std::getenv(name);
    if (value == nullptr || *value == '\0') {
        throw std::runtime_error(std::string("environment variable ") + name + " is not set");
    }
    return value;
}

}  // namespace

SidecarClient::SidecarClient(std::string base_url, RetryPolicy retry, std::chrono::seconds timeout)
    : http_(std::move(base_url), timeout), retry_(std::move(retry))
{}

auto SidecarClient::health() const -> SidecarHealth
{
    auto body = http_.get("/health");
    SidecarHealth health;
    if (!body.is_object() || !body.contains("ready") || !body["ready"].is_boolean()) {
        throw ProviderError("sidecar /health: response lacks boolean 'ready'");
    }
    health.ready = body["ready"].get<bool>();
    if (auto it = body.find("models"); it != body.end() && it->is_object()) {
        for (auto const& [role, name] : it->items()) {
            health.models[role] = name.is_string() ? name.get<std::string>() : name.dump();
        }
    }
    if (!health.ready) {
        throw TransientProviderError("sidecar /health: not ready");
    }
    return health;
}

auto SidecarClient::wait_until_ready() const -> SidecarHealth
{
    return with_retry(retry_, [&] { return health(); });
}

auto SidecarClient::doc2query(std::string const& text, int n) const -> std::vector<std::string>
{
    if (n < 1 || n > kMaxD2QQueries) {
        throw std::invalid_argument("doc2query n must be in [1, 20]");
    }
    if (text.empty()) {
        return {};
    }
    auto body = with_retry(retry_, [&] { return http_.post("/doc2query", json{{"text", text}, {"n", n}}); });
    if (!body.is_object() || !body.contains("queries") || !body["queries"].is_array()) {
        throw ProviderError("sidecar /doc2query: response lacks array 'queries'");
    }
    std::vector<std::string> queries;
    for (auto const& q : body["queries"]) {
        if (!q.is_string()) {
            throw ProviderError("sidecar /doc2query: non-string query");
        }
        if (auto s = q.get<std::string>(); !s.empty()) {
            queries.push_back(std::move(s));
        }
    }
    if (queries.size() > static_cast<std::size_t>(n)) {
        throw ProviderError("sidecar /doc2query: returned more than n queries");
    }
    return queries;
}

auto SidecarClient::rerank(std::string const& query, std::span<RerankDoc const> docs) const -> std::vector<double>
{
    if (docs.empty()) {
        return {};
    }
    json payload_docs = json::array();
    for (auto const& doc : docs) {
        payload_docs.push_back(json{{"id", doc.id}, {"text", doc.text}});
    }
    json payload{{"query", query}, {"docs", std::move(payload_docs)}};
    auto body = with_retry(retry_, [&] { return http_.post("/rerank", payload); });
    if (!body.is_object() || !body.contains("scores") || !body["scores"].is_array()) {
        throw ProviderError("sidecar /rerank: response lacks array 'scores'");
    }
    auto const& raw = body["scores"];
    if (raw.size() != docs.size()) {
        throw ProviderError("sidecar /rerank: " + std::to_string(raw.size()) + " scores for " +
                            std::to_string(docs.size()) + " documents");
    }
    std::vector<double> scores;
    scores.reserve(raw.size());
    for (auto const& s : raw) {
        if (!s.is_number() || !std::isfinite(s.get<double>())) {
            throw ProviderError("sidecar /rerank: non-finite score");
        }
        scores.push_back(s.get<double>());
    }
    return scores;
}

auto HttpRerankProvider::score(std::string const& query, std::span<RerankDoc const> docs) -> std::vector<double>
{
    return client_->rerank(query, docs);
}

auto HttpRerankProvider::describe() const -> std::string
{
    return "http:" + client_->base_url();
}

HttpD2QProvider::HttpD2QProvider(std::shared_ptr<SidecarClient const> client, int n) : client_(std::move(client)), n_(n)
{
    if (n < 1 || n > kMaxD2QQueries) {
        throw std::invalid_argument("doc2query n must be in [1, 20]");
    }
}

auto HttpD2QProvider::generate(Document const& doc) -> std::vector<std::string>
{
    {
        std::lock_guard lock(mutex_);
        if (auto it = cache_.find(doc.doc_id); it != cache_.end()) {
            return it->second;
        }
    }
    auto queries = client_->doc2query(doc.text, n_);
    std::lock_guard lock(mutex_);
    return cache_.emplace(doc.doc_id, std::move(queries)).first->second;
}

auto HttpD2QProvider::describe() const -> std::string
{
    return "http:" + client_->base_url() + ":n=" + std::to_string(n_);
}

OpenAiChatClient::OpenAiChatClient(std::string base_url, std::string api_key, std::string model, RetryPolicy retry,
                                   std::chrono::seconds timeout)
    : http_(std::move(base_url), timeout, {{"Authorization", "Bearer " + api_key}}),
      model_(std::move(model)),
      retry_(std::move(retry))
{}

auto OpenAiChatClient::from_env() -> OpenAiChatClient
{
    auto base = require_env("API_BASE_URL");
    auto key = require_env("API_KEY");
    auto model = require_env("API_MODEL");
    return OpenAiChatClient(std::move(base), std::move(key), std::move(model));
}

auto OpenAiChatClient::complete(std::string const& prompt) -> std::string
{
    json payload{{"model", model_}, {"messages", json::array({json{{"role", "user"}, {"content", prompt}}})}};
    auto body = with_retry(retry_, [&] { return http_.post("/chat/completions", payload); });
    try {
        return body.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (json::exception const& e) {
        throw ProviderError(std::string("chat completion: unexpected response shape: ") + e.what());
    }
}

}  // namespace sessim
