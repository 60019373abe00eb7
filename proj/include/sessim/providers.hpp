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

#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "sessim/http.hpp"
#include "sessim/querygen.hpp"
#include "sessim/retrieval.hpp"

namespace sessim {

/// Readiness report of the neural sidecar.
struct SidecarHealth {
    bool ready = false;
    /// Model identifiers by role, e.g. {"doc2query": "...", "rerank": "..."}.
    std::map<std::string, std::string> models;
};

/// Client of the neural sidecar: GET /health, POST /doc2query, POST /rerank.
class SidecarClient {
  public:
    explicit SidecarClient(std::string base_url, RetryPolicy retry = {},
                           std::chrono::seconds timeout = std::chrono::seconds(60));

    /// One GET /health. Throws TransientProviderError when the service reports
    /// it is not ready, so that callers can wrap it in with_retry().
    [[nodiscard]] auto health() const -> SidecarHealth;
    /// Polls /health per the retry policy until the service is ready.
    auto wait_until_ready() const -> SidecarHealth;

    /// Up to `n` questions for `text` (1 <= n <= 20). Empty text yields no
    /// questions without contacting the service.
    [[nodiscard]] auto doc2query(std::string const& text, int n) const -> std::vector<std::string>;
    /// One score per document, positionally aligned.
    [[nodiscard]] auto rerank(std::string const& query, std::span<RerankDoc const> docs) const
        -> std::vector<double>;

    [[nodiscard]] auto base_url() const -> std::string const& { return http_.base_url(); }
    [[nodiscard]] auto retry_policy() const -> RetryPolicy const& { return retry_; }

  private:
    JsonHttpClient http_;
    RetryPolicy retry_;
};

class HttpRerankProvider final : public RerankProvider {
  public:
    explicit HttpRerankProvider(std::shared_ptr<SidecarClient const> client) : client_(std::move(client)) {}

    auto score(std::string const& query, std::span<RerankDoc const> docs) -> std::vector<double> override;
    [[nodiscard]] auto describe() const -> std::string override;

  private:
    std::shared_ptr<SidecarClient const> client_;
};

/// Doc2Query through the sidecar. Responses are cached per document id, so a
/// document is sent at most once per provider.
class HttpD2QProvider final : public D2QProvider {
  public:
    HttpD2QProvider(std::shared_ptr<SidecarClient const> client, int n = 5);

    auto generate(Document const& doc) -> std::vector<std::string> override;
    [[nodiscard]] auto describe() const -> std::string override;

  private:
    std::shared_ptr<SidecarClient const> client_;
    int n_;
    std::mutex mutex_;
    std::map<std::string, std::vector<std::string>> cache_;
};

/// OpenAI-compatible chat completions: POST {base}/chat/completions with a
/// bearer token, returning choices[0].message.content.
class OpenAiChatClient final : public ChatClient {
  public:
    OpenAiChatClient(std::string base_url, std::string api_key, std::string model, RetryPolicy retry = {},
                     std::chrono::seconds timeout = std::chrono::seconds(120));

    /// Reads API_BASE_URL, API_KEY and API_MODEL. Throws std::runtime_error
    /// naming the first missing variable.
    [[nodiscard]] static auto from_env() -> OpenAiChatClient;

    auto complete(std::string const& prompt) -> std::string override;

    [[nodiscard]] auto model() const -> std::string const& { return model_; }

  private:
    JsonHttpClient http_;
    std::string model_;
    RetryPolicy retry_;
};

}  // namespace sessim
