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

#include <chrono>
#include <functional>
#include <memory>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "sessim/provider.hpp"

namespace sessim {

/// Capped exponential backoff: delay_n = min(initial * 2^n, cap).
struct RetryPolicy {
    int max_attempts = 5;
    std::chrono::milliseconds initial_delay{500};
    std::chrono::milliseconds max_delay{8000};
    /// Replaceable for tests.
    std::function<void(std::chrono::milliseconds)> sleep;

    [[nodiscard]] auto delay(int attempt) const -> std::chrono::milliseconds;
};

/// Runs `call`, retrying on TransientProviderError per `policy`. The last
/// transient error is rethrown as a plain ProviderError once attempts run out.
template <typename Fn>
auto with_retry(RetryPolicy const& policy, Fn&& call) -> decltype(call())
{
    for (int attempt = 0;; ++attempt) {
        try {
            return call();
        } catch (TransientProviderError const& e) {
            if (attempt + 1 >= policy.max_attempts) {
                throw ProviderError(std::string(e.what()) + " (gave up after " +
                                    std::to_string(attempt + 1) + " attempts)");
            }
            auto wait = policy.delay(attempt);
            if (policy.sleep) {
                policy.sleep(wait);
            } else {
                std::this_thread::sleep_for(wait);
            }
        }
    }
}

/// Minimal JSON-over-HTTP client for one base URL such as
/// "http://localhost:8000" or "https://api.example.com/v1".
/// Transport failures, 429 and 5xx map to TransientProviderError; other
/// non-2xx statuses and unparsable bodies map to ProviderError.
class JsonHttpClient {
  public:
    explicit JsonHttpClient(std::string base_url,
                            std::chrono::seconds timeout = std::chrono::seconds(60),
                            std::vector<std::pair<std::string, std::string>> headers = {});
    ~JsonHttpClient();
    JsonHttpClient(JsonHttpClient&&) noexcept;
    auto operator=(JsonHttpClient&&) noexcept -> JsonHttpClient&;

    [[nodiscard]] auto base_url() const -> std::string const& { return base_url_; }

    auto post(std::string const& path, nlohmann::json const& body) const -> nlohmann::json;
    auto get(std::string const& path) const -> nlohmann::json;

  private:
    struct Impl;
    std::string base_url_;
    std::unique_ptr<Impl> impl_;
};

}  // namespace sessim
