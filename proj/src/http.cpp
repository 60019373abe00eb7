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

#include <httplib.h>

#include "sessim/http.hpp"

#include <algorithm>

namespace sessim {

auto RetryPolicy::delay(int attempt) const -> std::chrono::milliseconds
{
    auto d = initial_delay;
    for (int i = 0; i < attempt && d < max_delay; ++i) {
        d *= 2;
    }
    return std::min(d, max_delay);
}

struct JsonHttpClient::Impl {
    std::string origin;     // scheme://host[:port]
    std::string base_path;  // "" or "/v1"
    std::chrono::seconds timeout;
    httplib::Headers headers;

    [[nodiscard]] auto client() const -> httplib::Client
    {
        httplib::Client cli(origin);
        cli.set_connection_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout).count(), 0);
        cli.set_read_timeout(timeout.count(), 0);
        cli.set_write_timeout(timeout.count(), 0);
        return cli;
    }

    [[nodiscard]] auto handle(httplib::Result const& res, std::string const& what) const -> nlohmann::json
    {
        if (!res) {
            throw TransientProviderError(what + ": transport error: " + httplib::to_string(res.error()));
        }
        auto status = res->status;
        if (status == 429 || status >= 500) {
            throw TransientProviderError(what + ": HTTP " + std::to_string(status));
        }
        if (status < 200 || status >= 300) {
            throw ProviderError(what + ": HTTP " + std::to_string(status) + ": " + res->body.substr(0, 200));
        }
        try {
            return nlohmann::json::parse(res->body);
        } catch (nlohmann::json::parse_error const& e) {
            throw ProviderError(what + ": malformed JSON response: " + e.what());
        }
    }
};

JsonHttpClient::JsonHttpClient(std::string base_url,
                               std::chrono::seconds timeout,
                               std::vector<std::pair<std::string, std::string>> headers)
    : base_url_(std::move(base_url)), impl_(std::make_unique<Impl>())
{
    while (!base_url_.empty() && base_url_.back() == '/') {
        base_url_.pop_back();
    }
    auto scheme_end = base_url_.find("://");
    if (scheme_end == std::string::npos) {
        throw std::invalid_argument("URL must start with http:// or https://: '" + base_url_ + "'");
    }
    auto scheme = base_url_.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https") {
        throw std::invalid_argument("unsupported URL scheme '" + scheme + "'");
    }
    auto path_start = base_url_.find('/', scheme_end + 3);
    impl_->origin = base_url_.substr(0, path_start);
    impl_->base_path = path_start == std::string::npos ? std::string{} : base_url_.substr(path_start);
    impl_->timeout = timeout;
    for (auto& [key, value] : headers) {
        impl_->headers.emplace(std::move(key), std::move(value));
    }
}

JsonHttpClient::~JsonHttpClient() = default;
JsonHttpClient::JsonHttpClient(JsonHttpClient&&) noexcept = default;
auto JsonHttpClient::operator=(JsonHttpClient&&) noexcept -> JsonHttpClient& = default;

auto JsonHttpClient::post(std::string const& path, nlohmann::json const& body) const -> nlohmann::json
{
    auto cli = impl_->client();
    auto full = impl_->base_path + path;
    auto res = cli.Post(full, impl_->headers, body.dump(), "application/json");
    return impl_->handle(res, "POST " + base_url_ + path);
}

auto JsonHttpClient::get(std::string const& path) const -> nlohmann::json
{
    auto cli = impl_->client();
    auto full = impl_->base_path + path;
    auto res = cli.Get(full, impl_->headers);
    return impl_->handle(res, "GET " + base_url_ + path);
}

}  // namespace sessim
