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

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "sessim/collection.hpp"

namespace sessim::test {

inline auto source_dir() -> std::filesystem::path
{
    return SESSIM_SOURCE_DIR;
}

inline auto synthetic_dir() -> std::filesystem::path
{
    return source_dir() / "data" / "synthetic";
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
  public:
    explicit TempDir(std::string const& name)
        : path_(std::filesystem::temp_directory_path() / ("sessim-test-" + name + "-" + std::to_string(::getpid())))
    {
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }
    TempDir(TempDir const&) = delete;
    auto operator=(TempDir const&) -> TempDir& = delete;

    [[nodiscard]] auto path() const -> std::filesystem::path const& { return path_; }

  private:
    std::filesystem::path path_;
};

inline void write_file(std::filesystem::path const& path, std::string const& text)
{
    std::ofstream(path, std::ios::binary) << text;
}

inline auto read_file(std::filesystem::path const& path) -> std::string
{
    std::ifstream in(path, std::ios::binary);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

/// Documents d00..d{n-1} of random words from a small vocabulary, so that
/// terms repeat and document lengths vary.
inline auto random_corpus(std::size_t n, std::uint32_t seed) -> Corpus
{
    static std::vector<std::string> const words{"alpha", "bravo", "charlie", "delta", "echo", "foxtrot",
                                                "golf",  "hotel", "india",   "juliet", "kilo", "lima"};
    std::mt19937 gen(seed);
    std::uniform_int_distribution<std::size_t> length(1, 15);
    std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1);
    std::vector<Document> docs;
    for (std::size_t i = 0; i < n; ++i) {
        std::string text;
        auto len = length(gen);
        for (std::size_t j = 0; j < len; ++j) {
            text += words[pick(gen)] + " ";
        }
        docs.push_back({"d" + std::string(i < 10 ? "0" : "") + std::to_string(i), text});
    }
    return Corpus(std::move(docs));
}

}  // namespace sessim::test
