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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sessim/metrics.hpp"
#include "sessim/session.hpp"

namespace sessim {

/// Invalid experiment configuration, pointing at the offending field.
class ConfigError : public std::runtime_error {
  public:
    ConfigError(std::string const& source, int line, std::string field, std::string const& message);

    /// 1-based line, 0 when unknown.
    [[nodiscard]] auto line() const noexcept -> int { return line_; }
    [[nodiscard]] auto field() const noexcept -> std::string const& { return field_; }

  private:
    int line_;
    std::string field_;
};

enum class ProviderKind { Builtin, Sidecar };

/// One session variant before providers are attached.
struct VariantSpec {
    SessionConfig session;
    /// Rerank through the sidecar instead of Identity.
    ProviderKind rerank = ProviderKind::Builtin;
};

struct ExperimentConfig {
    std::filesystem::path corpus;
    std::filesystem::path topics;
    std::filesystem::path qrels;
    /// Empty: the bundled English list.
    std::filesystem::path stopwords;
    /// Index snapshot written by `index` and reused by later subcommands when present.
    std::filesystem::path index;
    /// Holds gpt.jsonl and gpt_plus.jsonl.
    std::filesystem::path pool_directory;
    int pool_rounds = 4;
    std::optional<std::string> sidecar_url;
    /// Doc2Query source for the D2Q strategies.
    ProviderKind doc2query = ProviderKind::Builtin;
    int doc2query_n = 5;
    std::vector<std::uint64_t> seeds{42};
    std::vector<VariantSpec> variants;
    MetricParams metrics;
    /// Grid step of cost-axis mean curves in `report`.
    double report_cost_step = 10.0;
    std::filesystem::path output = "runs";

    /// Whether any variant or the D2Q source needs the sidecar.
    [[nodiscard]] auto needs_sidecar() const -> bool;
};

/// Parses YAML text. Relative paths resolve against `base_dir`.
[[nodiscard]] auto parse_experiment_config(std::string const& text, std::string const& source,
                                           std::filesystem::path const& base_dir) -> ExperimentConfig;
/// Reads a YAML file; relative paths resolve against its directory.
[[nodiscard]] auto load_experiment_config(std::filesystem::path const& path) -> ExperimentConfig;

/// Checks that every referenced input file exists. Throws ConfigError.
void check_paths(ExperimentConfig const& config, std::string const& source);

/// Run identifier of a variant under one seed, "<name>@<seed>".
[[nodiscard]] auto run_id(std::string const& variant, std::uint64_t seed) -> std::string;
/// The variant name of a run identifier.
[[nodiscard]] auto variant_of(std::string const& run_id) -> std::string;

}  // namespace sessim
