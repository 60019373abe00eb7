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

#include <string>
#include <string_view>
#include <variant>

#include "sessim/collection.hpp"
#include "sessim/rng.hpp"

namespace sessim {

/// Click probabilities for relevant (Judged g > 0) and other results.
struct ClickModel {
    std::string name;
    double p_rel = 1.0;
    double p_nrel = 0.0;

    [[nodiscard]] static auto perfect() -> ClickModel { return {"perfect", 1.0, 0.0}; }
    [[nodiscard]] static auto navigational() -> ClickModel { return {"navigational", 0.9, 0.1}; }
    [[nodiscard]] static auto informational() -> ClickModel { return {"informational", 0.8, 0.4}; }
    [[nodiscard]] static auto almost_random() -> ClickModel { return {"almost_random", 0.6, 0.4}; }
    /// One of the four presets; throws std::invalid_argument otherwise.
    [[nodiscard]] static auto preset(std::string_view name) -> ClickModel;

    /// Throws std::invalid_argument unless 0 <= p_nrel <= p_rel <= 1.
    void validate() const;

    friend bool operator==(ClickModel const&, ClickModel const&) = default;
};

struct StaticStop {
    int rpp = 10;
    friend bool operator==(StaticStop const&, StaticStop const&) = default;
};

struct DynamicStop {
    double tnr = 50.0;
    friend bool operator==(DynamicStop const&, DynamicStop const&) = default;
};

/// Static: leave the result list after `rpp` snippets. Dynamic: leave once
/// `tnr` time units have passed since the last relevant judgment.
using StopPolicy = std::variant<StaticStop, DynamicStop>;

void validate(StopPolicy const& policy);
/// "static:10", "dynamic:50".
[[nodiscard]] auto describe(StopPolicy const& policy) -> std::string;

enum class Action { Query, Snippet, Read, Judge };

struct CostModel {
    double query = 10.0;
    double snippet = 3.0;
    double read = 30.0;
    double judge = 5.0;

    void validate() const;

    friend bool operator==(CostModel const&, CostModel const&) = default;
};

struct PerfectJudge {
    friend bool operator==(PerfectJudge const&, PerfectJudge const&) = default;
};

struct NoisyJudge {
    double p_correct = 1.0;
    friend bool operator==(NoisyJudge const&, NoisyJudge const&) = default;
};

using JudgeModel = std::variant<PerfectJudge, NoisyJudge>;

void validate(JudgeModel const& judge);
[[nodiscard]] auto describe(JudgeModel const& judge) -> std::string;

[[nodiscard]] auto decide_click(ClickModel const& model, RelevanceGrade grade, Rng& rng) -> bool;

/// Whether the user marks the document relevant. Unjudged counts as non-relevant.
[[nodiscard]] auto judge_document(JudgeModel const& judge, RelevanceGrade grade, Rng& rng) -> bool;

[[nodiscard]] auto should_stop(StopPolicy const& policy, int snippets_examined, double time_since_last_relevant)
    -> bool;

[[nodiscard]] auto action_cost(CostModel const& costs, Action action) -> double;

}  // namespace sessim
