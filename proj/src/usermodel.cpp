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

#include "sessim/usermodel.hpp"

#include <sstream>
#include <stdexcept>

namespace sessim {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

auto is_probability(double p) -> bool
{
    return p >= 0.0 && p <= 1.0;
}

}  // namespace

auto ClickModel::preset(std::string_view name) -> ClickModel
{
    for (auto model : {perfect(), navigational(), informational(), almost_random()}) {
        if (model.name == name) {
            return model;
        }
    }
    throw std::invalid_argument("unknown click model '" + std::string(name) + "'");
}

void ClickModel::validate() const
{
    if (!(is_probability(p_rel) && is_probability(p_nrel) && p_nrel <= p_rel)) {
        throw std::invalid_argument("click model '" + name + "' needs 0 <= p_nrel <= p_rel <= 1");
    }
}

void validate(StopPolicy const& policy)
{
    std::visit(overloaded{[](StaticStop const& s) {
                              if (s.rpp <= 0) {
                                  throw std::invalid_argument("rpp must be > 0");
                              }
                          },
                          [](DynamicStop const& d) {
                              if (!(d.tnr > 0.0)) {
                                  throw std::invalid_argument("tnr must be > 0");
                              }
                          }},
               policy);
}

auto describe(StopPolicy const& policy) -> std::string
{
    return std::visit(overloaded{[](StaticStop const& s) { return "static:" + std::to_string(s.rpp); },
                                 [](DynamicStop const& d) {
                                     std::ostringstream out;
                                     out << "dynamic:" << d.tnr;
                                     return out.str();
                                 }},
                      policy);
}

void CostModel::validate() const
{
    if (!(query > 0.0 && snippet > 0.0 && read > 0.0 && judge > 0.0)) {
        throw std::invalid_argument("all action costs must be > 0");
    }
}

void validate(JudgeModel const& judge)
{
    if (auto const* noisy = std::get_if<NoisyJudge>(&judge); noisy != nullptr && !is_probability(noisy->p_correct)) {
        throw std::invalid_argument("noisy judge p_correct must be in [0, 1]");
    }
}

auto describe(JudgeModel const& judge) -> std::string
{
    return std::visit(overloaded{[](PerfectJudge const&) { return std::string("perfect"); },
                                 [](NoisyJudge const& n) {
                                     std::ostringstream out;
                                     out << "noisy:" << n.p_correct;
                                     return out.str();
                                 }},
                      judge);
}

auto decide_click(ClickModel const& model, RelevanceGrade grade, Rng& rng) -> bool
{
    return rng.bernoulli(grade.is_relevant() ? model.p_rel : model.p_nrel);
}

auto judge_document(JudgeModel const& judge, RelevanceGrade grade, Rng& rng) -> bool
{
    bool truth = grade.is_relevant();
    return std::visit(overloaded{[&](PerfectJudge const&) { return truth; },
                                 [&](NoisyJudge const& n) { return rng.bernoulli(n.p_correct) ? truth : !truth; }},
                      judge);
}

auto should_stop(StopPolicy const& policy, int snippets_examined, double time_since_last_relevant) -> bool
{
    return std::visit(
        overloaded{[&](StaticStop const& s) { return snippets_examined >= s.rpp; },
                   [&](DynamicStop const& d) { return time_since_last_relevant >= d.tnr; }},
        policy);
}

auto action_cost(CostModel const& costs, Action action) -> double
{
    switch (action) {
    case Action::Query: return costs.query;
    case Action::Snippet: return costs.snippet;
    case Action::Read: return costs.read;
    case Action::Judge: return costs.judge;
    }
    throw std::invalid_argument("unknown action");
}

}  // namespace sessim
