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

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "sessim/collection.hpp"
#include "sessim/retrieval.hpp"
#include "sessim/session.hpp"

namespace sessim {

/// Which documents earn gain in the session measures.
enum class GainSource {
    /// Every examined document earns its qrel grade.
    Qrel,
    /// An examined document earns its qrel grade only if the user read it and
    /// judged it relevant while working on that query.
    Judged,
};

/// Which part of each ranking the session measures look at.
enum class EvalDepth {
    /// The snippets the user examined, in examination order.
    Examined,
    /// The whole ranking as retrieved.
    Full,
};

[[nodiscard]] auto to_string(GainSource source) -> std::string_view;
[[nodiscard]] auto parse_gain_source(std::string_view name) -> GainSource;
[[nodiscard]] auto to_string(EvalDepth depth) -> std::string_view;
[[nodiscard]] auto parse_eval_depth(std::string_view name) -> EvalDepth;

struct MetricParams {
    /// Query discount log base of sDCG.
    double bq = 4.0;
    /// sRBP persistence.
    double p = 0.99;
    /// sRBP balance between examining more documents and issuing more queries.
    double b = 0.9;
    GainSource gain = GainSource::Judged;
    EvalDepth depth = EvalDepth::Examined;

    [[nodiscard]] auto bp() const noexcept -> double { return b * p; }
    /// Throws std::invalid_argument unless bq > 1, 0 < p < 1, 0 < b <= 1 and p > b·p.
    void validate() const;
};

struct CurvePoint {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(CurvePoint const&, CurvePoint const&) = default;
};

/// Cumulative gain over cost. x is strictly increasing.
struct GainCurve {
    std::vector<CurvePoint> points;

    /// y of the last point, 0 for an empty curve.
    [[nodiscard]] auto final_value() const noexcept -> double;
    /// Step-function value at `x`: y of the last point with point.x <= x, 0 before the first.
    [[nodiscard]] auto value_at(double x) const noexcept -> double;

    friend bool operator==(GainCurve const&, GainCurve const&) = default;
};

/// Cumulative information gain over time. Starts at (0, 0) and has one point
/// per distinct event time. A read adds the document's grade when the judgment
/// that follows it marks the document relevant.
[[nodiscard]] auto effect_curve(SessionLog const& log) -> GainCurve;

/// Gains rel_r per query, in rank order, as selected by `params.gain` and `params.depth`.
[[nodiscard]] auto query_gains(SessionLog const& log, MetricParams const& params) -> std::vector<std::vector<int>>;

struct SessionScore {
    double total = 0.0;
    /// x = query index, y = running total. Starts at (0, 0).
    GainCurve by_query;
    /// x = session time when each query ended, y = running total. Starts at (0, 0).
    GainCurve by_cost;
};

/// Session DCG: Σ_i DCG(q_i) / (1 + log_bq(i)) with DCG = Σ_r (2^rel_r − 1) / log2(r + 1).
[[nodiscard]] auto sdcg(SessionLog const& log, MetricParams const& params) -> SessionScore;

/// Session RBP: (1 − p) Σ_i ((p − bp)/(1 − bp))^(i−1) Σ_r bp^(r−1) · rel_r.
[[nodiscard]] auto srbp(SessionLog const& log, MetricParams const& params) -> SessionScore;

/// Both session measures over explicit per-query gain lists.
[[nodiscard]] auto sdcg_total(std::vector<std::vector<int>> const& gains, double bq) -> double;
[[nodiscard]] auto srbp_total(std::vector<std::vector<int>> const& gains, double p, double b) -> double;

struct AdhocScores {
    double precision = 0.0;
    double ndcg = 0.0;
    double bpref = 0.0;
};

/// P@k, nDCG@k and Bpref of one ranking. Bpref follows trec_eval: unjudged
/// documents are ignored and non-relevant counts are capped at min(R, N).
[[nodiscard]] auto adhoc_eval(RankedList const& ranking, QrelStore const& qrels, std::string const& topic_id,
                              std::size_t k) -> AdhocScores;

struct PositionStats {
    /// 1-based query position.
    std::size_t position = 0;
    /// Number of sessions contributing to this position.
    std::size_t count = 0;
    double mean = 0.0;
    /// Population standard deviation.
    double std = 0.0;
};

/// Mean and standard deviation of examined_depth per query position. With
/// `completed_only`, a query counts only if the user left it by the stopping
/// rule, so a final query cut short by the global budget is left out.
/// Throws std::invalid_argument on empty input.
[[nodiscard]] auto snippet_distribution(std::span<SessionLog const> logs, bool completed_only = true)
    -> std::vector<PositionStats>;

/// Pointwise mean of step-function curves sampled on `grid`.
[[nodiscard]] auto mean_curve(std::span<GainCurve const> curves, std::span<double const> grid) -> GainCurve;

struct CurveRow {
    std::string run_id;
    std::string topic_id;
    double x = 0.0;
    double y = 0.0;
    std::string measure;

    friend bool operator==(CurveRow const&, CurveRow const&) = default;
};

/// Appends one row per curve point.
void append_rows(std::vector<CurveRow>& rows, std::string const& run_id, std::string const& topic_id,
                 std::string const& measure, GainCurve const& curve);

/// Header `run_id,topic_id,x,y,measure`; numbers in fixed notation with 6 decimals.
void write_curve_csv(std::ostream& out, std::span<CurveRow const> rows);
[[nodiscard]] auto parse_curve_csv(std::istream& in, std::string const& source = "<stream>") -> std::vector<CurveRow>;

/// Fixed-notation number with 6 decimals, independent of the global locale.
[[nodiscard]] auto format_fixed(double value) -> std::string;

}  // namespace sessim
