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

#include "sessim/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace sessim {

namespace {

constexpr std::string_view kCsvHeader = "run_id,topic_id,x,y,measure";

/// Appends (x, y), replacing the last point when x did not advance.
void push_point(GainCurve& curve, double x, double y)
{
    if (!curve.points.empty() && curve.points.back().x == x) {
        curve.points.back().y = y;
    } else {
        curve.points.push_back({x, y});
    }
}

/// Session time at which each query (1-based) ended.
auto query_end_times(SessionLog const& log) -> std::vector<double>
{
    std::vector<double> ends(log.queries.size() + 1, 0.0);
    for (auto const& e : log.events) {
        if (e.query_index > 0 && static_cast<std::size_t>(e.query_index) < ends.size()) {
            ends[static_cast<std::size_t>(e.query_index)] = e.t;
        }
    }
    return ends;
}

template <class Fn>
auto score_session(SessionLog const& log, MetricParams const& params, Fn per_query_value) -> SessionScore
{
    auto gains = query_gains(log, params);
    auto ends = query_end_times(log);
    SessionScore score;
    score.by_query.points.push_back({0.0, 0.0});
    score.by_cost.points.push_back({0.0, 0.0});
    for (std::size_t i = 0; i < gains.size(); ++i) {
        score.total += per_query_value(i + 1, gains[i]);
        score.by_query.points.push_back({static_cast<double>(i + 1), score.total});
        push_point(score.by_cost, ends[i + 1], score.total);
    }
    return score;
}

auto dcg(std::vector<int> const& gains) -> double
{
    double sum = 0.0;
    for (std::size_t r = 1; r <= gains.size(); ++r) {
        sum += (std::exp2(gains[r - 1]) - 1.0) / std::log2(static_cast<double>(r) + 1.0);
    }
    return sum;
}

auto sdcg_query(std::size_t i, std::vector<int> const& gains, double bq) -> double
{
    return dcg(gains) / (1.0 + std::log(static_cast<double>(i)) / std::log(bq));
}

auto srbp_query(std::size_t i, std::vector<int> const& gains, double p, double bp) -> double
{
    double inner = 0.0;
    double rank_weight = 1.0;
    for (int g : gains) {
        inner += rank_weight * g;
        rank_weight *= bp;
    }
    return (1.0 - p) * std::pow((p - bp) / (1.0 - bp), static_cast<double>(i - 1)) * inner;
}

void check_srbp_params(double p, double b)
{
    double bp = b * p;
    if (!(bp < 1.0) || !(p > bp)) {
        throw std::invalid_argument("sRBP needs b*p < 1 and p > b*p");
    }
}

void check_csv_field(std::string const& value, char const* what)
{
    if (value.find_first_of(",\n\r\"") != std::string::npos) {
        throw std::invalid_argument(std::string("CSV ") + what + " contains a reserved character: " + value);
    }
}

auto parse_double(std::string const& text, std::string const& source, std::size_t line) -> double
{
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw ParseError(source, line, "invalid number '" + text + "'");
    }
    return value;
}

}  // namespace

auto to_string(GainSource source) -> std::string_view
{
    return source == GainSource::Qrel ? "qrel" : "judged";
}

auto parse_gain_source(std::string_view name) -> GainSource
{
    if (name == "qrel") {
        return GainSource::Qrel;
    }
    if (name == "judged") {
        return GainSource::Judged;
    }
    throw std::invalid_argument("unknown gain source '" + std::string(name) + "' (expected qrel or judged)");
}

auto to_string(EvalDepth depth) -> std::string_view
{
    return depth == EvalDepth::Examined ? "examined" : "full";
}

auto parse_eval_depth(std::string_view name) -> EvalDepth
{
    if (name == "examined") {
        return EvalDepth::Examined;
    }
    if (name == "full") {
        return EvalDepth::Full;
    }
    throw std::invalid_argument("unknown evaluation depth '" + std::string(name) + "' (expected examined or full)");
}

void MetricParams::validate() const
{
    if (!(bq > 1.0)) {
        throw std::invalid_argument("bq must be > 1");
    }
    if (!(p > 0.0 && p < 1.0)) {
        throw std::invalid_argument("p must be in (0, 1)");
    }
    if (!(b > 0.0 && b <= 1.0)) {
        throw std::invalid_argument("b must be in (0, 1]");
    }
    check_srbp_params(p, b);
}

auto GainCurve::final_value() const noexcept -> double
{
    return points.empty() ? 0.0 : points.back().y;
}

auto GainCurve::value_at(double x) const noexcept -> double
{
    auto it = std::upper_bound(points.begin(), points.end(), x,
                               [](double value, CurvePoint const& point) { return value < point.x; });
    return it == points.begin() ? 0.0 : std::prev(it)->y;
}

auto effect_curve(SessionLog const& log) -> GainCurve
{
    GainCurve curve;
    curve.points.push_back({0.0, 0.0});
    double gain = 0.0;
    auto const& events = log.events;
    for (std::size_t i = 0; i < events.size(); ++i) {
        auto const& e = events[i];
        if (e.action == EventType::Read && i + 1 < events.size()) {
            auto const& next = events[i + 1];
            if (next.action == EventType::Judge && next.doc_id == e.doc_id && next.judged_relevant.value_or(false)) {
                gain += e.grade ? e.grade->gain() : 0;
            }
        }
        push_point(curve, e.t, gain);
    }
    return curve;
}

auto query_gains(SessionLog const& log, MetricParams const& params) -> std::vector<std::vector<int>>
{
    std::vector<std::vector<int>> gains(log.queries.size());
    // (query, doc) pairs the user judged relevant.
    std::set<std::pair<int, std::string>> judged;
    std::vector<std::vector<std::pair<std::string, int>>> examined(log.queries.size());
    for (auto const& e : log.events) {
        if (e.query_index < 1 || static_cast<std::size_t>(e.query_index) > log.queries.size() || !e.doc_id) {
            continue;
        }
        auto q = static_cast<std::size_t>(e.query_index - 1);
        if (e.action == EventType::ExamineSnippet) {
            examined[q].emplace_back(*e.doc_id, e.grade ? e.grade->gain() : 0);
        } else if (e.action == EventType::Judge && e.judged_relevant.value_or(false)) {
            judged.emplace(e.query_index, *e.doc_id);
        }
    }
    auto credit = [&](int query_index, std::string const& doc_id, int grade) {
        if (params.gain == GainSource::Qrel || judged.contains({query_index, doc_id})) {
            return grade;
        }
        return 0;
    };
    for (std::size_t q = 0; q < log.queries.size(); ++q) {
        auto const& record = log.queries[q];
        if (params.depth == EvalDepth::Full) {
            for (std::size_t r = 0; r < record.ranking.items.size(); ++r) {
                gains[q].push_back(credit(record.query_index, record.ranking.items[r].doc_id, record.grades[r].gain()));
            }
        } else {
            for (auto const& [doc_id, grade] : examined[q]) {
                gains[q].push_back(credit(record.query_index, doc_id, grade));
            }
        }
    }
    return gains;
}

auto sdcg_total(std::vector<std::vector<int>> const& gains, double bq) -> double
{
    double total = 0.0;
    for (std::size_t i = 0; i < gains.size(); ++i) {
        total += sdcg_query(i + 1, gains[i], bq);
    }
    return total;
}

auto srbp_total(std::vector<std::vector<int>> const& gains, double p, double b) -> double
{
    check_srbp_params(p, b);
    double total = 0.0;
    for (std::size_t i = 0; i < gains.size(); ++i) {
        total += srbp_query(i + 1, gains[i], p, b * p);
    }
    return total;
}

auto sdcg(SessionLog const& log, MetricParams const& params) -> SessionScore
{
    params.validate();
    return score_session(log, params,
                         [&](std::size_t i, std::vector<int> const& g) { return sdcg_query(i, g, params.bq); });
}

auto srbp(SessionLog const& log, MetricParams const& params) -> SessionScore
{
    params.validate();
    return score_session(log, params, [&](std::size_t i, std::vector<int> const& g) {
        return srbp_query(i, g, params.p, params.bp());
    });
}

auto adhoc_eval(RankedList const& ranking, QrelStore const& qrels, std::string const& topic_id, std::size_t k)
    -> AdhocScores
{
    if (k == 0) {
        throw std::invalid_argument("k must be > 0");
    }
    std::vector<int> judged_grades;
    std::size_t total_relevant = 0;
    std::size_t total_nonrelevant = 0;
    for (auto const& [doc_id, grade] : qrels.judgments(topic_id)) {
        if (grade > 0) {
            ++total_relevant;
            judged_grades.push_back(grade);
        } else {
            ++total_nonrelevant;
        }
    }

    AdhocScores scores;
    std::size_t relevant_in_k = 0;
    double dcg_k = 0.0;
    auto depth = std::min(k, ranking.items.size());
    for (std::size_t r = 0; r < depth; ++r) {
        auto g = qrels.grade(topic_id, ranking.items[r].doc_id);
        if (g.is_relevant()) {
            ++relevant_in_k;
        }
        dcg_k += (std::exp2(g.gain()) - 1.0) / std::log2(static_cast<double>(r) + 2.0);
    }
    scores.precision = static_cast<double>(relevant_in_k) / static_cast<double>(k);

    std::sort(judged_grades.begin(), judged_grades.end(), std::greater<>());
    double ideal = 0.0;
    for (std::size_t r = 0; r < std::min(k, judged_grades.size()); ++r) {
        ideal += (std::exp2(judged_grades[r]) - 1.0) / std::log2(static_cast<double>(r) + 2.0);
    }
    scores.ndcg = ideal > 0.0 ? dcg_k / ideal : 0.0;

    if (total_relevant > 0) {
        auto cap = std::min(total_relevant, total_nonrelevant);
        std::size_t nonrelevant_above = 0;
        double sum = 0.0;
        for (auto const& item : ranking.items) {
            auto g = qrels.grade(topic_id, item.doc_id);
            if (!g.is_judged()) {
                continue;
            }
            if (g.is_relevant()) {
                sum += cap == 0 ? 1.0
                                : 1.0 - static_cast<double>(std::min(nonrelevant_above, cap)) /
                                            static_cast<double>(cap);
            } else {
                ++nonrelevant_above;
            }
        }
        scores.bpref = sum / static_cast<double>(total_relevant);
    }
    return scores;
}

auto snippet_distribution(std::span<SessionLog const> logs, bool completed_only) -> std::vector<PositionStats>
{
    if (logs.empty()) {
        throw std::invalid_argument("snippet_distribution needs at least one log");
    }
    std::vector<std::vector<double>> depths;
    for (auto const& log : logs) {
        if (depths.size() < log.queries.size()) {
            depths.resize(log.queries.size());
        }
        std::set<int> completed;
        for (auto const& e : log.events) {
            if (e.action == EventType::StopQuery) {
                completed.insert(e.query_index);
            }
        }
        for (std::size_t i = 0; i < log.queries.size(); ++i) {
            if (!completed_only || completed.contains(log.queries[i].query_index)) {
                depths[i].push_back(static_cast<double>(log.queries[i].examined_depth));
            }
        }
    }
    std::vector<PositionStats> stats;
    stats.reserve(depths.size());
    for (std::size_t i = 0; i < depths.size(); ++i) {
        auto const& values = depths[i];
        if (values.empty()) {
            continue;
        }
        double n = static_cast<double>(values.size());
        double mean = 0.0;
        for (double v : values) {
            mean += v;
        }
        mean /= n;
        double var = 0.0;
        for (double v : values) {
            var += (v - mean) * (v - mean);
        }
        stats.push_back({i + 1, values.size(), mean, std::sqrt(var / n)});
    }
    return stats;
}

auto mean_curve(std::span<GainCurve const> curves, std::span<double const> grid) -> GainCurve
{
    GainCurve mean;
    if (curves.empty()) {
        return mean;
    }
    for (double x : grid) {
        double sum = 0.0;
        for (auto const& curve : curves) {
            sum += curve.value_at(x);
        }
        push_point(mean, x, sum / static_cast<double>(curves.size()));
    }
    return mean;
}

void append_rows(std::vector<CurveRow>& rows, std::string const& run_id, std::string const& topic_id,
                 std::string const& measure, GainCurve const& curve)
{
    for (auto const& point : curve.points) {
        rows.push_back({run_id, topic_id, point.x, point.y, measure});
    }
}

auto format_fixed(double value) -> std::string
{
    if (value == 0.0) {
        value = 0.0;  // folds -0.0
    }
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed, 6);
    if (ec != std::errc()) {
        throw std::invalid_argument("cannot format number");
    }
    return {buf, ptr};
}

void write_curve_csv(std::ostream& out, std::span<CurveRow const> rows)
{
    out << kCsvHeader << '\n';
    for (auto const& row : rows) {
        check_csv_field(row.run_id, "run_id");
        check_csv_field(row.topic_id, "topic_id");
        check_csv_field(row.measure, "measure");
        out << row.run_id << ',' << row.topic_id << ',' << format_fixed(row.x) << ',' << format_fixed(row.y) << ','
            << row.measure << '\n';
    }
}

auto parse_curve_csv(std::istream& in, std::string const& source) -> std::vector<CurveRow>
{
    std::vector<CurveRow> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line_no == 1) {
            if (line != kCsvHeader) {
                throw ParseError(source, line_no, "expected header '" + std::string(kCsvHeader) + "'");
            }
            continue;
        }
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) {
            fields.push_back(field);
        }
        if (fields.size() != 5) {
            throw ParseError(source, line_no, "expected 5 fields, got " + std::to_string(fields.size()));
        }
        rows.push_back({fields[0], fields[1], parse_double(fields[2], source, line_no),
                        parse_double(fields[3], source, line_no), fields[4]});
    }
    if (line_no == 0) {
        throw ParseError(source, 0, "empty CSV");
    }
    return rows;
}

}  // namespace sessim
