// Copyright 2026 The cola-sim Authors
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

#include "colasim/analysis.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <tuple>

namespace colasim {

SimTime nearest_rank(std::span<const SimTime> sorted, int percent) {
    if (sorted.empty()) throw AnalysisError("percentile of an empty sample set");
    const std::int64_t n = static_cast<std::int64_t>(sorted.size());
    std::int64_t rank = (static_cast<std::int64_t>(percent) * n + 99) / 100;
    rank = std::clamp<std::int64_t>(rank, 1, n);
    return sorted[static_cast<std::size_t>(rank - 1)];
}

LatencyStats compute_stats(std::span<const SimTime> samples) {
    if (samples.empty()) throw AnalysisError("compute_stats: no samples");
    std::vector<SimTime> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    LatencyStats s;
    s.count = static_cast<std::int64_t>(sorted.size());
    s.min = sorted.front();
    s.max = sorted.back();
    std::int64_t sum = 0;
    for (SimTime t : sorted) {
        if (__builtin_add_overflow(sum, t.us(), &sum)) throw AnalysisError("compute_stats: sum overflows");
    }
    s.mean = SimTime::from_us(sum / s.count);
    s.p50 = nearest_rank(sorted, 50);
    s.p95 = nearest_rank(sorted, 95);
    s.p99 = nearest_rank(sorted, 99);
    return s;
}

json stats_to_json(const LatencyStats& s) {
    return json{{"count", s.count},   {"min_us", s.min.us()}, {"mean_us", s.mean.us()}, {"p50_us", s.p50.us()},
                {"p95_us", s.p95.us()}, {"p99_us", s.p99.us()}, {"max_us", s.max.us()}};
}

std::vector<double> average_ranks(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
        const double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw AnalysisError("spearman: length mismatch");
    if (x.size() < 3) throw AnalysisError("spearman: at least 3 points required");
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0 || syy == 0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

double density_correlation(const std::vector<std::pair<double, double>>& runs) {
    if (runs.size() < 3) throw AnalysisError("density_correlation: at least 3 runs required");
    std::vector<double> x, y;
    for (const auto& [d, m] : runs) {
        x.push_back(d);
        y.push_back(m);
    }
    return spearman(x, y);
}

SafetyReport safety_report(const RunTrace& trace) {
    SafetyReport r;
    r.violations = trace.violations;
    r.collisions = trace.collisions;
    for (const auto& re : trace.reactions) r.no_reaction += re.reacted ? 0 : 1;
    for (const auto& s : trace.safety) {
        if (s.min_gap_m && (!r.min_gap_m || *s.min_gap_m < *r.min_gap_m)) r.min_gap_m = s.min_gap_m;
    }
    return r;
}

std::vector<SimTime> e2e_samples(const RunTrace& trace) {
    std::vector<SimTime> out;
    out.reserve(trace.frames.size());
    for (const auto& f : trace.frames) out.push_back(f.e2e);
    return out;
}

json run_report(const RunTrace& t) {
    json j;
    j["format"] = 1;
    j["scenario"] = t.scenario_name;
    j["scenario_hash"] = t.scenario_hash;
    j["pipeline"] = t.pipeline_name;
    j["seed"] = t.seed;
    j["duration_us"] = t.duration.us();
    const auto e2e = e2e_samples(t);
    j["frames"] = e2e.empty() ? json(nullptr) : stats_to_json(compute_stats(e2e));

    std::map<std::string, std::vector<SimTime>> per_node;
    std::int64_t fastpath_spans = 0;
    for (const auto& s : t.spans) {
        if (s.worker == "-" || s.kind == SpanKind::precompute) continue;
        per_node[s.node].push_back(s.duration());
        fastpath_spans += s.kind == SpanKind::fastpath ? 1 : 0;
    }
    json nodes = json::object();
    for (const auto& [name, v] : per_node) nodes[name] = stats_to_json(compute_stats(v));
    j["nodes"] = nodes;

    json reactions = json::array();
    for (const auto& r : t.reactions) {
        json rj{{"label", r.label}, {"agent", r.agent_id}, {"reacted", r.reacted}, {"t0_us", r.t0.us()}};
        if (r.reacted) {
            rj["t1_us"] = r.t1.us();
            rj["reaction_us"] = r.reaction().us();
            rj["t_sensor_us"] = r.t_sensor.us();
            rj["t_module_us"] = r.t_module.us();
            rj["t_bubble_us"] = r.t_bubble.us();
            rj["in_radius"] = r.in_radius;
        }
        reactions.push_back(rj);
    }
    j["reactions"] = reactions;

    const SafetyReport sr = safety_report(t);
    j["safety"] = json{{"violations", sr.violations},
                       {"collisions", sr.collisions},
                       {"no_reaction", sr.no_reaction},
                       {"min_gap_m", sr.min_gap_m ? json(*sr.min_gap_m) : json(nullptr)}};
    j["scheduling"] = json{{"busy_fraction", t.busy_fraction()},
                           {"budget_misses", t.budget_misses.size()},
                           {"steals", t.steals},
                           {"dropped_messages", t.dropped_messages},
                           {"fastpath_spans", fastpath_spans},
                           {"decisions", t.decisions.size()}};
    return j;
}

namespace {

using FrameKey = std::tuple<std::string, std::uint64_t, std::string>;

std::map<FrameKey, const FrameRecord*> first_frames(const RunTrace& t) {
    std::map<FrameKey, const FrameRecord*> out;
    for (const auto& f : t.frames) {
        auto [it, fresh] = out.emplace(FrameKey{f.sensor, f.seq, f.sink}, &f);
        if (!fresh && f.done < it->second->done) it->second = &f;
    }
    return out;
}

std::map<std::string, std::pair<std::int64_t, std::int64_t>> node_span_sums(const RunTrace& t) {
    std::map<std::string, std::pair<std::int64_t, std::int64_t>> out;
    for (const auto& s : t.spans) {
        if (s.worker == "-" || s.kind == SpanKind::precompute) continue;
        auto& [sum, n] = out[s.node];
        sum += s.duration().us();
        ++n;
    }
    return out;
}

}  // namespace

CompareReport compare_runs(const RunTrace& baseline, const RunTrace& treatment) {
    if (baseline.scenario_hash != treatment.scenario_hash) {
        throw AnalysisError("compare_runs: scenario hash mismatch (" + baseline.scenario_hash + " vs " +
                            treatment.scenario_hash + ")");
    }
    CompareReport r;
    r.scenario_hash = baseline.scenario_hash;
    const auto a = first_frames(baseline);
    const auto b = first_frames(treatment);
    std::vector<SimTime> base_e2e, treat_e2e;
    for (const auto& [key, fa] : a) {
        auto it = b.find(key);
        if (it == b.end()) continue;
        base_e2e.push_back(fa->e2e);
        treat_e2e.push_back(it->second->e2e);
        const std::int64_t d = SimTime::signed_diff(it->second->e2e, fa->e2e);
        r.faster_frames += d < 0 ? 1 : 0;
        r.slower_frames += d > 0 ? 1 : 0;
    }
    r.matched_frames = static_cast<std::int64_t>(base_e2e.size());
    if (!base_e2e.empty()) {
        const LatencyStats sa = compute_stats(base_e2e);
        const LatencyStats sb = compute_stats(treat_e2e);
        r.mean_delta_us = SimTime::signed_diff(sb.mean, sa.mean);
        r.p99_delta_us = SimTime::signed_diff(sb.p99, sa.p99);
        r.worst_delta_us = SimTime::signed_diff(sb.max, sa.max);
    }
    const SafetyReport ra = safety_report(baseline);
    const SafetyReport rb = safety_report(treatment);
    r.violations_delta = rb.violations - ra.violations;
    r.collisions_delta = rb.collisions - ra.collisions;
    r.no_reaction_delta = rb.no_reaction - ra.no_reaction;

    const auto na = node_span_sums(baseline);
    const auto nb = node_span_sums(treatment);
    for (const auto& [node, sa] : na) {
        auto it = nb.find(node);
        if (it == nb.end() || sa.second == 0 || it->second.second == 0) continue;
        r.node_mean_delta_us[node] = it->second.first / it->second.second - sa.first / sa.second;
    }
    for (std::size_t i = 0; i < baseline.reactions.size() && i < treatment.reactions.size(); ++i) {
        const auto& x = baseline.reactions[i];
        const auto& y = treatment.reactions[i];
        if (x.label != y.label || !x.reacted || !y.reacted) continue;
        r.reaction_delta_us[x.label] = SimTime::signed_diff(y.reaction(), x.reaction());
    }
    return r;
}

json compare_to_json(const CompareReport& r) {
    return json{{"format", 1},
                {"scenario_hash", r.scenario_hash},
                {"matched_frames", r.matched_frames},
                {"mean_delta_us", r.mean_delta_us},
                {"p99_delta_us", r.p99_delta_us},
                {"worst_delta_us", r.worst_delta_us},
                {"faster_frames", r.faster_frames},
                {"slower_frames", r.slower_frames},
                {"violations_delta", r.violations_delta},
                {"collisions_delta", r.collisions_delta},
                {"no_reaction_delta", r.no_reaction_delta},
                {"node_mean_delta_us", r.node_mean_delta_us},
                {"reaction_delta_us", r.reaction_delta_us}};
}

CompareReport compare_from_json(const json& j) {
    try {
        CompareReport r;
        if (j.at("format").get<int>() != 1) throw ParseError("compare report: unsupported format");
        r.scenario_hash = j.at("scenario_hash").get<std::string>();
        r.matched_frames = j.at("matched_frames").get<std::int64_t>();
        r.mean_delta_us = j.at("mean_delta_us").get<std::int64_t>();
        r.p99_delta_us = j.at("p99_delta_us").get<std::int64_t>();
        r.worst_delta_us = j.at("worst_delta_us").get<std::int64_t>();
        r.faster_frames = j.at("faster_frames").get<std::int64_t>();
        r.slower_frames = j.at("slower_frames").get<std::int64_t>();
        r.violations_delta = j.at("violations_delta").get<std::int64_t>();
        r.collisions_delta = j.at("collisions_delta").get<std::int64_t>();
        r.no_reaction_delta = j.at("no_reaction_delta").get<std::int64_t>();
        r.node_mean_delta_us = j.at("node_mean_delta_us").get<std::map<std::string, std::int64_t>>();
        r.reaction_delta_us = j.at("reaction_delta_us").get<std::map<std::string, std::int64_t>>();
        return r;
    } catch (const json::exception& e) {
        throw ParseError(std::string("compare report: ") + e.what());
    }
}

std::vector<CdfRow> cdf_rows(std::span<const SimTime> samples) {
    if (samples.empty()) throw AnalysisError("export_cdf: no samples");
    std::vector<SimTime> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<CdfRow> rows;
    const double n = static_cast<double>(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (i + 1 < sorted.size() && sorted[i + 1] == sorted[i]) continue;  // keep the highest fraction
        rows.push_back({sorted[i].us(), static_cast<double>(i + 1) / n});
    }
    return rows;
}

std::string cdf_csv(std::span<const SimTime> samples) {
    std::string out = "latency_us,cumulative_fraction\n";
    char buf[64];
    for (const auto& r : cdf_rows(samples)) {
        std::snprintf(buf, sizeof buf, "%" PRId64 ",%.6f\n", r.latency_us, r.fraction);
        out += buf;
    }
    return out;
}

void export_cdf(std::span<const SimTime> samples, const std::string& path) { write_text_file(path, cdf_csv(samples)); }

std::vector<CdfRow> load_cdf(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open");
    std::string line;
    if (!std::getline(in, line) || line != "latency_us,cumulative_fraction") throw ParseError(path + ": bad CDF header");
    std::vector<CdfRow> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ParseError(path + ":" + std::to_string(lineno) + ": expected two columns");
        try {
            rows.push_back({std::stoll(line.substr(0, comma)), std::stod(line.substr(comma + 1))});
        } catch (const std::exception&) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": not a number");
        }
    }
    return rows;
}

}  // namespace colasim
