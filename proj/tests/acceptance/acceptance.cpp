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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits non-zero on any failure.
#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "colasim/analysis.hpp"
#include "colasim/commands.hpp"
#include "colasim/engine.hpp"
#include "colasim/trace_io.hpp"

using namespace colasim;
using namespace colasim::literals;

namespace fs = std::filesystem;

namespace {

const std::string kFixtures = COLASIM_FIXTURES;

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a) {
    char buf[96];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

Scenario scenario(const std::string& name) { return load_scenario(kFixtures + "/scenarios/" + name + ".json"); }
PipelineGraph pipeline(const std::string& name) { return load_pipeline(kFixtures + "/pipelines/" + name + ".json"); }

// Sensor captures inside the run; the last one may still be in flight at the horizon.
std::int64_t captures(const RunTrace& t, const PipelineGraph& g) {
    std::int64_t n = 0;
    for (const auto& node : g.nodes) {
        if (node.role != NodeRole::sensor || t.duration <= node.pattern.phase) continue;
        n = std::max(n, (t.duration - node.pattern.phase - 1_us).us() / node.pattern.period.us() + 1);
    }
    return n;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome reaction_identity() {
    const auto t0 = std::chrono::steady_clock::now();
    const Scenario sc = scenario("mixed_long");
    SimConfig cfg;
    cfg.mitigation.fastpath = true;
    cfg.mitigation.proactive = true;
    cfg.mitigation.deadline_cap = 125_ms;
    const PipelineGraph g = pipeline("av_stack");
    const RunTrace t = run_simulation(sc, g, cfg, 7);
    const double elapsed = seconds_since(t0);
    std::int64_t reacted = 0, broken = 0;
    for (const auto& r : t.reactions) {
        if (!r.reacted) continue;
        ++reacted;
        if (r.reaction().us() != r.t_sensor.us() + r.t_module.us() + r.t_bubble.us()) ++broken;
    }
    const std::int64_t frames = captures(t, g);
    const bool pass = reacted > 0 && broken == 0 && frames >= 1000 && elapsed < 10.0;
    return {pass, std::to_string(frames) + " frames, " + std::to_string(reacted) + " reactions, " +
                      std::to_string(broken) + " mismatches, " + fmt("%.2f s", elapsed)};
}

Outcome requirement_ordering() {
    RssParams p;
    const std::array<RequirementTarget, 4> targets{{
        {{"following_35", RequirementKind::vehicle_following, 35.0, 10.0}, 411.2},
        {{"following_20", RequirementKind::vehicle_following, 20.0, 10.0}, 621.8},
        {{"encroaching", RequirementKind::encroaching_cut_in, 25.0, 4.7}, 235.5},
        {{"occluded", RequirementKind::occluded_cut_in, 25.0, 3.9}, 159.5},
    }};
    const RequirementCalibration cal = calibrate_requirements(targets, p);
    std::array<double, 4> ms{};
    bool within = true;
    std::string detail;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const auto b = requirement_budget(targets[i].scenario, cal, p);
        if (!b.budget) return {false, targets[i].scenario.label + " unbounded"};
        ms[i] = static_cast<double>(b.budget->us()) / 1000.0;
        within = within && std::abs(ms[i] - targets[i].latency_ms) <= 0.25 * targets[i].latency_ms;
        detail += targets[i].scenario.label + "=" + fmt("%.1f ms ", ms[i]);
    }
    const bool ordered = ms[3] < ms[2] && ms[2] < ms[0] && ms[0] < ms[1];
    detail += ordered ? "ordered" : "misordered";
    detail += within ? ", all within 25%" : ", magnitude outside 25%";
    return {ordered && within, detail};
}

SimTime worst_in_radius(const RunTrace& t) {
    SimTime worst = SimTime::zero();
    for (const auto& f : t.frames) {
        if (f.in_radius) worst = std::max(worst, f.e2e);
    }
    return worst;
}

Outcome deadline_bounded_fastpath() {
    const auto t0 = std::chrono::steady_clock::now();
    const Scenario sc = scenario("dense_traffic");
    const PipelineGraph g = pipeline("av_stack");
    SimConfig on;
    on.mitigation.fastpath = true;
    on.mitigation.deadline_cap = 125_ms;
    SimConfig off = on;
    off.mitigation.fastpath = false;
    const RunTrace with = run_simulation(sc, g, on, 42);
    const RunTrace without = run_simulation(sc, g, off, 42);
    const double elapsed = seconds_since(t0);
    const SimTime w_on = worst_in_radius(with);
    const SimTime w_off = worst_in_radius(without);
    const bool pass = w_on <= 125_ms && w_off > 125_ms && captures(with, g) >= 1000 && elapsed < 30.0;
    return {pass, "worst in-radius " + fmt("%.3f ms", w_on.us() / 1000.0) + " with fastpath, " +
                      fmt("%.3f ms", w_off.us() / 1000.0) + " without, " + fmt("%.2f s", elapsed)};
}

Outcome density_correlation_check() {
    CliOptions o;
    o.config = kFixtures + "/configs/density_sweep.json";
    PreparedRun base = prepare_run(o);
    const std::vector<double> densities{0, 2, 4, 6, 8, 10};
    std::vector<std::pair<double, double>> points;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        base.seed = seed;
        for (const auto& row : run_sweep(base, SweepAxis::density, densities, sweep_threads())) {
            points.emplace_back(row.value, static_cast<double>(row.mean_us));
        }
    }
    const double rho = density_correlation(points);
    return {rho > 0.9, std::to_string(points.size()) + " runs, rho=" + fmt("%.4f", rho)};
}

Outcome queueing_oracle() {
    const RunTrace t = run_simulation(scenario("open_road"), pipeline("queue_trace"), SimConfig{}, 1);
    std::vector<const SpanRecord*> det;
    for (const auto& s : t.spans) {
        if (s.node == "detector") det.push_back(&s);
    }
    std::sort(det.begin(), det.end(), [](auto* a, auto* b) { return a->start < b->start; });
    if (det.size() < 3) return {false, "fewer than three detector runs"};
    const std::array<std::int64_t, 3> ends{150'000, 300'000, 450'000};
    const std::array<std::int64_t, 3> bubbles{0, 50'000, 100'000};
    bool pass = true;
    std::string detail = "outputs";
    for (std::size_t i = 0; i < 3; ++i) {
        pass = pass && det[i]->sensor_seq == i && det[i]->end.us() == ends[i] &&
               (det[i]->start - det[i]->release).us() == bubbles[i];
        detail += " " + std::to_string(det[i]->end.us() / 1000);
    }
    detail += " ms; bubbles";
    for (const auto& f : t.frames) {
        if (f.seq >= 3) continue;
        pass = pass && f.bubble.us() == bubbles[f.seq];
        detail += " " + std::to_string(f.bubble.us() / 1000);
    }
    return {pass, detail + " ms"};
}

Outcome stealing_check() {
    CliOptions o;
    o.config = kFixtures + "/configs/steal_pair.json";
    o.stealing = true;
    const PreparedRun on = prepare_run(o);
    o.stealing = false;
    const PreparedRun off = prepare_run(o);
    const RunTrace with = run_simulation(on.scenario, on.graph, on.config.sim, on.seed);
    const RunTrace without = run_simulation(off.scenario, off.graph, off.config.sim, off.seed);
    const double gain = with.busy_fraction() - without.busy_fraction();
    const bool pass = with.budget_misses.empty() && with.steals > 0 && gain >= 0.05;
    return {pass, std::to_string(with.budget_misses.size()) + " budget misses, " + std::to_string(with.steals) +
                      " steals, busy " + fmt("%.3f", without.busy_fraction()) + " -> " +
                      fmt("%.3f", with.busy_fraction())};
}

struct NodeLatency {
    std::int64_t total_us = 0;
    std::int64_t count = 0;
};

NodeLatency planner_latency(const PipelineGraph& g, bool proactive) {
    Scenario sc = scenario("open_road");
    SimConfig cfg;
    cfg.mitigation.proactive = proactive;
    const RunTrace t = run_simulation(sc, g, cfg, 1);
    NodeLatency out;
    for (const auto& s : t.spans) {
        if (s.node != "planner" || s.kind == SpanKind::precompute) continue;
        out.total_us += s.duration().us();
        ++out.count;
    }
    return out;
}

Outcome proactive_check() {
    PipelineGraph g = pipeline("proactive_pair");
    const NodeLatency base = planner_latency(g, false);
    const NodeLatency pro = planner_latency(g, true);
    for (auto& n : g.nodes) {
        if (n.proactive) n.proactive->cancel_probability = 1.0;
    }
    const NodeLatency cancelled = planner_latency(g, true);
    if (base.count == 0 || base.count != pro.count || base.count != cancelled.count) return {false, "frame counts differ"};
    const bool exact = base.total_us - pro.total_us == 8'000 * base.count;
    const bool none = base.total_us == cancelled.total_us;
    return {exact && none, std::to_string(base.count) + " frames, mean drop " +
                               fmt("%.3f ms", static_cast<double>(base.total_us - pro.total_us) / base.count / 1000.0) +
                               ", cancelled drop " +
                               fmt("%.3f ms", static_cast<double>(base.total_us - cancelled.total_us) / base.count / 1000.0)};
}

Outcome determinism_check() {
    const fs::path root = fs::temp_directory_path() / "colasim_acceptance_det";
    fs::remove_all(root);
    std::array<std::string, 2> dirs{(root / "a").string(), (root / "b").string()};
    for (const auto& d : dirs) {
        CliOptions o;
        o.config = kFixtures + "/configs/mixed_mitigated.json";
        o.out = d;
        std::ostringstream out, err;
        if (cmd_run(o, out, err) != kExitOk) return {false, "run failed: " + err.str()};
    }
    bool same = true;
    std::size_t bytes = 0;
    for (const char* f : {"trace.ndjson", "report.json", "cdf.csv"}) {
        const std::string a = slurp(dirs[0] + "/" + f);
        same = same && !a.empty() && a == slurp(dirs[1] + "/" + f);
        bytes += a.size();
    }
    return {same, std::to_string(bytes) + " bytes compared"};
}

Outcome statistics_oracle() {
    RandomStream rng(2718, "acceptance-stats");
    std::int64_t mismatches = 0;
    for (int trial = 0; trial < 10'000; ++trial) {
        const std::size_t n = 1 + rng.next_u64() % 300;
        std::vector<SimTime> samples;
        for (std::size_t i = 0; i < n; ++i) samples.push_back(SimTime::from_us(static_cast<std::int64_t>(rng.next_u64() % 1'000'000)));
        std::vector<SimTime> sorted = samples;
        std::sort(sorted.begin(), sorted.end());
        auto rank = [&](int pct) {
            const std::size_t k = (static_cast<std::size_t>(pct) * n + 99) / 100;
            return sorted[std::max<std::size_t>(k, 1) - 1];
        };
        std::int64_t sum = 0;
        for (auto s : sorted) sum += s.us();
        const LatencyStats s = compute_stats(samples);
        const bool ok = s.min == sorted.front() && s.max == sorted.back() && s.count == static_cast<std::int64_t>(n) &&
                        s.mean.us() == sum / static_cast<std::int64_t>(n) && s.p50 == rank(50) && s.p95 == rank(95) &&
                        s.p99 == rank(99);
        mismatches += ok ? 0 : 1;
    }
    std::vector<SimTime> samples;
    for (int i = 0; i < 5000; ++i) samples.push_back(SimTime::from_us(static_cast<std::int64_t>(rng.next_u64() % 2000)));
    const auto path = (fs::temp_directory_path() / "colasim_acceptance_cdf.csv").string();
    export_cdf(samples, path);
    const auto rows = load_cdf(path);
    bool monotone = !rows.empty() && rows.back().fraction == 1.0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        monotone = monotone && rows[i].latency_us >= rows[i - 1].latency_us && rows[i].fraction >= rows[i - 1].fraction;
    }
    return {mismatches == 0 && monotone,
            std::to_string(mismatches) + " stats mismatches over 10000 sets, CDF " + (monotone ? "monotone" : "broken")};
}

Outcome corner_suite() {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(kFixtures + "/corner_suite")) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    const PipelineGraph g = pipeline("av_stack");
    SimConfig base;
    SimConfig all = base;
    all.mitigation.fastpath = true;
    all.mitigation.proactive = true;
    all.mitigation.stealing = true;
    std::int64_t v_base = 0, v_all = 0;
    bool collisions_ok = true;
    for (const auto& f : files) {
        const Scenario sc = load_scenario(f.string());
        const RunTrace a = run_simulation(sc, g, base, 3);
        const RunTrace b = run_simulation(sc, g, all, 3);
        v_base += a.violations;
        v_all += b.violations;
        if (b.collisions > a.collisions) collisions_ok = false;
    }
    const bool pass = files.size() >= 20 && v_all < v_base && collisions_ok;
    return {pass, std::to_string(files.size()) + " scenarios, violations " + std::to_string(v_base) + " -> " +
                      std::to_string(v_all) + (collisions_ok ? ", no collision increase" : ", collisions increased")};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        Outcome (*check)();
    };
    const Criterion criteria[] = {
        {1, "reaction decomposition identity", reaction_identity},
        {2, "requirement ordering and magnitude", requirement_ordering},
        {3, "deadline-bounded fastpath", deadline_bounded_fastpath},
        {4, "density correlation", density_correlation_check},
        {5, "queueing oracle", queueing_oracle},
        {6, "work-stealing safety and utilization", stealing_check},
        {7, "proactive saving", proactive_check},
        {8, "run determinism", determinism_check},
        {9, "statistics oracle", statistics_oracle},
        {10, "corner suite mitigation", corner_suite},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::cout << (o.pass ? "PASS" : "FAIL") << " " << c.id << " " << c.name << ": " << o.detail << std::endl;
        failed += o.pass ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
