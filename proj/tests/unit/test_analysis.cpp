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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "colasim/analysis.hpp"

using namespace colasim;
using namespace colasim::literals;

namespace {

const std::string kFixtures = COLASIM_FIXTURES;

std::vector<SimTime> us(std::initializer_list<std::int64_t> v) {
    std::vector<SimTime> out;
    for (auto x : v) out.push_back(SimTime::from_us(x));
    return out;
}

// camera -> prediction (80 ms, fast 20 ms) -> planning (10 ms), one static box beside the ego.
PipelineGraph fastpath_trio() {
    PipelineGraph g;
    g.name = "trio";
    g.channels = {{"frames", ChannelPolicy::latest_only, 1}, {"tracks", ChannelPolicy::latest_only, 1},
                  {"plan", ChannelPolicy::latest_only, 1}};
    NodeSpec cam;
    cam.name = "camera";
    cam.role = NodeRole::sensor;
    cam.pattern = {ExecutionPattern::Kind::timing, 100_ms, SimTime::zero()};
    cam.outputs = {"frames"};
    NodeSpec pred;
    pred.name = "prediction";
    pred.role = NodeRole::prediction;
    pred.inputs = {"frames"};
    pred.outputs = {"tracks"};
    pred.latency = LatencyModel::fixed(80_ms);
    pred.fast_latency = LatencyModel::fixed(20_ms);
    NodeSpec plan;
    plan.name = "planning";
    plan.role = NodeRole::planning;
    plan.inputs = {"tracks"};
    plan.outputs = {"plan"};
    plan.latency = LatencyModel::fixed(10_ms);
    g.nodes = {cam, pred, plan};
    return g;
}

Scenario box_beside() {
    Scenario sc;
    sc.name = "box";
    sc.ego = AgentState{0, kLaneWidthM, 0, 0, 1};
    sc.duration = 1000_ms;
    sc.agents.push_back({"box", AgentKind::vehicle, {AgentState{10, 0, 0, 0, 0}, {}, {}}});
    return sc;
}

}  // namespace

TEST_SUITE("analysis") {

TEST_CASE("stats examples") {
    std::vector<SimTime> hundred;
    for (int i = 1; i <= 100; ++i) hundred.push_back(SimTime::from_us(i));
    const auto s = compute_stats(hundred);
    CHECK(s.p99 == 99_us);
    CHECK(s.max == 100_us);
    CHECK(s.p50 == 50_us);

    const auto flat = compute_stats(us({7, 7, 7, 7}));
    CHECK(flat.mean == 7_us);
    CHECK(flat.p50 == 7_us);
    CHECK(flat.p99 == 7_us);
    CHECK(flat.max == 7_us);

    const auto four = us({4, 1, 3, 2});
    std::vector<SimTime> sorted = four;
    std::sort(sorted.begin(), sorted.end());
    CHECK(nearest_rank(sorted, 50) == 2_us);
    CHECK_THROWS_AS(compute_stats(std::vector<SimTime>{}), AnalysisError);
}

TEST_CASE("stats agree with a full-sort oracle on 10^4 random sets") {
    RandomStream rng(99, "stats-oracle");
    for (int trial = 0; trial < 10'000; ++trial) {
        const std::size_t n = 1 + rng.next_u64() % 200;
        std::vector<std::int64_t> raw;
        std::vector<SimTime> samples;
        for (std::size_t i = 0; i < n; ++i) {
            raw.push_back(static_cast<std::int64_t>(rng.next_u64() % 500'000));
            samples.push_back(SimTime::from_us(raw.back()));
        }
        std::sort(raw.begin(), raw.end());
        auto rank = [&](double p) {
            const auto k = static_cast<std::size_t>(std::ceil(p * static_cast<double>(n) - 1e-9));
            return raw[std::max<std::size_t>(k, 1) - 1];
        };
        std::int64_t sum = 0;
        for (auto v : raw) sum += v;
        const auto s = compute_stats(samples);
        REQUIRE(s.min.us() == raw.front());
        REQUIRE(s.max.us() == raw.back());
        REQUIRE(s.mean.us() == sum / static_cast<std::int64_t>(n));
        REQUIRE(s.p50.us() == rank(0.50));
        REQUIRE(s.p95.us() == rank(0.95));
        REQUIRE(s.p99.us() == rank(0.99));
    }
}

TEST_CASE("spearman") {
    CHECK(density_correlation({{1, 10}, {2, 30}, {3, 20}}) == doctest::Approx(0.5));
    CHECK(density_correlation({{1, 1}, {2, 2}, {3, 5}, {4, 9}}) == doctest::Approx(1.0));
    CHECK(density_correlation({{1, 9}, {2, 5}, {3, 2}, {4, 1}}) == doctest::Approx(-1.0));
    CHECK_THROWS_AS(density_correlation({{1, 1}, {2, 2}}), AnalysisError);
    const std::vector<double> ties{10, 20, 20, 30};
    CHECK(average_ranks(ties) == std::vector<double>{1.0, 2.5, 2.5, 4.0});
}

TEST_CASE("compare_runs") {
    const Scenario sc = load_scenario(kFixtures + "/scenarios/vehicle_following.json");
    const PipelineGraph g = load_pipeline(kFixtures + "/pipelines/av_stack.json");
    const RunTrace t = run_simulation(sc, g, SimConfig{}, 3);
    const CompareReport same = compare_runs(t, t);
    CHECK(same.matched_frames == static_cast<std::int64_t>(t.frames.size()));
    CHECK(same.mean_delta_us == 0);
    CHECK(same.p99_delta_us == 0);
    CHECK(same.worst_delta_us == 0);
    CHECK(same.faster_frames == 0);
    CHECK(same.slower_frames == 0);
    CHECK(same.violations_delta == 0);
    for (const auto& [node, d] : same.node_mean_delta_us) CHECK(d == 0);
    CHECK(compare_from_json(compare_to_json(same)) == same);

    RunTrace other = t;
    other.scenario_hash = "deadbeef";
    CHECK_THROWS_AS(compare_runs(t, other), AnalysisError);
}

TEST_CASE("compare_runs on the fastpath trio matches the hand trace") {
    // Cap 50 ms, planning needs 10 ms: 40 ms remain, the 80 ms normal path does not fit, so
    // every frame takes 20 + 10 ms instead of 80 + 10 ms.
    const Scenario sc = box_beside();
    const PipelineGraph g = fastpath_trio();
    const RunTrace base = run_simulation(sc, g, SimConfig{}, 1);
    SimConfig fast;
    fast.mitigation.fastpath = true;
    fast.mitigation.deadline_cap = 50_ms;
    const RunTrace treat = run_simulation(sc, g, fast, 1);
    for (const auto& f : base.frames) CHECK(f.e2e == 90_ms);
    for (const auto& f : treat.frames) CHECK(f.e2e == 30_ms);
    const CompareReport r = compare_runs(base, treat);
    CHECK(r.matched_frames == 10);
    CHECK(r.worst_delta_us == -60'000);
    CHECK(r.mean_delta_us == -60'000);
    CHECK(r.faster_frames == 10);
    CHECK(r.node_mean_delta_us.at("prediction") == -60'000);
    CHECK(r.node_mean_delta_us.at("planning") == 0);
}

TEST_CASE("CDF rows") {
    const auto rows = cdf_rows(us({30, 10, 20}));
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].latency_us == 10);
    CHECK(rows[0].fraction == doctest::Approx(1.0 / 3));
    CHECK(rows[2].fraction == 1.0);
    CHECK(cdf_csv(us({10, 20, 30})) == "latency_us,cumulative_fraction\n10,0.333333\n20,0.666667\n30,1.000000\n");

    const auto single = cdf_rows(us({42}));
    REQUIRE(single.size() == 1);
    CHECK(single[0].fraction == 1.0);

    const auto dup = cdf_rows(us({5, 5, 9}));
    REQUIRE(dup.size() == 2);
    CHECK(dup[0].fraction == doctest::Approx(2.0 / 3));
}

TEST_CASE("CDF export is monotone and reloads") {
    RandomStream rng(4, "cdf");
    std::vector<SimTime> samples;
    for (int i = 0; i < 2000; ++i) samples.push_back(SimTime::from_us(static_cast<std::int64_t>(rng.next_u64() % 300)));
    const auto path = (std::filesystem::temp_directory_path() / "colasim_cdf.csv").string();
    export_cdf(samples, path);
    const auto rows = load_cdf(path);
    REQUIRE(!rows.empty());
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i].latency_us > rows[i - 1].latency_us);
        CHECK(rows[i].fraction >= rows[i - 1].fraction);
    }
    CHECK(rows.back().fraction == 1.0);
    CHECK_THROWS(export_cdf(samples, "/nonexistent-dir/x/cdf.csv"));
}

}  // TEST_SUITE
