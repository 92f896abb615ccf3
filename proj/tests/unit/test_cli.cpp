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

#include <filesystem>
#include <sstream>
#include <string>

#include "colasim/analysis.hpp"
#include "colasim/commands.hpp"
#include "colasim/trace_io.hpp"

using namespace colasim;
using namespace colasim::literals;

namespace fs = std::filesystem;

namespace {

const std::string kFixtures = COLASIM_FIXTURES;

std::string scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("colasim_cli_" + name);
    fs::remove_all(p);
    return p.string();
}

CliOptions pair(const std::string& scenario, const std::string& pipeline) {
    CliOptions o;
    o.scenario = kFixtures + "/scenarios/" + scenario + ".json";
    o.pipeline = kFixtures + "/pipelines/" + pipeline + ".json";
    return o;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("validate") {
    std::ostringstream out, err;
    CHECK(cmd_validate(pair("vehicle_following", "av_stack"), out, err) == kExitOk);

    std::ostringstream out2, err2;
    CHECK(cmd_validate(pair("vehicle_following", "cyclic"), out2, err2) == kExitValidation);
    CHECK(err2.str().find("cycle: A→B→A") != std::string::npos);

    std::ostringstream out3, err3;
    CHECK(cmd_validate(pair("nope", "av_stack"), out3, err3) == kExitValidation);
    CHECK(err3.str().find("nope.json") != std::string::npos);
}

TEST_CASE("run writes reloadable outputs and one reaction for the following fixture") {
    CliOptions o = pair("vehicle_following", "av_stack");
    o.seed = 7;
    o.out = scratch("run");
    std::ostringstream out, err;
    REQUIRE(cmd_run(o, out, err) == kExitOk);
    CHECK(out.str().rfind("frames=", 0) == 0);
    const RunTrace t = load_trace(*o.out + "/trace.ndjson");
    CHECK(t.reactions.size() == 1);
    const json report = read_json_file(*o.out + "/report.json");
    CHECK(report.at("reactions").size() == 1);
    CHECK(!load_cdf(*o.out + "/cdf.csv").empty());
}

TEST_CASE("paired run writes compare_runs of the two traces") {
    CliOptions o = pair("vehicle_following", "av_stack");
    o.seed = 7;
    o.fastpath = true;
    o.deadline_cap_us = 125'000;
    o.paired = true;
    o.out = scratch("paired");
    std::ostringstream out, err;
    REQUIRE(cmd_run(o, out, err) == kExitOk);
    const RunTrace treat = load_trace(*o.out + "/trace.ndjson");
    const RunTrace base = load_trace(*o.out + "/baseline/trace.ndjson");
    CHECK_FALSE(base.config.mitigation.fastpath);
    CHECK(treat.config.mitigation.fastpath);
    const CompareReport written = compare_from_json(read_json_file(*o.out + "/compare.json"));
    CHECK(written == compare_runs(base, treat));
}

TEST_CASE("deadline cap sweep keeps the worst case under each cap with fastpath") {
    CliOptions o = pair("dense_traffic", "av_stack");
    o.seed = 1;
    o.fastpath = true;
    const PreparedRun base = prepare_run(o);
    const std::vector<double> caps{125, 150, 175, 200};
    const auto rows = run_sweep(base, SweepAxis::deadline_cap, caps, sweep_threads());
    REQUIRE(rows.size() == 4);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].value == caps[i]);
        PreparedRun one = base;
        one.config.sim.mitigation.deadline_cap = SimTime::from_ms(static_cast<std::int64_t>(caps[i]));
        const RunTrace t = run_simulation(one.scenario, one.graph, one.config.sim, one.seed);
        SimTime worst_in_radius = SimTime::zero();
        for (const auto& f : t.frames) {
            if (f.in_radius) worst_in_radius = std::max(worst_in_radius, f.e2e);
        }
        CHECK(worst_in_radius <= one.config.sim.mitigation.deadline_cap);
        CHECK(rows[i].worst_us == compute_stats(e2e_samples(t)).max.us());
    }
    CHECK(sweep_csv(rows).rfind("value,mean_us,p99_us,worst_us,violations\n", 0) == 0);
}

TEST_CASE("sweep argument errors") {
    CliOptions o = pair("open_road", "av_stack");
    o.seed = 1;
    o.out = scratch("sweep_err");
    std::ostringstream out, err;
    CHECK(cmd_sweep(o, "deadline_cap", {125}, out, err) == kExitValidation);
    CHECK(err.str().find(">= 2 values required") != std::string::npos);

    std::ostringstream out2, err2;
    CHECK(cmd_sweep(o, "weather", {1, 2}, out2, err2) == kExitValidation);
    CHECK_THROWS_AS(parse_sweep_axis("weather"), ValidationError);

    CliOptions unseeded = pair("open_road", "av_stack");
    unseeded.out = scratch("sweep_unseeded");
    std::ostringstream out3, err3;
    CHECK(cmd_sweep(unseeded, "density", {0, 2}, out3, err3) == kExitValidation);
}

TEST_CASE("stochastic pipelines require a seed") {
    CliOptions o = pair("vehicle_following", "av_stack");
    o.out = scratch("unseeded");
    std::ostringstream out, err;
    CHECK(cmd_run(o, out, err) == kExitValidation);
    CHECK(err.str().find("seed") != std::string::npos);
}

TEST_CASE("flags override config file values") {
    CliOptions o;
    o.config = kFixtures + "/configs/following_baseline.json";
    o.seed = 99;
    o.fastpath = true;
    const PreparedRun r = prepare_run(o);
    CHECK(r.seed == 99);
    CHECK(r.config.sim.mitigation.fastpath);
}

}  // TEST_SUITE
