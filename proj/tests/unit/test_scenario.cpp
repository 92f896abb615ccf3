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

#include <cmath>
#include <filesystem>
#include <string>

#include "colasim/scenario.hpp"

using namespace colasim;
using namespace colasim::literals;

namespace {

const std::string kFixtures = COLASIM_FIXTURES;

std::string temp_file(const std::string& name, const std::string& text) {
    const auto path = std::filesystem::temp_directory_path() / ("colasim_scn_" + name);
    write_text_file(path.string(), text);
    return path.string();
}

TrajectorySpec straight(double v0, double a0) { return TrajectorySpec{AgentState{0, 0, v0, a0, 1}, {}, {}}; }

// Forward-Euler with 1 ms steps and the same stop-at-zero rule.
double euler_displacement(const TrajectorySpec& traj, SimTime t) {
    double s = 0.0, v = traj.initial.v;
    double a = traj.initial.a;
    std::size_t seg = 0;
    const double dt = 1e-3;
    for (std::int64_t i = 0; i < t.us() / 1000; ++i) {
        const SimTime now = SimTime::from_us(i * 1000);
        while (seg < traj.segments.size() && traj.segments[seg].start <= now) a = traj.segments[seg++].accel;
        const double v_next = v + a * dt;
        if (v_next < 0.0) {
            const double t_stop = v / -a;
            s += v * t_stop + 0.5 * a * t_stop * t_stop;
            v = 0.0;
            continue;
        }
        s += 0.5 * (v + v_next) * dt;
        v = v_next;
    }
    return s;
}

}  // namespace

TEST_SUITE("scenario") {

TEST_CASE("kinematics examples") {
    const auto braking = straight(10.0, -5.0);
    auto st = agent_state_at(braking, 1000_ms);
    CHECK(st.v == doctest::Approx(5.0));
    CHECK(st.s == doctest::Approx(7.5));

    st = agent_state_at(braking, 3000_ms);
    CHECK(st.v == 0.0);
    CHECK(st.s == doctest::Approx(10.0));

    const auto cruising = straight(12.0, 0.0);
    st = agent_state_at(cruising, 7300_ms);
    CHECK(st.v == 12.0);
    CHECK(st.s == doctest::Approx(12.0 * 7.3));
}

TEST_CASE("stopped agent resumes only on a positive segment") {
    TrajectorySpec t = straight(4.0, -2.0);
    t.segments.push_back({SimTime::from_ms(3000), 1.0, std::nullopt});
    CHECK(agent_state_at(t, 2500_ms).v == 0.0);
    CHECK(agent_state_at(t, 2500_ms).s == doctest::Approx(4.0));
    CHECK(agent_state_at(t, 4000_ms).v == doctest::Approx(1.0));
}

TEST_CASE("lane segments move the agent laterally") {
    TrajectorySpec t{AgentState{0, 2 * kLaneWidthM, 10, 0, 2}, {{SimTime::from_ms(500), 0.0, 1}}, {}};
    CHECK(agent_state_at(t, 400_ms).lane == 2);
    const auto after = agent_state_at(t, 600_ms);
    CHECK(after.lane == 1);
    CHECK(after.l == doctest::Approx(kLaneWidthM));
}

TEST_CASE("closed form matches a 1 ms forward-Euler oracle within 1 cm over 30 s") {
    for (const char* name : {"vehicle_following", "occluded_pedestrian", "mixed_long"}) {
        const Scenario sc = load_scenario(kFixtures + "/scenarios/" + name + ".json");
        for (const auto& a : sc.agents) {
            for (std::int64_t ms : {1000, 2999, 3000, 3001, 7777, 15000, 30000}) {
                const SimTime t = SimTime::from_ms(ms);
                const double closed = agent_state_at(a.trajectory, t).s - a.trajectory.initial.s;
                CHECK(std::abs(closed - euler_displacement(a.trajectory, t)) < 0.01);
            }
        }
    }
}

TEST_CASE("trajectory is continuous at segment boundaries and the stop time") {
    TrajectorySpec t = straight(10.0, 0.0);
    t.segments.push_back({SimTime::from_ms(1000), -5.0, std::nullopt});
    for (SimTime at : {1000_ms, 3000_ms}) {
        const auto before = agent_state_at(t, at - 1_us);
        const auto after = agent_state_at(t, at + 1_us);
        CHECK(std::abs(before.s - after.s) < 1e-4);
        CHECK(std::abs(before.v - after.v) < 1e-4);
    }
}

TEST_CASE("minimal file loads with no agents") {
    const auto path = temp_file("minimal.json", R"({"format": 1, "ego": {"s_m": 0, "v_mps": 5, "lane": 1},
        "agents": [], "duration_us": 1000000, "d_buffer_m": 1.0})");
    const Scenario sc = load_scenario(path);
    CHECK(sc.agents.empty());
    CHECK(sc.duration == 1000_ms);
}

TEST_CASE("load errors") {
    const std::string agent = R"({"id": "dup", "kind": "vehicle", "initial": {"s_m": 10, "v_mps": 5, "lane": 1}})";
    const auto dup = temp_file("dup.json", R"({"format": 1, "ego": {"s_m": 0, "v_mps": 5, "lane": 1}, "agents": [)" +
                                               agent + "," + agent + R"(], "duration_us": 1000000, "d_buffer_m": 1})");
    try {
        load_scenario(dup);
        FAIL("expected an error");
    } catch (const std::exception& e) {
        CHECK(std::string(e.what()).find("dup") != std::string::npos);
    }

    const auto unknown = temp_file("unknown.json", R"({"format": 1, "ego": {"s_m": 0, "v_mps": 5, "lane": 1},
        "agents": [], "duration_us": 1000000, "d_buffer_m": 1, "weather": "rain"})");
    CHECK_THROWS_AS(load_scenario(unknown), ParseError);

    const auto negative = temp_file("negative.json", R"({"format": 1, "ego": {"s_m": 0, "v_mps": 5, "lane": 1},
        "agents": [], "duration_us": -5, "d_buffer_m": 1})");
    CHECK_THROWS(load_scenario(negative));

    const auto unordered = temp_file("unordered.json", R"({"format": 1, "ego": {"s_m": 0, "v_mps": 5, "lane": 1},
        "agents": [{"id": "a", "kind": "vehicle", "initial": {"s_m": 10, "v_mps": 5, "lane": 1},
                    "segments": [{"start_us": 500, "a_mps2": 1}, {"start_us": 400, "a_mps2": 0}]}],
        "duration_us": 1000000, "d_buffer_m": 1})");
    CHECK_THROWS_AS(load_scenario(unordered), ScenarioError);

    CHECK_THROWS_AS(load_scenario(kFixtures + "/scenarios/does_not_exist.json"), ParseError);
}

TEST_CASE("vehicle-following fixture round-trips") {
    const Scenario sc = load_scenario(kFixtures + "/scenarios/vehicle_following.json");
    CHECK(sc.hazards.size() == 1);
    const Scenario again = scenario_from_json(scenario_to_json(sc));
    CHECK(again == sc);
    CHECK(scenario_hash(again) == scenario_hash(sc));
}

TEST_CASE("visibility by range and occlusion") {
    Scenario sc;
    sc.ego = AgentState{0, 0, 0, 0, 1};
    sc.duration = 10'000_ms;
    sc.agents.push_back({"late", AgentKind::pedestrian, {AgentState{5, 0, 0, 0, 1}, {}, 3000_ms}});
    sc.agents.push_back({"far", AgentKind::vehicle, {AgentState{30, 0, 0, 0, 1}, {}, {}}});
    sc.agents.push_back({"near", AgentKind::vehicle, {AgentState{20, 0, 0, 0, 1}, {}, {}}});
    auto ids = [&](SimTime t) {
        std::vector<std::string> out;
        for (const auto& v : visible_agents(sc, t, 25.0)) out.push_back(v.id);
        return out;
    };
    CHECK(ids(2000_ms) == std::vector<std::string>{"near"});
    CHECK(ids(3000_ms) == std::vector<std::string>{"late", "near"});
}

TEST_CASE("occluded pedestrian appears exactly at visible_from") {
    const Scenario sc = load_scenario(kFixtures + "/scenarios/occluded_pedestrian.json");
    const SimTime from = sc.find_agent("ped")->trajectory.visible_from;
    auto has_ped = [&](SimTime t) {
        for (const auto& v : visible_agents(sc, t, 60.0)) {
            if (v.id == "ped") return true;
        }
        return false;
    };
    CHECK_FALSE(has_ped(from - 1_us));
    CHECK(has_ped(from));
}

TEST_CASE("traffic generation") {
    RoadSpec road;
    CHECK(generate_traffic(0.0, 42, road).empty());
    const auto a = generate_traffic(5.0, 42, road);
    const auto b = generate_traffic(5.0, 42, road);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].kind == b[i].kind);
        CHECK(a[i].trajectory == b[i].trajectory);
    }
}

TEST_CASE("traffic density: Monte Carlo mean count within 25 m") {
    RoadSpec road;
    const AgentState ego{road.ego_s, road.ego_l, road.ego_speed, 0.0, road.ego_lane};
    double total = 0.0;
    const int seeds = 1000;
    for (int seed = 0; seed < seeds; ++seed) {
        for (const auto& g : generate_traffic(5.0, static_cast<std::uint64_t>(seed), road)) {
            if (planar_distance(ego, g.trajectory.initial) <= road.radius_m) total += 1.0;
        }
    }
    const double mean = total / seeds;
    CHECK(mean >= 4.5);
    CHECK(mean <= 5.5);
}

TEST_CASE("generated traffic keeps out of the ego lane and validates") {
    const Scenario base = load_scenario(kFixtures + "/scenarios/open_road.json");
    Scenario sc = base;
    add_traffic(sc, generate_traffic(8.0, 3, road_for(base)));
    CHECK(validate_scenario(sc).empty());
    for (const auto& a : sc.agents) CHECK(a.trajectory.initial.lane != base.ego.lane);
}

}  // TEST_SUITE
