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

#include <array>
#include <cmath>

#include "colasim/random.hpp"
#include "colasim/safety.hpp"

using namespace colasim;
using namespace colasim::literals;

namespace {

AgentState at(double s, double v, double a = 0.0) { return AgentState{s, 0.0, v, a, 1}; }

// First 1 ms step at which the closure reaches the buffer, by plain stepping.
std::optional<std::int64_t> stepping_oracle(const AgentState& ego, const AgentState& obs, double buffer,
                                            const RssParams& p, std::int64_t horizon_ms) {
    for (std::int64_t ms = 1; ms <= horizon_ms; ++ms) {
        if (closure_distance(ego, obs, SimTime::from_ms(ms), p.a_min_brake) >= buffer) return ms;
    }
    return std::nullopt;
}

}  // namespace

TEST_SUITE("safety") {

TEST_CASE("RSS minimum distance") {
    RssParams p;
    p.response_time = 100_ms;
    p.a_max_accel = 2.0;
    p.a_min_brake = 4.0;
    p.a_max_brake = 8.0;
    CHECK(rss_longitudinal_min_distance(10.0, 0.0, p) == doctest::Approx(14.015).epsilon(1e-9));
    CHECK(rss_longitudinal_min_distance(0.0, 10.0, p) == 0.0);

    RssParams sym = p;
    sym.response_time = SimTime::zero();
    sym.a_min_brake = sym.a_max_brake = 6.0;
    CHECK(rss_longitudinal_min_distance(12.0, 12.0, sym) == 0.0);
}

TEST_CASE("closure distance") {
    CHECK(closure_distance(at(0, 15), at(20, 10), 100_ms, 4.0) == doctest::Approx(0.5));
    CHECK(closure_distance(at(0, 10), at(20, 10), 5000_ms, 4.0) == 0.0);
    CHECK(closure_distance(at(0, 10), at(20, 10, -6.0), 1000_ms, 4.0) == doctest::Approx(3.0));
}

TEST_CASE("reaction budget examples") {
    RssParams p;
    const auto b = reaction_budget(at(0, 15), at(20, 10), 1.0, p, 10'000_ms);
    REQUIRE(b.budget);
    CHECK(*b.budget == 200_ms);
    CHECK(reaction_budget(at(0, 0), at(100, 0), 1.0, p, 10'000_ms).unbounded());
}

TEST_CASE("bisection agrees with a 1 ms stepping oracle on 1000 random states") {
    RssParams p;
    RandomStream rng(2024, "budget-oracle");
    int compared = 0;
    for (int i = 0; i < 1000; ++i) {
        const AgentState ego = at(0, rng.uniform(0, 30));
        const AgentState obs = at(rng.uniform(5, 80), rng.uniform(0, 30), rng.uniform(-8, 3));
        const double buffer = rng.uniform(0.1, 20);
        const auto b = reaction_budget(ego, obs, buffer, p, 10'000_ms);
        const auto oracle = stepping_oracle(ego, obs, buffer, p, 10'000);
        REQUIRE(b.budget.has_value() == oracle.has_value());
        if (oracle) {
            CHECK(std::llabs(b.budget->us() / 1000 - *oracle) <= 1);
            ++compared;
        }
    }
    CHECK(compared > 100);
}

TEST_CASE("reaction budget is monotone in ego speed and gap") {
    RssParams p;
    RandomStream rng(5, "monotone");
    for (int i = 0; i < 200; ++i) {
        const double v = rng.uniform(0, 25);
        const double buffer = rng.uniform(0.5, 10);
        const AgentState obs = at(40, rng.uniform(0, 20), rng.uniform(-6, 0));
        auto budget_us = [&](double ego_v, double slack) {
            const auto b = reaction_budget(at(0, ego_v), obs, slack, p, 10'000_ms);
            return b.budget ? b.budget->us() : INT64_MAX;
        };
        CHECK(budget_us(v + 2.0, buffer) <= budget_us(v, buffer));
        CHECK(budget_us(v, buffer + 1.0) >= budget_us(v, buffer));
    }
}

TEST_CASE("object deadlines") {
    RssParams p;
    const DeadlinePolicy policy{2000_ms, 10'000_ms};
    // Far static obstacle off the ego path: unbounded, capped.
    AgentState off = at(100, 0);
    off.l = 3 * kLaneWidthM;
    CHECK(object_deadline(1000_ms, at(0, 0), off, 1.0, p, policy) == 3000_ms);

    const AgentState ego = at(0, 12);
    const SimTime near = object_deadline(1000_ms, ego, at(30, 4), 1.0, p, policy);
    const SimTime far = object_deadline(1000_ms, ego, at(45, 4), 1.0, p, policy);
    const auto near_b = object_budget(ego, at(30, 4), 1.0, p, policy.horizon);
    const auto far_b = object_budget(ego, at(45, 4), 1.0, p, policy.horizon);
    REQUIRE(near_b.budget);
    REQUIRE(far_b.budget);
    CHECK(*near_b.budget < *far_b.budget);
    CHECK(near < far);
    CHECK(near == 1000_ms + std::min(*near_b.budget, policy.cap));
}

TEST_CASE("check_safety classification") {
    RssParams p;
    const AgentState ego = at(0, 10);
    const double threshold = rss_longitudinal_min_distance(10, 10, p) + 1.0;
    CHECK(check_safety(ego, at(p.body_length_m, 10), p, 1.0).level == SafetyLevel::collision);
    CHECK(check_safety(ego, at(p.body_length_m + threshold + 0.5, 10), p, 1.0).level == SafetyLevel::safe);
    CHECK(check_safety(ego, at(p.body_length_m + threshold - 1e-6, 10), p, 1.0).level == SafetyLevel::violation);

    AgentState beside = at(p.body_length_m + 1.0, 10);
    beside.l = kLaneWidthM;
    CHECK(check_safety(ego, beside, p, 1.0).level == SafetyLevel::safe);
}

TEST_CASE("violation implies a budget within the response time") {
    RssParams p;
    RandomStream rng(8, "consistency");
    for (int i = 0; i < 500; ++i) {
        const AgentState ego = at(0, rng.uniform(0, 25));
        const AgentState obs = at(rng.uniform(p.body_length_m + 0.1, 60), rng.uniform(0, 25), rng.uniform(-6, 0));
        if (check_safety(ego, obs, p, 1.0).level != SafetyLevel::violation) continue;
        const auto b = object_budget(ego, obs, 1.0, p, 10'000_ms);
        REQUIRE(b.budget);
        CHECK(*b.budget <= p.response_time);
    }
}

TEST_CASE("requirement table ordering after calibration") {
    RssParams p;
    const std::array<RequirementTarget, 4> targets{{
        {{"following_35", RequirementKind::vehicle_following, 35.0, 10.0}, 411.2},
        {{"following_20", RequirementKind::vehicle_following, 20.0, 10.0}, 621.8},
        {{"encroaching", RequirementKind::encroaching_cut_in, 25.0, 4.7}, 235.5},
        {{"occluded", RequirementKind::occluded_cut_in, 25.0, 3.9}, 159.5},
    }};
    const RequirementCalibration cal = calibrate_requirements(targets, p);
    std::array<std::int64_t, 4> us{};
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const auto b = requirement_budget(targets[i].scenario, cal, p);
        REQUIRE(b.budget);
        us[i] = b.budget->us();
    }
    CHECK(us[3] < us[2]);
    CHECK(us[2] < us[0]);
    CHECK(us[0] < us[1]);
}

}  // TEST_SUITE
