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

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "colasim/scenario.hpp"
#include "colasim/sim_time.hpp"

namespace colasim {

/// Safety-envelope parameters. The body dimensions turn center positions
/// into bumper-to-bumper and side-to-side gaps.
struct RssParams {
    SimTime response_time = SimTime::from_us(100'000);
    double a_max_accel = 2.0;  // m/s^2
    double a_min_brake = 4.0;  // m/s^2
    double a_max_brake = 8.0;  // m/s^2
    double lateral_mu = 0.5;   // m
    double body_length_m = 4.5;
    double body_width_m = 1.8;

    bool operator==(const RssParams&) const = default;
};

std::vector<std::string> validate_rss(const RssParams& p);
RssParams rss_from_json(const json& j, const std::string& path);
json rss_to_json(const RssParams& p);

/// Minimum safe following distance for a rear vehicle at v_rear behind a
/// front vehicle at v_front (speeds in m/s, result in m, never negative).
double rss_longitudinal_min_distance(double v_rear, double v_front, const RssParams& p);

/// How much the longitudinal gap shrinks over t while the ego holds its speed
/// and the obstacle keeps its current acceleration (velocity clamped at 0).
/// assumed_ego_decel applies only after the reaction, so it does not enter
/// the closure itself.
double closure_distance(const AgentState& ego, const AgentState& obstacle, SimTime t, double assumed_ego_decel);

struct BudgetDerivation {
    AgentState ego;
    AgentState obstacle;
    double d_buffer_m = 0.0;
    double assumed_ego_decel = 0.0;
};

/// Reaction-time budget: the instant at which the closure first reaches
/// d_buffer, on a 1 ms grid. nullopt means the closure stays below the buffer
/// through the whole horizon.
struct ReactionBudget {
    std::optional<SimTime> budget;
    BudgetDerivation derivation;

    bool unbounded() const { return !budget.has_value(); }
};

ReactionBudget reaction_budget(const AgentState& ego, const AgentState& obstacle, double d_buffer_m,
                               const RssParams& p, SimTime horizon);

enum class SafetyLevel { safe, violation, collision };
std::string_view to_string(SafetyLevel level);
SafetyLevel parse_safety_level(std::string_view s);

struct SafetyStatus {
    SafetyLevel level = SafetyLevel::safe;
    double longitudinal_gap = 0.0;
    double lateral_gap = 0.0;
};

struct Gaps {
    double longitudinal = 0.0;  // bumper to bumper, negative when bodies overlap
    double lateral = 0.0;
};

Gaps measure_gaps(const AgentState& ego, const AgentState& obstacle, const RssParams& p);

/// True for obstacles ahead of the ego whose lateral gap is inside the
/// lateral margin.
bool in_ego_path(const AgentState& ego, const AgentState& obstacle, const RssParams& p);

/// Collision when both gaps are <= 0; violation when an in-path obstacle is
/// closer than rss_longitudinal_min_distance + d_buffer_m.
SafetyStatus check_safety(const AgentState& ego, const AgentState& obstacle, const RssParams& p, double d_buffer_m);

/// Distance the ego may still close before an in-path obstacle enters the
/// violation threshold; nullopt for obstacles outside the ego path.
std::optional<double> buffer_slack(const AgentState& ego, const AgentState& obstacle, const RssParams& p,
                                   double d_buffer_m);

struct DeadlinePolicy {
    SimTime cap = SimTime::from_us(2'000'000);
    SimTime horizon = SimTime::from_us(10'000'000);
};

/// Budget for a live obstacle: zero inside the violation threshold,
/// unbounded outside the ego path, otherwise reaction_budget over the slack.
ReactionBudget object_budget(const AgentState& ego, const AgentState& obstacle, double d_buffer_m,
                             const RssParams& p, SimTime horizon);

/// now + budget, with the budget capped at policy.cap (unbounded maps to the cap).
SimTime object_deadline(SimTime now, const AgentState& ego, const AgentState& obstacle, double d_buffer_m,
                        const RssParams& p, const DeadlinePolicy& policy);

// Scenario latency requirements (vehicle following and cut-in table).

enum class RequirementKind { vehicle_following, encroaching_cut_in, occluded_cut_in };

struct RequirementScenario {
    std::string label;
    RequirementKind kind = RequirementKind::vehicle_following;
    double ego_speed_kmh = 0.0;
    double distance_m = 0.0;
};

/// The two free parameters behind the requirement table: the fraction of
/// the initial distance usable as buffer, and the deceleration of a braking
/// lead (following and encroaching cut-in). Occluded obstacles are static.
struct RequirementCalibration {
    double buffer_fraction = 0.3;
    double lead_decel_mps2 = 60.0;
};

ReactionBudget requirement_budget(const RequirementScenario& sc, const RequirementCalibration& cal,
                                  const RssParams& p, SimTime horizon = SimTime::from_us(10'000'000));

struct RequirementTarget {
    RequirementScenario scenario;
    double latency_ms = 0.0;
};

/// Deterministic coarse-to-fine grid search minimizing the summed squared
/// log ratio between predicted and target budgets.
RequirementCalibration calibrate_requirements(std::span<const RequirementTarget> targets, const RssParams& p);

}  // namespace colasim
