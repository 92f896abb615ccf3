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

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "colasim/json_util.hpp"
#include "colasim/sim_time.hpp"

namespace colasim {

enum class AgentKind { vehicle, pedestrian, cyclist };

inline constexpr std::array<AgentKind, 3> kAgentKinds{AgentKind::vehicle, AgentKind::pedestrian,
                                                      AgentKind::cyclist};

std::string_view to_string(AgentKind kind);
AgentKind parse_agent_kind(std::string_view name);  // throws ParseError

/// Lateral distance between adjacent lane centers.
inline constexpr double kLaneWidthM = 3.5;

/// Kinematic state in the road frame: s runs along the road, l across it.
/// Velocity and acceleration are longitudinal.
struct AgentState {
    double s = 0.0;
    double l = 0.0;
    double v = 0.0;
    double a = 0.0;
    int lane = 0;

    bool operator==(const AgentState&) const = default;
};

/// From `start` on the agent accelerates at `accel`; an optional lane index
/// moves the agent to that lane instantly at `start`.
struct Segment {
    SimTime start;
    double accel = 0.0;
    std::optional<int> lane;

    bool operator==(const Segment&) const = default;
};

struct TrajectorySpec {
    AgentState initial;             // state at t = 0
    std::vector<Segment> segments;  // strictly increasing start times
    SimTime visible_from;           // undetectable before this instant

    bool operator==(const TrajectorySpec&) const = default;
};

struct AgentSpec {
    std::string id;
    AgentKind kind = AgentKind::vehicle;
    TrajectorySpec trajectory;

    bool operator==(const AgentSpec&) const = default;
};

struct HazardEvent {
    SimTime time;
    std::string agent_id;
    std::string label;

    bool operator==(const HazardEvent&) const = default;
};

struct Scenario {
    std::string name;
    int lane_count = 3;
    AgentState ego;
    std::vector<AgentSpec> agents;
    SimTime duration;
    std::vector<HazardEvent> hazards;
    double d_buffer_m = 1.0;

    const AgentSpec* find_agent(std::string_view id) const;
    bool operator==(const Scenario&) const = default;
};

class ScenarioError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Piecewise constant-acceleration state at t. Velocity never goes below
/// zero: a braking agent stops and stays stopped until a positive
/// acceleration segment begins.
AgentState agent_state_at(const TrajectorySpec& traj, SimTime t);

struct VisibleAgent {
    std::string id;
    AgentKind kind;
    AgentState state;
};

/// Agents with visible_from <= t whose planar distance from the ego is at
/// most sensor_range_m. The ego follows its scenario trajectory (no control).
std::vector<VisibleAgent> visible_agents(const Scenario& scenario, SimTime t, double sensor_range_m);
std::vector<VisibleAgent> visible_agents(const Scenario& scenario, const AgentState& ego, SimTime t,
                                         double sensor_range_m);

double planar_distance(const AgentState& a, const AgentState& b);

/// Checks every Scenario invariant; returns one diagnostic per violation.
std::vector<std::string> validate_scenario(const Scenario& scenario);

// File format: JSON with a required "format": 1 and unit-suffixed keys.
Scenario scenario_from_json(const json& j);
json scenario_to_json(const Scenario& scenario);
Scenario load_scenario(const std::string& path);
void save_scenario(const Scenario& scenario, const std::string& path);

/// Stable content hash of the canonical JSON form.
std::string scenario_hash(const Scenario& scenario);

// Synthetic traffic.

struct RoadSpec {
    int lane_count = 3;
    int ego_lane = 1;
    double ego_s = 0.0;
    double ego_l = kLaneWidthM;
    double ego_speed = 8.0;
    double half_length_m = 150.0;  // agents spawn in [ego_s - h, ego_s + h]
    double radius_m = 25.0;        // density is the expected count inside this radius
    bool avoid_ego_lane = true;
    double speed_jitter_mps = 1.0;
    std::array<double, 3> kind_mix{0.7, 0.2, 0.1};  // vehicle, pedestrian, cyclist
};

struct GeneratedAgent {
    AgentKind kind;
    TrajectorySpec trajectory;
};

/// Seeded synthetic traffic. The expected number of agents within
/// road.radius_m of the ego at t = 0 equals `density`. Vehicles and cyclists
/// use driving lanes and travel near the ego speed; pedestrians walk on the
/// sidewalks (lanes -1 and lane_count).
std::vector<GeneratedAgent> generate_traffic(double density, std::uint64_t seed, const RoadSpec& road);

/// Appends generated agents as "<prefix><index>".
void add_traffic(Scenario& scenario, const std::vector<GeneratedAgent>& traffic,
                 std::string_view prefix = "traffic_");

RoadSpec road_for(const Scenario& scenario);

}  // namespace colasim
