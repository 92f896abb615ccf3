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

#include "colasim/scenario.hpp"

#include <cmath>
#include <set>

namespace colasim {

std::string_view to_string(AgentKind kind) {
    switch (kind) {
        case AgentKind::vehicle: return "vehicle";
        case AgentKind::pedestrian: return "pedestrian";
        case AgentKind::cyclist: return "cyclist";
    }
    return "vehicle";
}

AgentKind parse_agent_kind(std::string_view name) {
    for (AgentKind k : kAgentKinds) {
        if (to_string(k) == name) return k;
    }
    throw ParseError("unknown agent kind '" + std::string(name) + "'");
}

const AgentSpec* Scenario::find_agent(std::string_view id) const {
    for (const auto& a : agents) {
        if (a.id == id) return &a;
    }
    return nullptr;
}

namespace {

// Advances a state by dt seconds under constant acceleration, clamping the
// velocity at zero.
void advance(AgentState& st, double accel, double dt) {
    if (dt <= 0.0) return;
    if (accel < 0.0) {
        if (st.v <= 0.0) {
            st.v = 0.0;
            return;
        }
        const double t_stop = st.v / -accel;
        if (dt >= t_stop) {
            st.s += st.v * st.v / (2.0 * -accel);
            st.v = 0.0;
            return;
        }
    }
    st.s += st.v * dt + 0.5 * accel * dt * dt;
    st.v = std::max(0.0, st.v + accel * dt);
}

void change_lane(AgentState& st, int lane) {
    st.l += static_cast<double>(lane - st.lane) * kLaneWidthM;
    st.lane = lane;
}

}  // namespace

AgentState agent_state_at(const TrajectorySpec& traj, SimTime t) {
    AgentState st = traj.initial;
    double accel = traj.initial.a;
    std::int64_t cursor = 0;
    for (const Segment& seg : traj.segments) {
        if (seg.start > t) break;
        advance(st, accel, static_cast<double>(seg.start.us() - cursor) / 1e6);
        cursor = seg.start.us();
        accel = seg.accel;
        if (seg.lane) change_lane(st, *seg.lane);
    }
    advance(st, accel, static_cast<double>(t.us() - cursor) / 1e6);
    // Report the effective acceleration: zero once stopped under braking.
    st.a = (accel < 0.0 && st.v <= 0.0) ? 0.0 : accel;
    return st;
}

double planar_distance(const AgentState& a, const AgentState& b) { return std::hypot(a.s - b.s, a.l - b.l); }

std::vector<VisibleAgent> visible_agents(const Scenario& scenario, const AgentState& ego, SimTime t,
                                         double sensor_range_m) {
    std::vector<VisibleAgent> out;
    for (const auto& agent : scenario.agents) {
        if (agent.trajectory.visible_from > t) continue;
        AgentState st = agent_state_at(agent.trajectory, t);
        if (planar_distance(ego, st) <= sensor_range_m) out.push_back({agent.id, agent.kind, st});
    }
    return out;
}

std::vector<VisibleAgent> visible_agents(const Scenario& scenario, SimTime t, double sensor_range_m) {
    TrajectorySpec ego{scenario.ego, {}, SimTime::zero()};
    return visible_agents(scenario, agent_state_at(ego, t), t, sensor_range_m);
}

namespace {

void check_state(const AgentState& st, const std::string& where, int lane_count, std::vector<std::string>& out) {
    if (!std::isfinite(st.s) || !std::isfinite(st.l) || !std::isfinite(st.v) || !std::isfinite(st.a)) {
        out.push_back(where + ": non-finite value");
    }
    if (st.v < 0.0) out.push_back(where + ".v_mps: velocity must be >= 0");
    if (st.lane < -1 || st.lane > lane_count) {
        out.push_back(where + ".lane: " + std::to_string(st.lane) + " outside road bounds [-1, " +
                      std::to_string(lane_count) + "]");
    }
}

}  // namespace

std::vector<std::string> validate_scenario(const Scenario& sc) {
    std::vector<std::string> out;
    if (sc.duration <= SimTime::zero()) out.push_back("duration_us: must be > 0");
    if (sc.lane_count < 1) out.push_back("lane_count: must be >= 1");
    if (!(sc.d_buffer_m > 0.0)) out.push_back("d_buffer_m: must be > 0");
    check_state(sc.ego, "ego", sc.lane_count, out);

    std::set<std::string> ids;
    for (std::size_t i = 0; i < sc.agents.size(); ++i) {
        const auto& a = sc.agents[i];
        const std::string where = "agents[" + std::to_string(i) + "]";
        if (a.id.empty()) out.push_back(where + ".id: must not be empty");
        if (!ids.insert(a.id).second) out.push_back(where + ".id: duplicate agent id '" + a.id + "'");
        check_state(a.trajectory.initial, where + ".initial", sc.lane_count, out);
        for (std::size_t k = 0; k < a.trajectory.segments.size(); ++k) {
            const auto& seg = a.trajectory.segments[k];
            const std::string sw = where + ".segments[" + std::to_string(k) + "]";
            if (k > 0 && seg.start <= a.trajectory.segments[k - 1].start) {
                out.push_back(sw + ".start_us: segment start times must be strictly increasing");
            }
            if (!std::isfinite(seg.accel)) out.push_back(sw + ".a_mps2: non-finite");
            if (seg.lane && (*seg.lane < -1 || *seg.lane > sc.lane_count)) {
                out.push_back(sw + ".lane: outside road bounds");
            }
        }
    }
    for (std::size_t i = 0; i < sc.hazards.size(); ++i) {
        const auto& h = sc.hazards[i];
        const std::string where = "hazards[" + std::to_string(i) + "]";
        if (h.time >= sc.duration) out.push_back(where + ".time_us: hazard must occur before duration_us");
        if (!sc.find_agent(h.agent_id)) out.push_back(where + ".agent: unknown agent id '" + h.agent_id + "'");
    }
    return out;
}

RoadSpec road_for(const Scenario& sc) {
    RoadSpec road;
    road.lane_count = sc.lane_count;
    road.ego_lane = sc.ego.lane;
    road.ego_s = sc.ego.s;
    road.ego_l = sc.ego.l;
    road.ego_speed = sc.ego.v;
    return road;
}

}  // namespace colasim
