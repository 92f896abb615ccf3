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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "colasim/config.hpp"
#include "colasim/mitigation.hpp"
#include "colasim/pipeline.hpp"
#include "colasim/safety.hpp"
#include "colasim/scenario.hpp"
#include "colasim/sim_time.hpp"

namespace colasim {

class EngineError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class SpanKind { normal, fastpath, residual, precompute };
std::string_view to_string(SpanKind k);
SpanKind parse_span_kind(std::string_view s);

/// One execution of a node on a worker. Sensor captures are zero-length
/// spans on worker "-".
struct SpanRecord {
    std::string node;
    std::uint64_t exec = 0;  // per-node execution counter
    std::string sensor;      // lineage root
    std::uint64_t sensor_seq = 0;
    SimTime release;  // became ready
    SimTime start;
    SimTime end;
    std::string worker;  // "<group>/<index>"
    bool guest = false;  // stolen onto another group
    SpanKind kind = SpanKind::normal;
    std::int64_t objects = 0;
    SimTime saved;  // proactive saving applied

    SimTime duration() const { return end - start; }
    bool operator==(const SpanRecord&) const = default;
};

struct PathStep {
    std::string node;
    PathChoice choice = PathChoice::normal;

    bool operator==(const PathStep&) const = default;
};

/// One frame reaching a sink node.
struct FrameRecord {
    std::string sensor;
    std::uint64_t seq = 0;
    std::string sink;
    SimTime sensor_ts;
    SimTime done;
    SimTime e2e;
    SimTime module;
    SimTime bubble;
    bool fastpath = false;  // some step on the lineage took the fastpath
    bool partial = false;
    bool in_radius = false;  // carries an object inside the criticality radius
    std::int64_t objects = 0;
    SimTime message_deadline;
    std::vector<std::string> object_ids;
    std::vector<std::string> in_radius_ids;
    std::vector<PathStep> path;

    bool operator==(const FrameRecord&) const = default;
};

/// Reaction-time decomposition of one hazard. reacted == false is the
/// no-reaction marker; the timing fields are then zero.
struct ReactionRecord {
    std::string label;
    std::string agent_id;
    SimTime t0;
    SimTime t1;
    SimTime t_sensor;
    SimTime t_module;
    SimTime t_bubble;
    bool reacted = false;
    bool in_radius = false;
    std::string sensor;
    std::uint64_t sensor_seq = 0;
    std::vector<PathStep> path;

    SimTime reaction() const { return t1 - t0; }
    bool operator==(const ReactionRecord&) const = default;
};

struct SafetySample {
    SimTime t;
    SafetyLevel level = SafetyLevel::safe;
    std::optional<double> min_gap_m;  // nearest in-path obstacle
    std::string agent;                // agent behind the worst status
    double ego_s = 0.0;
    double ego_v = 0.0;

    bool operator==(const SafetySample&) const = default;
};

enum class DecisionKind { hold, brake, lane_change };
std::string_view to_string(DecisionKind k);
DecisionKind parse_decision_kind(std::string_view s);

struct Decision {
    DecisionKind kind = DecisionKind::hold;
    double brake_mps2 = 0.0;  // positive magnitude
    int lane_dir = 0;         // -1 or +1

    static Decision hold() { return {}; }
    static Decision brake(double level) { return {DecisionKind::brake, level, 0}; }
    static Decision lane_change(int dir) { return {DecisionKind::lane_change, 0.0, dir}; }
    bool operator==(const Decision&) const = default;
};

struct DecisionRecord {
    SimTime t;
    SimTime effective;
    std::string node;
    Decision decision;
    std::string cause;  // object that triggered a brake

    bool operator==(const DecisionRecord&) const = default;
};

struct BudgetMiss {
    std::string group;
    std::string node;
    std::uint64_t exec = 0;
    SimTime release;
    SimTime end;
    SimTime budget;

    bool operator==(const BudgetMiss&) const = default;
};

struct ProactiveRecord {
    std::string node;
    SimTime arrival;
    SimTime trigger;
    SimTime saved;
    bool cancelled = false;

    bool operator==(const ProactiveRecord&) const = default;
};

struct WorkerUsage {
    std::string worker;
    SimTime busy;

    bool operator==(const WorkerUsage&) const = default;
};

struct RunTrace {
    std::string scenario_name;
    std::string scenario_hash;
    std::string pipeline_name;
    std::uint64_t seed = 0;
    SimTime duration;
    SimConfig config;

    std::vector<SpanRecord> spans;
    std::vector<FrameRecord> frames;
    std::vector<ReactionRecord> reactions;
    std::vector<SafetySample> safety;
    std::vector<DecisionRecord> decisions;
    std::vector<BudgetMiss> budget_misses;
    std::vector<ProactiveRecord> proactive;
    std::vector<WorkerUsage> workers;
    TrajectorySpec ego;

    std::int64_t violations = 0;  // safety ticks whose worst status is a violation
    std::int64_t collisions = 0;  // collision episodes, counted per agent
    std::int64_t dropped_messages = 0;
    std::int64_t steals = 0;

    double busy_fraction() const;
    bool operator==(const RunTrace&) const = default;
};

/// Runs the scenario through the graph until scenario.duration.
RunTrace run_simulation(const Scenario& scenario, const PipelineGraph& graph, const SimConfig& config,
                        std::uint64_t seed);

/// Appends the decision as a new ego segment at t + actuation_delay.
/// A segment already starting at or after that instant is replaced.
TrajectorySpec apply_control(const TrajectorySpec& ego, const Decision& decision, SimTime t, SimTime actuation_delay);

/// Reaction for one hazard from the sink frames: T1 is the first frame
/// captured at or after T0 that carries the hazard agent. The graph supplies
/// the capture pattern of the root sensor.
ReactionRecord measure_reaction(const RunTrace& trace, const PipelineGraph& graph, const HazardEvent& hazard);

}  // namespace colasim
