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
#include <string>
#include <vector>

#include "colasim/latency.hpp"
#include "colasim/scenario.hpp"
#include "colasim/sim_time.hpp"

namespace colasim {

/// One detected obstacle as carried by a frame message.
struct ObjectSnapshot {
    std::string id;
    AgentKind kind = AgentKind::vehicle;
    AgentState state;  // at observed_ts
    SimTime observed_ts;
    SimTime deadline;
    double distance_m = 0.0;  // from the ego at capture

    bool operator==(const ObjectSnapshot&) const = default;
};

KindCounts count_kinds(const std::vector<ObjectSnapshot>& objects);

/// Earliest object deadline; base + cap when there are no objects.
SimTime message_deadline(const std::vector<ObjectSnapshot>& objects, SimTime base, SimTime cap);

enum class PathChoice { normal, fastpath };
std::string_view to_string(PathChoice p);

struct PathDecision {
    PathChoice choice = PathChoice::normal;
    std::int64_t remaining_us = 0;  // may be negative
    SimTime normal_predicted;
};

/// remaining = deadline - now - downstream; fastpath iff the normal
/// prediction does not fit (remaining <= 0 always takes the fastpath).
PathDecision choose_path(SimTime normal_predicted, SimTime message_deadline, SimTime now, SimTime downstream_estimate);

struct PartialSplit {
    std::vector<ObjectSnapshot> critical;  // within the radius, ascending deadline
    std::vector<ObjectSnapshot> residual;  // the rest, input order
};

PartialSplit partial_update(const std::vector<ObjectSnapshot>& objects, double radius_m);

/// Planning latency with the shortened lookahead.
SimTime fastpath_planning_latency(const LatencyModel& m, const KindCounts& counts, double fast_lookahead_m);

/// Portion of a precomputation finished by the time its node is released.
SimTime proactive_saving(SimTime precompute_cost, SimTime arrival, SimTime trigger, bool cancelled);

struct StealRequest {
    std::string node;
    KindCounts counts{};
    std::string host_group;
    SimTime predicted_guest_cost;
};

/// Predicted state of a candidate host group. worker_loads holds the
/// predicted remaining work per worker; reserve is the largest predicted
/// cost of one host task, which a host release arriving just after the
/// guest starts would have to absorb.
struct HostState {
    SimTime budget;
    std::vector<SimTime> worker_loads;
    SimTime reserve;
};

enum class Admission { admit, reject };

Admission steal_admission(const StealRequest& req, const HostState& host);

/// Scales a prediction by the stealing safety factor, rounding up.
SimTime inflate(SimTime predicted, double safety_factor);

}  // namespace colasim
