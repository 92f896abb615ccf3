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

#include "colasim/mitigation.hpp"

#include <algorithm>
#include <cmath>

namespace colasim {

KindCounts count_kinds(const std::vector<ObjectSnapshot>& objects) {
    KindCounts c{};
    for (const auto& o : objects) ++count_of(c, o.kind);
    return c;
}

SimTime message_deadline(const std::vector<ObjectSnapshot>& objects, SimTime base, SimTime cap) {
    if (objects.empty()) return base + cap;
    SimTime d = objects.front().deadline;
    for (const auto& o : objects) d = std::min(d, o.deadline);
    return d;
}

std::string_view to_string(PathChoice p) { return p == PathChoice::fastpath ? "fastpath" : "normal"; }

PathDecision choose_path(SimTime normal_predicted, SimTime message_deadline, SimTime now, SimTime downstream_estimate) {
    PathDecision d;
    d.normal_predicted = normal_predicted;
    d.remaining_us = SimTime::signed_diff(message_deadline, now) - downstream_estimate.us();
    const bool fits = d.remaining_us > 0 && normal_predicted.us() <= d.remaining_us;
    d.choice = fits ? PathChoice::normal : PathChoice::fastpath;
    return d;
}

PartialSplit partial_update(const std::vector<ObjectSnapshot>& objects, double radius_m) {
    PartialSplit out;
    for (const auto& o : objects) {
        (o.distance_m <= radius_m ? out.critical : out.residual).push_back(o);
    }
    std::stable_sort(out.critical.begin(), out.critical.end(),
                     [](const ObjectSnapshot& a, const ObjectSnapshot& b) { return a.deadline < b.deadline; });
    return out;
}

SimTime fastpath_planning_latency(const LatencyModel& m, const KindCounts& counts, double fast_lookahead_m) {
    return predict_latency(m, counts, fast_lookahead_m);
}

SimTime proactive_saving(SimTime precompute_cost, SimTime arrival, SimTime trigger, bool cancelled) {
    if (cancelled || trigger < arrival) return SimTime::zero();
    return std::min(precompute_cost, trigger - arrival);
}

Admission steal_admission(const StealRequest& req, const HostState& host) {
    SimTime least = SimTime::zero();
    if (!host.worker_loads.empty()) least = *std::min_element(host.worker_loads.begin(), host.worker_loads.end());
    if (least + req.predicted_guest_cost > host.budget) return Admission::reject;
    if (req.predicted_guest_cost + host.reserve > host.budget) return Admission::reject;
    return Admission::admit;
}

SimTime inflate(SimTime predicted, double safety_factor) {
    return SimTime::from_us(static_cast<std::int64_t>(std::ceil(static_cast<double>(predicted.us()) * safety_factor)));
}

}  // namespace colasim
