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

#include <cmath>
#include <numeric>

#include "colasim/random.hpp"
#include "colasim/scenario.hpp"

namespace colasim {

namespace {

std::vector<int> lanes_for(AgentKind kind, const RoadSpec& road) {
    std::vector<int> lanes;
    if (kind == AgentKind::pedestrian) return {-1, road.lane_count};
    for (int k = 0; k < road.lane_count; ++k) {
        if (road.avoid_ego_lane && k == road.ego_lane) continue;
        lanes.push_back(k);
    }
    return lanes;
}

// Probability that an agent placed uniformly in the spawn window of `lane`
// lies within the radius of the ego.
double in_radius_fraction(int lane, const RoadSpec& road) {
    const double dl = static_cast<double>(lane - road.ego_lane) * kLaneWidthM;
    if (std::abs(dl) >= road.radius_m) return 0.0;
    const double chord = 2.0 * std::sqrt(road.radius_m * road.radius_m - dl * dl);
    return std::min(chord, 2.0 * road.half_length_m) / (2.0 * road.half_length_m);
}

}  // namespace

std::vector<GeneratedAgent> generate_traffic(double density, std::uint64_t seed, const RoadSpec& road) {
    std::vector<GeneratedAgent> out;
    if (!(density > 0.0)) return out;

    std::array<std::vector<int>, 3> lanes;
    std::array<double, 3> weight{};
    double coverage = 0.0;
    for (std::size_t k = 0; k < kAgentKinds.size(); ++k) {
        lanes[k] = lanes_for(kAgentKinds[k], road);
        if (lanes[k].empty()) continue;
        weight[k] = std::max(0.0, road.kind_mix[k]);
    }
    const double weight_sum = std::accumulate(weight.begin(), weight.end(), 0.0);
    if (weight_sum <= 0.0) return out;
    for (std::size_t k = 0; k < weight.size(); ++k) {
        weight[k] /= weight_sum;
        if (lanes[k].empty()) continue;
        double mean_fraction = 0.0;
        for (int lane : lanes[k]) mean_fraction += in_radius_fraction(lane, road);
        coverage += weight[k] * mean_fraction / static_cast<double>(lanes[k].size());
    }
    if (coverage <= 0.0) return out;

    RandomStream rng(seed, "traffic");
    const std::uint64_t count = rng.poisson(density / coverage);
    for (std::uint64_t i = 0; i < count; ++i) {
        const double pick = rng.uniform01();
        std::size_t k = 0;
        double acc = 0.0;
        for (std::size_t c = 0; c < weight.size(); ++c) {
            if (weight[c] == 0.0) continue;
            k = c;
            acc += weight[c];
            if (pick < acc) break;
        }
        const AgentKind kind = kAgentKinds[k];
        const auto& choices = lanes[k];
        const int lane = choices[std::min<std::size_t>(choices.size() - 1,
                                                       static_cast<std::size_t>(rng.uniform01() * choices.size()))];
        AgentState st;
        st.lane = lane;
        st.l = road.ego_l + static_cast<double>(lane - road.ego_lane) * kLaneWidthM;
        st.s = road.ego_s + rng.uniform(-road.half_length_m, road.half_length_m);
        if (kind == AgentKind::pedestrian) {
            st.v = rng.uniform(0.5, 1.5);
        } else {
            st.v = std::max(0.0, road.ego_speed + rng.uniform(-road.speed_jitter_mps, road.speed_jitter_mps));
        }
        out.push_back({kind, TrajectorySpec{st, {}, SimTime::zero()}});
    }
    return out;
}

void add_traffic(Scenario& scenario, const std::vector<GeneratedAgent>& traffic, std::string_view prefix) {
    for (std::size_t i = 0; i < traffic.size(); ++i) {
        scenario.agents.push_back({std::string(prefix) + std::to_string(i), traffic[i].kind, traffic[i].trajectory});
    }
}

}  // namespace colasim
