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
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "colasim/json_util.hpp"
#include "colasim/random.hpp"
#include "colasim/scenario.hpp"
#include "colasim/sim_time.hpp"

namespace colasim {

/// Object counts per AgentKind, indexed like kAgentKinds.
using KindCounts = std::array<std::int64_t, 3>;

inline std::int64_t& count_of(KindCounts& c, AgentKind k) { return c[static_cast<std::size_t>(k)]; }
inline std::int64_t count_of(const KindCounts& c, AgentKind k) { return c[static_cast<std::size_t>(k)]; }
inline std::int64_t total_count(const KindCounts& c) { return c[0] + c[1] + c[2]; }

struct NoiseModel {
    enum class Kind { none, lognormal, uniform };
    Kind kind = Kind::none;
    double sigma = 0.0;  // lognormal: multiplicative, median-preserving
    SimTime jitter;      // uniform: additive in [-jitter, +jitter]

    bool operator==(const NoiseModel&) const = default;
};

/// Additive cache-contention term: slope * misses, where misses grow
/// linearly with the payload size.
struct ContentionModel {
    double slope_us_per_miss = 85.36;
    double base_misses = 0.0;
    double misses_per_kib = 0.0;

    bool operator==(const ContentionModel&) const = default;
};

/// Linear latency predictor Σ cost_kind · count_kind + offset, with an
/// optional affine lookahead term, stochastic noise, and a contention
/// add-on. Results never drop below `floor`.
struct LatencyModel {
    std::array<SimTime, 3> per_kind_cost{};
    SimTime offset;
    SimTime floor = SimTime::from_us(1);
    NoiseModel noise;
    std::optional<ContentionModel> contention;
    std::optional<double> lookahead_cost_us_per_m;

    static LatencyModel fixed(SimTime latency);

    bool operator==(const LatencyModel&) const = default;
};

std::vector<std::string> validate_latency_model(const LatencyModel& m, const std::string& where);

/// Noiseless, contention-free prediction.
SimTime predict_latency(const LatencyModel& m, const KindCounts& counts, std::optional<double> lookahead_m = {});

double contention_misses(const ContentionModel& c, std::size_t payload_bytes);

/// predict_latency with noise and contention applied; the draw sequence is
/// fixed by the stream.
SimTime sample_latency(const LatencyModel& m, const KindCounts& counts, std::optional<double> lookahead_m,
                       std::size_t payload_bytes, RandomStream& stream);

bool is_stochastic(const LatencyModel& m);

LatencyModel latency_from_json(const json& j, const std::string& path);
json latency_to_json(const LatencyModel& m);

}  // namespace colasim
