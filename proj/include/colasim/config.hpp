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
#include <string>
#include <vector>

#include "colasim/json_util.hpp"
#include "colasim/pipeline.hpp"
#include "colasim/safety.hpp"
#include "colasim/sim_time.hpp"

namespace colasim {

struct ProcessorGroup {
    std::string name;
    int workers = 1;
    std::vector<std::string> nodes;
    std::optional<SimTime> budget;  // release-to-completion bound for pinned tasks

    bool operator==(const ProcessorGroup&) const = default;
};

struct MitigationConfig {
    bool fastpath = false;
    double radius_m = 20.0;
    bool proactive = false;
    bool stealing = false;
    double safety_factor = 1.25;
    SimTime deadline_cap = SimTime::from_us(2'000'000);
    bool extra_worker = false;

    bool operator==(const MitigationConfig&) const = default;
};

struct ControlConfig {
    SimTime response_margin = SimTime::from_us(2'000'000);
    double brake_mps2 = 6.0;

    bool operator==(const ControlConfig&) const = default;
};

/// Synthetic traffic added on top of the scenario agents.
struct TrafficConfig {
    double density = 0.0;
    double radius_m = 25.0;
    std::array<double, 3> kind_mix{0.7, 0.2, 0.1};

    bool operator==(const TrafficConfig&) const = default;
};

/// Everything the engine needs besides the scenario and the graph.
struct SimConfig {
    std::vector<ProcessorGroup> groups;  // empty: one single-worker group per node
    RssParams rss;
    MitigationConfig mitigation;
    ControlConfig control;
    SimTime tick = SimTime::from_us(10'000);
    SimTime actuation_delay = SimTime::from_us(20'000);
    SimTime budget_horizon = SimTime::from_us(10'000'000);

    bool operator==(const SimConfig&) const = default;
};

struct RunConfig {
    std::string scenario_path;
    std::string pipeline_path;
    std::optional<std::uint64_t> seed;
    std::optional<TrafficConfig> traffic;
    std::string out_dir = "out";
    SimConfig sim;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parses a run configuration; relative paths resolve against base_dir.
RunConfig run_config_from_json(const json& j, const std::string& base_dir);
json run_config_to_json(const RunConfig& c);
RunConfig load_run_config(const std::string& path);

/// Groups after defaulting; every non-sensor node lands in exactly one.
std::vector<ProcessorGroup> resolve_groups(const PipelineGraph& g, const SimConfig& c);

/// Problems with the pairing of a config and a graph.
std::vector<std::string> validate_sim_config(const SimConfig& c, const PipelineGraph& g);

/// True if a run can draw random numbers (noise, cancellation, traffic).
bool needs_seed(const PipelineGraph& g, const RunConfig& c);

}  // namespace colasim
