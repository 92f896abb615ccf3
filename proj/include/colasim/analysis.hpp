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
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "colasim/engine.hpp"
#include "colasim/json_util.hpp"
#include "colasim/sim_time.hpp"

namespace colasim {

class AnalysisError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct LatencyStats {
    std::int64_t count = 0;
    SimTime min;
    SimTime mean;  // floor of the arithmetic mean
    SimTime p50;
    SimTime p95;
    SimTime p99;
    SimTime max;

    bool operator==(const LatencyStats&) const = default;
};

/// Nearest-rank percentile: the ceil(percent/100 * N)-th smallest sample.
SimTime nearest_rank(std::span<const SimTime> sorted, int percent);

/// Throws AnalysisError on an empty sample set.
LatencyStats compute_stats(std::span<const SimTime> samples);
json stats_to_json(const LatencyStats& s);

/// Ranks starting at 1, ties share their average rank.
std::vector<double> average_ranks(std::span<const double> values);
double spearman(std::span<const double> x, std::span<const double> y);

/// Spearman rho between density and mean latency; needs >= 3 points.
double density_correlation(const std::vector<std::pair<double, double>>& runs);

struct SafetyReport {
    std::int64_t violations = 0;
    std::int64_t collisions = 0;
    std::int64_t no_reaction = 0;
    std::optional<double> min_gap_m;

    bool operator==(const SafetyReport&) const = default;
};

SafetyReport safety_report(const RunTrace& trace);

/// End-to-end latencies of every sink frame, in trace order.
std::vector<SimTime> e2e_samples(const RunTrace& trace);

/// Stats, per-node span stats, reactions, safety and scheduling counters.
json run_report(const RunTrace& trace);

struct CompareReport {
    std::string scenario_hash;
    std::int64_t matched_frames = 0;
    std::int64_t mean_delta_us = 0;
    std::int64_t p99_delta_us = 0;
    std::int64_t worst_delta_us = 0;
    std::int64_t faster_frames = 0;
    std::int64_t slower_frames = 0;
    std::int64_t violations_delta = 0;
    std::int64_t collisions_delta = 0;
    std::int64_t no_reaction_delta = 0;
    std::map<std::string, std::int64_t> node_mean_delta_us;      // span duration
    std::map<std::string, std::int64_t> reaction_delta_us;       // by hazard label, both reacted

    bool operator==(const CompareReport&) const = default;
};

/// Deltas are treatment minus baseline over frames present in both runs,
/// keyed by (sensor, seq, sink). Throws AnalysisError if the scenario
/// hashes differ.
CompareReport compare_runs(const RunTrace& baseline, const RunTrace& treatment);
json compare_to_json(const CompareReport& r);
CompareReport compare_from_json(const json& j);

struct CdfRow {
    std::int64_t latency_us = 0;
    double fraction = 0.0;
};

std::vector<CdfRow> cdf_rows(std::span<const SimTime> samples);
std::string cdf_csv(std::span<const SimTime> samples);
/// Throws AnalysisError for empty samples, ParseError if the file cannot be written.
void export_cdf(std::span<const SimTime> samples, const std::string& path);
std::vector<CdfRow> load_cdf(const std::string& path);

}  // namespace colasim
