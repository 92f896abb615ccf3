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
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "colasim/config.hpp"
#include "colasim/engine.hpp"
#include "colasim/pipeline.hpp"
#include "colasim/scenario.hpp"

namespace colasim {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

/// Command-line values; each one overrides the matching config key.
struct CliOptions {
    std::optional<std::string> config;
    std::optional<std::string> scenario;
    std::optional<std::string> pipeline;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<bool> fastpath;
    std::optional<bool> proactive;
    std::optional<bool> stealing;
    std::optional<std::int64_t> deadline_cap_us;
    bool paired = false;
};

/// A run ready to execute: files loaded, overrides applied, traffic added.
struct PreparedRun {
    RunConfig config;
    Scenario scenario;
    PipelineGraph graph;
    std::uint64_t seed = 0;
};

class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Throws ValidationError naming the first failing check.
// require_seed=false lets validation pass on stochastic pipelines without --seed.
PreparedRun prepare_run(const CliOptions& opts, bool require_seed = true);

/// Returns a copy with traffic regenerated for the given density and seed.
Scenario with_traffic(const Scenario& base, const TrafficConfig& traffic, std::uint64_t seed);

struct RunOutputs {
    std::string trace_path;
    std::string report_path;
    std::string cdf_path;
    std::optional<std::string> compare_path;
};

/// Runs and writes trace.ndjson, report.json and cdf.csv under out_dir.
RunOutputs write_run_outputs(const RunTrace& trace, const std::string& out_dir);
std::string summary_line(const RunTrace& trace);

enum class SweepAxis { deadline_cap, density, seed };
SweepAxis parse_sweep_axis(const std::string& name);  // throws ValidationError

struct SweepRow {
    double value = 0.0;
    std::int64_t mean_us = 0;
    std::int64_t p99_us = 0;
    std::int64_t worst_us = 0;
    std::int64_t violations = 0;
};

/// One run per value, in value order. deadline_cap values are milliseconds.
std::vector<SweepRow> run_sweep(const PreparedRun& base, SweepAxis axis, const std::vector<double>& values,
                                unsigned threads);
std::string sweep_csv(const std::vector<SweepRow>& rows);
/// Worker count from COLA_SIM_THREADS, else the hardware concurrency.
unsigned sweep_threads();

int cmd_validate(const CliOptions& opts, std::ostream& out, std::ostream& err);
int cmd_run(const CliOptions& opts, std::ostream& out, std::ostream& err);
int cmd_sweep(const CliOptions& opts, const std::string& axis, const std::vector<double>& values, std::ostream& out,
              std::ostream& err);
int cmd_compare(const std::string& baseline, const std::string& treatment, const std::optional<std::string>& out_path,
                std::ostream& out, std::ostream& err);

}  // namespace colasim
