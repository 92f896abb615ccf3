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

// cola_sim: validate inputs, run simulations, sweep parameters, compare traces.
//
// Flags override the matching keys of --config.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "colasim/commands.hpp"

namespace {

void add_run_flags(CLI::App* app, colasim::CliOptions& o) {
    app->add_option("--config", o.config, "run configuration (JSON)");
    app->add_option("--scenario", o.scenario, "scenario file");
    app->add_option("--pipeline", o.pipeline, "pipeline file");
    app->add_option("--seed", o.seed, "RNG seed");
    app->add_option("--out", o.out, "output directory");
    app->add_option("--fastpath", o.fastpath, "enable fastpath (true/false)");
    app->add_option("--proactive", o.proactive, "enable proactive processing (true/false)");
    app->add_option("--stealing", o.stealing, "enable work stealing (true/false)");
    app->add_option("--deadline-cap-us", o.deadline_cap_us, "object deadline cap in microseconds");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cola_sim: deadline-aware AV pipeline simulator"};
    app.require_subcommand(1);

    colasim::CliOptions opts;
    std::string axis;
    std::vector<double> values;
    std::string baseline, treatment;
    std::optional<std::string> compare_out;

    auto* validate = app.add_subcommand("validate", "load and check scenario, pipeline and config");
    add_run_flags(validate, opts);

    auto* run = app.add_subcommand("run", "run one simulation and write trace, report and CDF");
    add_run_flags(run, opts);
    run->add_flag("--paired", opts.paired, "also run with mitigations off and write compare.json");

    auto* sweep = app.add_subcommand("sweep", "one run per axis value");
    add_run_flags(sweep, opts);
    sweep->add_option("--axis", axis, "deadline_cap (ms), density or seed")->required();
    sweep->add_option("--values", values, "axis values")->required()->delimiter(',');

    auto* compare = app.add_subcommand("compare", "per-frame deltas between two traces");
    compare->add_option("baseline", baseline, "baseline trace.ndjson")->required();
    compare->add_option("treatment", treatment, "treatment trace.ndjson")->required();
    compare->add_option("--out", compare_out, "write JSON here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? colasim::kExitOk : colasim::kExitValidation;
    }

    if (*validate) return colasim::cmd_validate(opts, std::cout, std::cerr);
    if (*run) return colasim::cmd_run(opts, std::cout, std::cerr);
    if (*sweep) return colasim::cmd_sweep(opts, axis, values, std::cout, std::cerr);
    return colasim::cmd_compare(baseline, treatment, compare_out, std::cout, std::cerr);
}
