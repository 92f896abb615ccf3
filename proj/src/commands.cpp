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

#include "colasim/commands.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <ostream>
#include <thread>

#include "colasim/analysis.hpp"
#include "colasim/trace_io.hpp"

namespace colasim {

namespace {

std::string fmt_ms(SimTime t) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", static_cast<double>(t.us()) / 1000.0);
    return buf;
}

void apply_overrides(RunConfig& c, const CliOptions& o) {
    if (o.scenario) c.scenario_path = *o.scenario;
    if (o.pipeline) c.pipeline_path = *o.pipeline;
    if (o.out) c.out_dir = *o.out;
    if (o.seed) c.seed = *o.seed;
    if (o.fastpath) c.sim.mitigation.fastpath = *o.fastpath;
    if (o.proactive) c.sim.mitigation.proactive = *o.proactive;
    if (o.stealing) c.sim.mitigation.stealing = *o.stealing;
    if (o.deadline_cap_us) {
        if (*o.deadline_cap_us <= 0) throw ValidationError("--deadline-cap-us: must be > 0");
        c.sim.mitigation.deadline_cap = SimTime::from_us(*o.deadline_cap_us);
    }
}

template <class F>
auto checked(const std::string& what, F&& fn) {
    try {
        return fn();
    } catch (const ValidationError&) {
        throw;
    } catch (const GraphError& e) {
        throw ValidationError(what + ": " + (e.problems().empty() ? std::string(e.what()) : e.problems().front()));
    } catch (const std::exception& e) {
        throw ValidationError(what + ": " + e.what());
    }
}

}  // namespace

Scenario with_traffic(const Scenario& base, const TrafficConfig& traffic, std::uint64_t seed) {
    Scenario s = base;
    RoadSpec road = road_for(base);
    road.radius_m = traffic.radius_m;
    road.kind_mix = traffic.kind_mix;
    add_traffic(s, generate_traffic(traffic.density, seed, road));
    return s;
}

PreparedRun prepare_run(const CliOptions& opts, bool require_seed) {
    PreparedRun p;
    if (opts.config) p.config = checked("config", [&] { return load_run_config(*opts.config); });
    apply_overrides(p.config, opts);
    if (p.config.scenario_path.empty()) throw ValidationError("scenario: no path given (--scenario or config)");
    if (p.config.pipeline_path.empty()) throw ValidationError("pipeline: no path given (--pipeline or config)");
    p.scenario = checked("scenario", [&] { return load_scenario(p.config.scenario_path); });
    p.graph = checked("pipeline", [&] { return load_pipeline(p.config.pipeline_path); });
    auto problems = validate_sim_config(p.config.sim, p.graph);
    if (!problems.empty()) throw ValidationError("config: " + problems.front());
    if (require_seed && needs_seed(p.graph, p.config) && !p.config.seed) {
        throw ValidationError("seed: required for a stochastic run (--seed or config \"seed\")");
    }
    p.seed = p.config.seed.value_or(0);
    if (p.config.traffic && p.config.traffic->density > 0) p.scenario = with_traffic(p.scenario, *p.config.traffic, p.seed);
    return p;
}

RunOutputs write_run_outputs(const RunTrace& trace, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    const std::filesystem::path dir(out_dir);
    RunOutputs o;
    o.trace_path = (dir / "trace.ndjson").string();
    o.report_path = (dir / "report.json").string();
    o.cdf_path = (dir / "cdf.csv").string();
    write_trace(trace, o.trace_path);
    write_text_file(o.report_path, run_report(trace).dump(2) + "\n");
    const auto e2e = e2e_samples(trace);
    write_text_file(o.cdf_path, e2e.empty() ? std::string("latency_us,cumulative_fraction\n") : cdf_csv(e2e));
    return o;
}

std::string summary_line(const RunTrace& trace) {
    const auto e2e = e2e_samples(trace);
    std::string line;
    if (e2e.empty()) {
        line = "frames=0";
    } else {
        const LatencyStats s = compute_stats(e2e);
        line = "frames=" + std::to_string(s.count) + " mean_ms=" + fmt_ms(s.mean) + " p99_ms=" + fmt_ms(s.p99) +
               " worst_ms=" + fmt_ms(s.max);
    }
    line += " violations=" + std::to_string(trace.violations) + " collisions=" + std::to_string(trace.collisions);
    return line;
}

SweepAxis parse_sweep_axis(const std::string& name) {
    if (name == "deadline_cap") return SweepAxis::deadline_cap;
    if (name == "density") return SweepAxis::density;
    if (name == "seed") return SweepAxis::seed;
    throw ValidationError("--axis: unknown axis '" + name + "' (expected deadline_cap, density or seed)");
}

unsigned sweep_threads() {
    if (const char* env = std::getenv("COLA_SIM_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<SweepRow> run_sweep(const PreparedRun& base, SweepAxis axis, const std::vector<double>& values,
                                unsigned threads) {
    if (values.size() < 2) throw ValidationError("--values: >= 2 values required");
    for (double v : values) {
        if (!(v >= 0)) throw ValidationError("--values: values must be >= 0");
        if (axis == SweepAxis::deadline_cap && !(v > 0)) throw ValidationError("--values: deadline caps must be > 0");
    }
    std::vector<SweepRow> rows(values.size());
    std::vector<std::exception_ptr> errors(values.size());
    std::atomic<std::size_t> next{0};

    auto one = [&](std::size_t i) {
        const double v = values[i];
        SimConfig sim = base.config.sim;
        std::uint64_t seed = base.seed;
        Scenario scenario = base.scenario;
        switch (axis) {
            case SweepAxis::deadline_cap: sim.mitigation.deadline_cap = SimTime::from_us(std::llround(v * 1000.0)); break;
            case SweepAxis::seed: seed = static_cast<std::uint64_t>(std::llround(v)); break;
            case SweepAxis::density: break;
        }
        if (axis == SweepAxis::density || axis == SweepAxis::seed) {
            TrafficConfig t = base.config.traffic.value_or(TrafficConfig{});
            if (axis == SweepAxis::density) t.density = v;
            // The prepared scenario may already carry traffic for the base seed.
            Scenario raw = base.scenario;
            std::erase_if(raw.agents, [](const AgentSpec& a) { return a.id.rfind("traffic_", 0) == 0; });
            scenario = t.density > 0 ? with_traffic(raw, t, seed) : raw;
        }
        const RunTrace trace = run_simulation(scenario, base.graph, sim, seed);
        SweepRow row;
        row.value = v;
        const auto e2e = e2e_samples(trace);
        if (!e2e.empty()) {
            const LatencyStats s = compute_stats(e2e);
            row.mean_us = s.mean.us();
            row.p99_us = s.p99.us();
            row.worst_us = s.max.us();
        }
        row.violations = trace.violations;
        rows[i] = row;
    };
    auto worker = [&]() {
        for (std::size_t i = next++; i < values.size(); i = next++) {
            try {
                one(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(values.size())));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = "value,mean_us,p99_us,worst_us,violations\n";
    for (const auto& r : rows) {
        out += json(r.value).dump() + "," + std::to_string(r.mean_us) + "," + std::to_string(r.p99_us) + "," +
               std::to_string(r.worst_us) + "," + std::to_string(r.violations) + "\n";
    }
    return out;
}

int cmd_validate(const CliOptions& opts, std::ostream& out, std::ostream& err) {
    try {
        const PreparedRun p = prepare_run(opts, false);
        out << "ok: scenario " << p.config.scenario_path << " (" << p.scenario.agents.size() << " agents), pipeline "
            << p.config.pipeline_path << " (" << p.graph.nodes.size() << " nodes)\n";
        return kExitOk;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    }
}

int cmd_run(const CliOptions& opts, std::ostream& out, std::ostream& err) {
    PreparedRun p;
    try {
        p = prepare_run(opts);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    try {
        const RunTrace trace = run_simulation(p.scenario, p.graph, p.config.sim, p.seed);
        const RunOutputs files = write_run_outputs(trace, p.config.out_dir);
        out << summary_line(trace) << "\n";
        if (opts.paired) {
            SimConfig base = p.config.sim;
            base.mitigation.fastpath = false;
            base.mitigation.proactive = false;
            base.mitigation.stealing = false;
            const RunTrace baseline = run_simulation(p.scenario, p.graph, base, p.seed);
            const std::string base_dir = (std::filesystem::path(p.config.out_dir) / "baseline").string();
            write_run_outputs(baseline, base_dir);
            const std::string cmp = (std::filesystem::path(p.config.out_dir) / "compare.json").string();
            write_text_file(cmp, compare_to_json(compare_runs(baseline, trace)).dump(2) + "\n");
            out << "baseline " << summary_line(baseline) << "\n";
        }
        return kExitOk;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

int cmd_sweep(const CliOptions& opts, const std::string& axis_name, const std::vector<double>& values,
              std::ostream& out, std::ostream& err) {
    PreparedRun p;
    SweepAxis axis;
    try {
        axis = parse_sweep_axis(axis_name);
        if (values.size() < 2) throw ValidationError("--values: >= 2 values required");
        CliOptions o = opts;
        // Density and seed sweeps draw traffic, so they need a base seed too.
        if (axis != SweepAxis::deadline_cap && !o.seed) {
            RunConfig probe = o.config ? load_run_config(*o.config) : RunConfig{};
            if (!probe.seed) throw ValidationError("seed: required for a " + axis_name + " sweep");
        }
        p = prepare_run(o);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    try {
        const auto rows = run_sweep(p, axis, values, sweep_threads());
        const std::string csv = sweep_csv(rows);
        std::filesystem::create_directories(p.config.out_dir);
        write_text_file((std::filesystem::path(p.config.out_dir) / "sweep.csv").string(), csv);
        out << csv;
        return kExitOk;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

int cmd_compare(const std::string& baseline, const std::string& treatment, const std::optional<std::string>& out_path,
                std::ostream& out, std::ostream& err) {
    RunTrace a, b;
    try {
        a = load_trace(baseline);
        b = load_trace(treatment);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    try {
        const std::string text = compare_to_json(compare_runs(a, b)).dump(2) + "\n";
        if (out_path) {
            write_text_file(*out_path, text);
        } else {
            out << text;
        }
        return kExitOk;
    } catch (const AnalysisError& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

}  // namespace colasim
