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

#include "colasim/config.hpp"

#include <filesystem>
#include <map>
#include <set>

namespace colasim {

namespace {

constexpr std::int64_t kConfigFormat = 1;

SimTime positive_us(const ObjectReader& r, std::string_view key, SimTime fallback) {
    auto v = r.opt_integer(key);
    if (!v) return fallback;
    if (*v <= 0) r.fail(key, "must be > 0");
    return SimTime::from_us(*v);
}

std::string resolve(const std::string& base_dir, const std::string& p) {
    namespace fs = std::filesystem;
    if (p.empty() || fs::path(p).is_absolute() || base_dir.empty()) return p;
    return (fs::path(base_dir) / p).lexically_normal().string();
}

ProcessorGroup read_group(const json& j, const std::string& path) {
    ObjectReader r(j, path);
    r.allow_only({"name", "workers", "nodes", "budget_us"});
    ProcessorGroup g;
    g.name = r.string("name");
    g.workers = static_cast<int>(r.opt_integer("workers").value_or(1));
    if (g.workers < 1) r.fail("workers", "must be >= 1");
    const json& nodes = r.array("nodes");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (!nodes[i].is_string()) throw ParseError(r.element("nodes", i) + ": expected a string");
        g.nodes.push_back(nodes[i].get<std::string>());
    }
    if (r.has("budget_us")) g.budget = positive_us(r, "budget_us", SimTime::zero());
    return g;
}

MitigationConfig read_mitigation(const json& j, const std::string& path) {
    ObjectReader r(j, path);
    r.allow_only({"fastpath", "radius_m", "proactive", "stealing", "safety_factor", "deadline_cap_us", "extra_worker"});
    MitigationConfig m;
    m.fastpath = r.opt_boolean("fastpath").value_or(false);
    m.radius_m = r.opt_number("radius_m").value_or(m.radius_m);
    if (!(m.radius_m > 0)) r.fail("radius_m", "must be > 0");
    m.proactive = r.opt_boolean("proactive").value_or(false);
    m.stealing = r.opt_boolean("stealing").value_or(false);
    m.safety_factor = r.opt_number("safety_factor").value_or(m.safety_factor);
    if (!(m.safety_factor >= 1.0)) r.fail("safety_factor", "must be >= 1");
    m.deadline_cap = positive_us(r, "deadline_cap_us", m.deadline_cap);
    m.extra_worker = r.opt_boolean("extra_worker").value_or(false);
    return m;
}

TrafficConfig read_traffic(const json& j, const std::string& path) {
    ObjectReader r(j, path);
    r.allow_only({"density", "radius_m", "kind_mix"});
    TrafficConfig t;
    t.density = r.number("density");
    if (!(t.density >= 0)) r.fail("density", "must be >= 0");
    t.radius_m = r.opt_number("radius_m").value_or(t.radius_m);
    if (!(t.radius_m > 0)) r.fail("radius_m", "must be > 0");
    if (r.has("kind_mix")) {
        ObjectReader kr(r.object("kind_mix"), r.child("kind_mix"));
        kr.allow_only({"vehicle", "pedestrian", "cyclist"});
        for (AgentKind k : kAgentKinds) {
            const double w = kr.opt_number(to_string(k)).value_or(0.0);
            if (!(w >= 0)) kr.fail(to_string(k), "must be >= 0");
            t.kind_mix[static_cast<std::size_t>(k)] = w;
        }
    }
    return t;
}

}  // namespace

RunConfig run_config_from_json(const json& j, const std::string& base_dir) {
    ObjectReader r(j, "");
    r.allow_only({"format", "scenario", "pipeline", "groups", "rss", "mitigation", "control", "traffic", "seed",
                  "tick_us", "actuation_delay_us", "budget_horizon_us", "out"});
    if (r.integer("format") != kConfigFormat) r.fail("format", "unsupported version");
    RunConfig c;
    if (auto s = r.opt_string("scenario")) c.scenario_path = resolve(base_dir, *s);
    if (auto s = r.opt_string("pipeline")) c.pipeline_path = resolve(base_dir, *s);
    if (auto s = r.opt_string("out")) c.out_dir = resolve(base_dir, *s);
    if (auto seed = r.opt_integer("seed")) {
        if (*seed < 0) r.fail("seed", "must be >= 0");
        c.seed = static_cast<std::uint64_t>(*seed);
    }
    if (r.has("groups")) {
        const json& groups = r.array("groups");
        for (std::size_t i = 0; i < groups.size(); ++i) c.sim.groups.push_back(read_group(groups[i], r.element("groups", i)));
    }
    if (r.has("rss")) c.sim.rss = rss_from_json(r.object("rss"), r.child("rss"));
    if (r.has("mitigation")) c.sim.mitigation = read_mitigation(r.object("mitigation"), r.child("mitigation"));
    if (r.has("control")) {
        ObjectReader cr(r.object("control"), r.child("control"));
        cr.allow_only({"response_margin_us", "brake_mps2"});
        c.sim.control.response_margin = positive_us(cr, "response_margin_us", c.sim.control.response_margin);
        c.sim.control.brake_mps2 = cr.opt_number("brake_mps2").value_or(c.sim.control.brake_mps2);
        if (!(c.sim.control.brake_mps2 > 0)) cr.fail("brake_mps2", "must be > 0");
    }
    if (r.has("traffic")) c.traffic = read_traffic(r.object("traffic"), r.child("traffic"));
    c.sim.tick = positive_us(r, "tick_us", c.sim.tick);
    if (auto v = r.opt_integer("actuation_delay_us")) {
        if (*v < 0) r.fail("actuation_delay_us", "must be >= 0");
        c.sim.actuation_delay = SimTime::from_us(*v);
    }
    c.sim.budget_horizon = positive_us(r, "budget_horizon_us", c.sim.budget_horizon);
    return c;
}

json run_config_to_json(const RunConfig& c) {
    json groups = json::array();
    for (const auto& g : c.sim.groups) {
        json gj{{"name", g.name}, {"workers", g.workers}, {"nodes", g.nodes}};
        if (g.budget) gj["budget_us"] = g.budget->us();
        groups.push_back(gj);
    }
    const auto& m = c.sim.mitigation;
    json j{{"format", kConfigFormat},
           {"scenario", c.scenario_path},
           {"pipeline", c.pipeline_path},
           {"groups", groups},
           {"rss", rss_to_json(c.sim.rss)},
           {"mitigation",
            {{"fastpath", m.fastpath},
             {"radius_m", m.radius_m},
             {"proactive", m.proactive},
             {"stealing", m.stealing},
             {"safety_factor", m.safety_factor},
             {"deadline_cap_us", m.deadline_cap.us()},
             {"extra_worker", m.extra_worker}}},
           {"control",
            {{"response_margin_us", c.sim.control.response_margin.us()}, {"brake_mps2", c.sim.control.brake_mps2}}},
           {"tick_us", c.sim.tick.us()},
           {"actuation_delay_us", c.sim.actuation_delay.us()},
           {"budget_horizon_us", c.sim.budget_horizon.us()},
           {"out", c.out_dir}};
    if (c.seed) j["seed"] = *c.seed;
    if (c.traffic) {
        json mix = json::object();
        for (AgentKind k : kAgentKinds) mix[std::string(to_string(k))] = c.traffic->kind_mix[static_cast<std::size_t>(k)];
        j["traffic"] = json{{"density", c.traffic->density}, {"radius_m", c.traffic->radius_m}, {"kind_mix", mix}};
    }
    return j;
}

RunConfig load_run_config(const std::string& path) {
    const json j = read_json_file(path);
    try {
        return run_config_from_json(j, std::filesystem::path(path).parent_path().string());
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

std::vector<ProcessorGroup> resolve_groups(const PipelineGraph& g, const SimConfig& c) {
    if (!c.groups.empty()) return c.groups;
    std::vector<ProcessorGroup> out;
    for (const auto& n : g.nodes) {
        if (n.role == NodeRole::sensor) continue;
        out.push_back(ProcessorGroup{n.name, 1, {n.name}, std::nullopt});
    }
    return out;
}

std::vector<std::string> validate_sim_config(const SimConfig& c, const PipelineGraph& g) {
    std::vector<std::string> out;
    for (auto& p : validate_rss(c.rss)) out.push_back(p);
    if (c.tick <= SimTime::zero()) out.push_back("tick_us: must be > 0");
    std::set<std::string> group_names;
    std::map<std::string, std::string> pinned;
    for (const auto& grp : resolve_groups(g, c)) {
        if (!group_names.insert(grp.name).second) out.push_back("group " + grp.name + ": duplicate name");
        if (grp.workers < 1) out.push_back("group " + grp.name + ": workers must be >= 1");
        for (const auto& n : grp.nodes) {
            const NodeSpec* spec = g.find_node(n);
            if (!spec) {
                out.push_back("group " + grp.name + ": unknown node " + n);
                continue;
            }
            if (spec->role == NodeRole::sensor) continue;
            auto [it, fresh] = pinned.emplace(n, grp.name);
            if (!fresh) out.push_back("node " + n + ": pinned to both " + it->second + " and " + grp.name);
        }
    }
    for (const auto& n : g.nodes) {
        if (n.role != NodeRole::sensor && !pinned.count(n.name)) out.push_back("node " + n.name + ": not pinned to any group");
    }
    return out;
}

bool needs_seed(const PipelineGraph& g, const RunConfig& c) {
    if (c.traffic && c.traffic->density > 0) return true;
    for (const auto& n : g.nodes) {
        if (is_stochastic(n.latency)) return true;
        if (n.fast_latency && is_stochastic(*n.fast_latency)) return true;
        if (c.sim.mitigation.proactive && n.proactive && n.proactive->cancel_probability > 0 &&
            n.proactive->cancel_probability < 1) {
            return true;
        }
    }
    return false;
}

}  // namespace colasim
