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

#include <cstdio>

#include "colasim/random.hpp"
#include "colasim/scenario.hpp"

namespace colasim {

namespace {

constexpr std::int64_t kScenarioFormat = 1;

SimTime read_time(const ObjectReader& r, std::string_view key) {
    const std::int64_t us = r.integer(key);
    if (us < 0) r.fail(key, "must be >= 0");
    return SimTime::from_us(us);
}

AgentState read_state(const json& j, const std::string& path) {
    ObjectReader r(j, path);
    r.allow_only({"s_m", "l_m", "v_mps", "a_mps2", "lane"});
    AgentState st;
    st.s = r.number("s_m");
    st.l = r.opt_number("l_m").value_or(0.0);
    st.v = r.number("v_mps");
    st.a = r.opt_number("a_mps2").value_or(0.0);
    st.lane = static_cast<int>(r.integer("lane"));
    return st;
}

json state_to_json(const AgentState& st) {
    return json{{"s_m", st.s}, {"l_m", st.l}, {"v_mps", st.v}, {"a_mps2", st.a}, {"lane", st.lane}};
}

AgentSpec read_agent(const json& j, const std::string& path) {
    ObjectReader r(j, path);
    r.allow_only({"id", "kind", "initial", "segments", "visible_from_us"});
    AgentSpec a;
    a.id = r.string("id");
    try {
        a.kind = parse_agent_kind(r.string("kind"));
    } catch (const ParseError& e) {
        r.fail("kind", e.what());
    }
    a.trajectory.initial = read_state(r.object("initial"), r.child("initial"));
    if (r.has("segments")) {
        const json& segs = r.array("segments");
        for (std::size_t i = 0; i < segs.size(); ++i) {
            ObjectReader sr(segs[i], r.element("segments", i));
            sr.allow_only({"start_us", "a_mps2", "lane"});
            Segment seg;
            seg.start = read_time(sr, "start_us");
            seg.accel = sr.number("a_mps2");
            if (auto lane = sr.opt_integer("lane")) seg.lane = static_cast<int>(*lane);
            a.trajectory.segments.push_back(seg);
        }
    }
    if (r.has("visible_from_us")) a.trajectory.visible_from = read_time(r, "visible_from_us");
    return a;
}

}  // namespace

Scenario scenario_from_json(const json& j) {
    ObjectReader r(j, "");
    r.allow_only({"format", "name", "lane_count", "ego", "agents", "duration_us", "hazards", "d_buffer_m"});
    if (r.integer("format") != kScenarioFormat) r.fail("format", "unsupported version (expected 1)");

    Scenario sc;
    sc.name = r.opt_string("name").value_or("");
    sc.lane_count = static_cast<int>(r.opt_integer("lane_count").value_or(3));
    sc.ego = read_state(r.object("ego"), "ego");
    const std::int64_t duration = r.integer("duration_us");
    if (duration <= 0) r.fail("duration_us", "must be > 0");
    sc.duration = SimTime::from_us(duration);
    sc.d_buffer_m = r.number("d_buffer_m");

    const json& agents = r.array("agents");
    for (std::size_t i = 0; i < agents.size(); ++i) sc.agents.push_back(read_agent(agents[i], r.element("agents", i)));

    if (r.has("hazards")) {
        const json& hz = r.array("hazards");
        for (std::size_t i = 0; i < hz.size(); ++i) {
            ObjectReader hr(hz[i], r.element("hazards", i));
            hr.allow_only({"time_us", "agent", "label"});
            sc.hazards.push_back({read_time(hr, "time_us"), hr.string("agent"), hr.opt_string("label").value_or("")});
        }
    }

    auto problems = validate_scenario(sc);
    if (!problems.empty()) {
        std::string msg = "invalid scenario:";
        for (const auto& p : problems) msg += "\n  " + p;
        throw ScenarioError(msg);
    }
    return sc;
}

json scenario_to_json(const Scenario& sc) {
    json agents = json::array();
    for (const auto& a : sc.agents) {
        json segs = json::array();
        for (const auto& seg : a.trajectory.segments) {
            json s{{"start_us", seg.start.us()}, {"a_mps2", seg.accel}};
            if (seg.lane) s["lane"] = *seg.lane;
            segs.push_back(std::move(s));
        }
        agents.push_back(json{{"id", a.id},
                              {"kind", std::string(to_string(a.kind))},
                              {"initial", state_to_json(a.trajectory.initial)},
                              {"segments", std::move(segs)},
                              {"visible_from_us", a.trajectory.visible_from.us()}});
    }
    json hazards = json::array();
    for (const auto& h : sc.hazards) {
        hazards.push_back(json{{"time_us", h.time.us()}, {"agent", h.agent_id}, {"label", h.label}});
    }
    return json{{"format", kScenarioFormat},
                {"name", sc.name},
                {"lane_count", sc.lane_count},
                {"ego", state_to_json(sc.ego)},
                {"agents", std::move(agents)},
                {"duration_us", sc.duration.us()},
                {"hazards", std::move(hazards)},
                {"d_buffer_m", sc.d_buffer_m}};
}

Scenario load_scenario(const std::string& path) {
    const json j = read_json_file(path);
    try {
        return scenario_from_json(j);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    } catch (const ScenarioError& e) {
        throw ScenarioError(path + ": " + e.what());
    }
}

void save_scenario(const Scenario& scenario, const std::string& path) {
    write_text_file(path, scenario_to_json(scenario).dump(2) + "\n");
}

std::string scenario_hash(const Scenario& scenario) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(scenario_to_json(scenario).dump())));
    return buf;
}

}  // namespace colasim
