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

#include "colasim/trace_io.hpp"

#include <fstream>
#include <sstream>

namespace colasim {

namespace {

json state_json(const AgentState& st) {
    return json{{"s_m", st.s}, {"l_m", st.l}, {"v_mps", st.v}, {"a_mps2", st.a}, {"lane", st.lane}};
}

AgentState state_from(const json& j) {
    return AgentState{j.at("s_m").get<double>(), j.at("l_m").get<double>(), j.at("v_mps").get<double>(),
                      j.at("a_mps2").get<double>(), j.at("lane").get<int>()};
}

json trajectory_json(const TrajectorySpec& t) {
    json segs = json::array();
    for (const auto& s : t.segments) {
        json sj{{"start_us", s.start.us()}, {"a_mps2", s.accel}};
        if (s.lane) sj["lane"] = *s.lane;
        segs.push_back(sj);
    }
    return json{{"initial", state_json(t.initial)}, {"segments", segs}, {"visible_from_us", t.visible_from.us()}};
}

TrajectorySpec trajectory_from(const json& j) {
    TrajectorySpec t;
    t.initial = state_from(j.at("initial"));
    for (const auto& s : j.at("segments")) {
        Segment seg{SimTime::from_us(s.at("start_us").get<std::int64_t>()), s.at("a_mps2").get<double>(), std::nullopt};
        if (s.contains("lane")) seg.lane = s.at("lane").get<int>();
        t.segments.push_back(seg);
    }
    t.visible_from = SimTime::from_us(j.at("visible_from_us").get<std::int64_t>());
    return t;
}

SimTime us_at(const json& j, const char* key) { return SimTime::from_us(j.at(key).get<std::int64_t>()); }

json path_json(const std::vector<PathStep>& path) {
    json out = json::array();
    for (const auto& p : path) out.push_back(json{{"node", p.node}, {"path", to_string(p.choice)}});
    return out;
}

std::vector<PathStep> path_from(const json& j) {
    std::vector<PathStep> out;
    for (const auto& p : j) {
        out.push_back({p.at("node").get<std::string>(),
                       p.at("path").get<std::string>() == "fastpath" ? PathChoice::fastpath : PathChoice::normal});
    }
    return out;
}

json config_json(const SimConfig& c) {
    RunConfig rc;
    rc.sim = c;
    json j = run_config_to_json(rc);
    j.erase("scenario");
    j.erase("pipeline");
    j.erase("out");
    return j;
}

}  // namespace

std::string trace_to_ndjson(const RunTrace& t) {
    std::ostringstream os;
    auto line = [&os](const json& j) { os << j.dump() << '\n'; };

    line(json{{"type", "header"},
              {"format", kTraceFormat},
              {"scenario", t.scenario_name},
              {"scenario_hash", t.scenario_hash},
              {"pipeline", t.pipeline_name},
              {"seed", t.seed},
              {"duration_us", t.duration.us()},
              {"config", config_json(t.config)}});
    for (const auto& s : t.spans) {
        line(json{{"type", "span"},         {"node", s.node},
                  {"exec", s.exec},         {"sensor", s.sensor},
                  {"sensor_seq", s.sensor_seq}, {"release_us", s.release.us()},
                  {"start_us", s.start.us()}, {"end_us", s.end.us()},
                  {"worker", s.worker},     {"guest", s.guest},
                  {"kind", to_string(s.kind)}, {"objects", s.objects},
                  {"saved_us", s.saved.us()}});
    }
    for (const auto& f : t.frames) {
        line(json{{"type", "frame"},
                  {"sensor", f.sensor},
                  {"seq", f.seq},
                  {"sink", f.sink},
                  {"sensor_ts_us", f.sensor_ts.us()},
                  {"done_us", f.done.us()},
                  {"e2e_us", f.e2e.us()},
                  {"module_us", f.module.us()},
                  {"bubble_us", f.bubble.us()},
                  {"fastpath", f.fastpath},
                  {"partial", f.partial},
                  {"in_radius", f.in_radius},
                  {"objects", f.objects},
                  {"message_deadline_us", f.message_deadline.us()},
                  {"object_ids", f.object_ids},
                  {"in_radius_ids", f.in_radius_ids},
                  {"path", path_json(f.path)}});
    }
    for (const auto& r : t.reactions) {
        line(json{{"type", "reaction"},
                  {"label", r.label},
                  {"agent", r.agent_id},
                  {"reacted", r.reacted},
                  {"t0_us", r.t0.us()},
                  {"t1_us", r.t1.us()},
                  {"t_sensor_us", r.t_sensor.us()},
                  {"t_module_us", r.t_module.us()},
                  {"t_bubble_us", r.t_bubble.us()},
                  {"in_radius", r.in_radius},
                  {"sensor", r.sensor},
                  {"sensor_seq", r.sensor_seq},
                  {"path", path_json(r.path)}});
    }
    for (const auto& s : t.safety) {
        line(json{{"type", "safety"},
                  {"t_us", s.t.us()},
                  {"level", to_string(s.level)},
                  {"min_gap_m", s.min_gap_m ? json(*s.min_gap_m) : json(nullptr)},
                  {"agent", s.agent},
                  {"ego_s_m", s.ego_s},
                  {"ego_v_mps", s.ego_v}});
    }
    for (const auto& d : t.decisions) {
        line(json{{"type", "decision"},
                  {"t_us", d.t.us()},
                  {"effective_us", d.effective.us()},
                  {"node", d.node},
                  {"decision", to_string(d.decision.kind)},
                  {"brake_mps2", d.decision.brake_mps2},
                  {"lane_dir", d.decision.lane_dir},
                  {"cause", d.cause}});
    }
    for (const auto& b : t.budget_misses) {
        line(json{{"type", "budget_miss"},
                  {"group", b.group},
                  {"node", b.node},
                  {"exec", b.exec},
                  {"release_us", b.release.us()},
                  {"end_us", b.end.us()},
                  {"budget_us", b.budget.us()}});
    }
    for (const auto& p : t.proactive) {
        line(json{{"type", "proactive"},
                  {"node", p.node},
                  {"arrival_us", p.arrival.us()},
                  {"trigger_us", p.trigger.us()},
                  {"saved_us", p.saved.us()},
                  {"cancelled", p.cancelled}});
    }
    json workers = json::array();
    for (const auto& w : t.workers) workers.push_back(json{{"worker", w.worker}, {"busy_us", w.busy.us()}});
    line(json{{"type", "summary"},
              {"violations", t.violations},
              {"collisions", t.collisions},
              {"dropped_messages", t.dropped_messages},
              {"steals", t.steals},
              {"workers", workers},
              {"ego", trajectory_json(t.ego)}});
    return os.str();
}

RunTrace trace_from_ndjson(const std::string& text) {
    RunTrace t;
    std::istringstream is(text);
    std::string raw;
    std::size_t lineno = 0;
    bool header = false;
    bool summary = false;
    while (std::getline(is, raw)) {
        ++lineno;
        if (raw.empty()) continue;
        const std::string where = "trace line " + std::to_string(lineno);
        try {
            const json j = json::parse(raw);
            const std::string type = j.at("type").get<std::string>();
            if (!header && type != "header") throw ParseError("first record must be the header");
            if (type == "header") {
                if (header) throw ParseError("duplicate header");
                header = true;
                if (j.at("format").get<int>() != kTraceFormat) throw ParseError("unsupported trace format");
                t.scenario_name = j.at("scenario").get<std::string>();
                t.scenario_hash = j.at("scenario_hash").get<std::string>();
                t.pipeline_name = j.at("pipeline").get<std::string>();
                t.seed = j.at("seed").get<std::uint64_t>();
                t.duration = us_at(j, "duration_us");
                t.config = run_config_from_json(j.at("config"), "").sim;
            } else if (type == "span") {
                SpanRecord s;
                s.node = j.at("node").get<std::string>();
                s.exec = j.at("exec").get<std::uint64_t>();
                s.sensor = j.at("sensor").get<std::string>();
                s.sensor_seq = j.at("sensor_seq").get<std::uint64_t>();
                s.release = us_at(j, "release_us");
                s.start = us_at(j, "start_us");
                s.end = us_at(j, "end_us");
                s.worker = j.at("worker").get<std::string>();
                s.guest = j.at("guest").get<bool>();
                s.kind = parse_span_kind(j.at("kind").get<std::string>());
                s.objects = j.at("objects").get<std::int64_t>();
                s.saved = us_at(j, "saved_us");
                t.spans.push_back(std::move(s));
            } else if (type == "frame") {
                FrameRecord f;
                f.sensor = j.at("sensor").get<std::string>();
                f.seq = j.at("seq").get<std::uint64_t>();
                f.sink = j.at("sink").get<std::string>();
                f.sensor_ts = us_at(j, "sensor_ts_us");
                f.done = us_at(j, "done_us");
                f.e2e = us_at(j, "e2e_us");
                f.module = us_at(j, "module_us");
                f.bubble = us_at(j, "bubble_us");
                f.fastpath = j.at("fastpath").get<bool>();
                f.partial = j.at("partial").get<bool>();
                f.in_radius = j.at("in_radius").get<bool>();
                f.objects = j.at("objects").get<std::int64_t>();
                f.message_deadline = us_at(j, "message_deadline_us");
                f.object_ids = j.at("object_ids").get<std::vector<std::string>>();
                f.in_radius_ids = j.at("in_radius_ids").get<std::vector<std::string>>();
                f.path = path_from(j.at("path"));
                t.frames.push_back(std::move(f));
            } else if (type == "reaction") {
                ReactionRecord r;
                r.label = j.at("label").get<std::string>();
                r.agent_id = j.at("agent").get<std::string>();
                r.reacted = j.at("reacted").get<bool>();
                r.t0 = us_at(j, "t0_us");
                r.t1 = us_at(j, "t1_us");
                r.t_sensor = us_at(j, "t_sensor_us");
                r.t_module = us_at(j, "t_module_us");
                r.t_bubble = us_at(j, "t_bubble_us");
                r.in_radius = j.at("in_radius").get<bool>();
                r.sensor = j.at("sensor").get<std::string>();
                r.sensor_seq = j.at("sensor_seq").get<std::uint64_t>();
                r.path = path_from(j.at("path"));
                t.reactions.push_back(std::move(r));
            } else if (type == "safety") {
                SafetySample s;
                s.t = us_at(j, "t_us");
                s.level = parse_safety_level(j.at("level").get<std::string>());
                if (!j.at("min_gap_m").is_null()) s.min_gap_m = j.at("min_gap_m").get<double>();
                s.agent = j.at("agent").get<std::string>();
                s.ego_s = j.at("ego_s_m").get<double>();
                s.ego_v = j.at("ego_v_mps").get<double>();
                t.safety.push_back(std::move(s));
            } else if (type == "decision") {
                DecisionRecord d;
                d.t = us_at(j, "t_us");
                d.effective = us_at(j, "effective_us");
                d.node = j.at("node").get<std::string>();
                d.decision.kind = parse_decision_kind(j.at("decision").get<std::string>());
                d.decision.brake_mps2 = j.at("brake_mps2").get<double>();
                d.decision.lane_dir = j.at("lane_dir").get<int>();
                d.cause = j.at("cause").get<std::string>();
                t.decisions.push_back(std::move(d));
            } else if (type == "budget_miss") {
                t.budget_misses.push_back({j.at("group").get<std::string>(), j.at("node").get<std::string>(),
                                           j.at("exec").get<std::uint64_t>(), us_at(j, "release_us"),
                                           us_at(j, "end_us"), us_at(j, "budget_us")});
            } else if (type == "proactive") {
                t.proactive.push_back({j.at("node").get<std::string>(), us_at(j, "arrival_us"), us_at(j, "trigger_us"),
                                       us_at(j, "saved_us"), j.at("cancelled").get<bool>()});
            } else if (type == "summary") {
                summary = true;
                t.violations = j.at("violations").get<std::int64_t>();
                t.collisions = j.at("collisions").get<std::int64_t>();
                t.dropped_messages = j.at("dropped_messages").get<std::int64_t>();
                t.steals = j.at("steals").get<std::int64_t>();
                for (const auto& w : j.at("workers")) {
                    t.workers.push_back({w.at("worker").get<std::string>(), us_at(w, "busy_us")});
                }
                t.ego = trajectory_from(j.at("ego"));
            } else {
                throw ParseError("unknown record type '" + type + "'");
            }
        } catch (const ParseError& e) {
            throw ParseError(where + ": " + e.what());
        } catch (const json::exception& e) {
            throw ParseError(where + ": " + e.what());
        }
    }
    if (!header) throw ParseError("trace: missing header");
    if (!summary) throw ParseError("trace: missing summary");
    return t;
}

void write_trace(const RunTrace& trace, const std::string& path) { write_text_file(path, trace_to_ndjson(trace)); }

RunTrace load_trace(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path + ": cannot open");
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return trace_from_ndjson(ss.str());
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

}  // namespace colasim
