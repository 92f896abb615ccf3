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

#include "colasim/pipeline.hpp"

namespace colasim {

namespace {

constexpr std::int64_t kPipelineFormat = 1;

SimTime read_us(const ObjectReader& r, std::string_view key) {
    const std::int64_t us = r.integer(key);
    if (us < 0) r.fail(key, "must be >= 0");
    return SimTime::from_us(us);
}

std::vector<std::string> read_ids(const ObjectReader& r, std::string_view key) {
    std::vector<std::string> out;
    if (!r.has(key)) return out;
    const json& arr = r.array(key);
    for (std::size_t i = 0; i < arr.size(); ++i) {
        if (!arr[i].is_string()) throw ParseError(r.element(key, i) + ": expected a string");
        out.push_back(arr[i].get<std::string>());
    }
    return out;
}

ChannelSpec read_channel(const json& j, const std::string& path) {
    ObjectReader r(j, path);
    r.allow_only({"id", "policy", "capacity"});
    ChannelSpec c;
    c.id = r.string("id");
    const std::string policy = r.opt_string("policy").value_or("fifo");
    if (policy == "fifo") {
        c.policy = ChannelPolicy::fifo;
    } else if (policy == "latest") {
        c.policy = ChannelPolicy::latest_only;
    } else {
        r.fail("policy", "expected fifo or latest");
    }
    if (auto cap = r.opt_integer("capacity")) {
        if (*cap < 1) r.fail("capacity", "must be >= 1");
        c.capacity = static_cast<std::size_t>(*cap);
    }
    return c;
}

ExecutionPattern read_pattern(const json& j, const std::string& path) {
    ObjectReader r(j, path);
    r.allow_only({"type", "period_us", "phase_us"});
    ExecutionPattern p;
    const std::string type = r.string("type");
    if (type == "timing") {
        p.kind = ExecutionPattern::Kind::timing;
        p.period = read_us(r, "period_us");
        if (r.has("phase_us")) p.phase = read_us(r, "phase_us");
    } else if (type == "interrupt") {
        p.kind = ExecutionPattern::Kind::interrupt;
        if (r.has("period_us") || r.has("phase_us")) r.fail("type", "interrupt nodes take no period");
    } else {
        r.fail("type", "expected timing or interrupt");
    }
    return p;
}

ProactiveSpec read_proactive(const json& j, const std::string& path) {
    ObjectReader r(j, path);
    r.allow_only({"trigger_channel", "precompute_us", "cancel_probability", "cancel_after_us", "dedicated_worker"});
    ProactiveSpec p;
    p.trigger_channel = r.string("trigger_channel");
    p.precompute_cost = read_us(r, "precompute_us");
    p.cancel_probability = r.opt_number("cancel_probability").value_or(0.0);
    if (r.has("cancel_after_us")) p.cancel_after = read_us(r, "cancel_after_us");
    p.dedicated_worker = r.opt_boolean("dedicated_worker").value_or(true);
    return p;
}

NodeSpec read_node(const json& j, const std::string& path) {
    ObjectReader r(j, path);
    r.allow_only({"name", "role", "pattern", "inputs", "outputs", "latency", "fast_latency", "lookahead_m",
                  "fast_lookahead_m", "fusion", "stateless", "sensor_range_m", "payload_bytes", "proactive"});
    NodeSpec n;
    n.name = r.string("name");
    try {
        n.role = parse_node_role(r.string("role"));
    } catch (const ParseError& e) {
        r.fail("role", e.what());
    }
    n.pattern = read_pattern(r.object("pattern"), r.child("pattern"));
    n.inputs = read_ids(r, "inputs");
    n.outputs = read_ids(r, "outputs");
    if (r.has("latency")) n.latency = latency_from_json(r.object("latency"), r.child("latency"));
    if (r.has("fast_latency")) n.fast_latency = latency_from_json(r.object("fast_latency"), r.child("fast_latency"));
    n.lookahead_m = r.opt_number("lookahead_m");
    n.fast_lookahead_m = r.opt_number("fast_lookahead_m");
    if (r.has("fusion")) {
        ObjectReader fr(r.object("fusion"), r.child("fusion"));
        fr.allow_only({"a", "n"});
        n.fusion = FusionSpec{static_cast<int>(fr.integer("a")), static_cast<int>(fr.integer("n"))};
    }
    n.stateless = r.opt_boolean("stateless").value_or(false);
    n.sensor_range_m = r.opt_number("sensor_range_m").value_or(n.sensor_range_m);
    if (auto b = r.opt_integer("payload_bytes")) {
        if (*b < 0) r.fail("payload_bytes", "must be >= 0");
        n.payload_bytes = static_cast<std::size_t>(*b);
    }
    if (r.has("proactive")) n.proactive = read_proactive(r.object("proactive"), r.child("proactive"));
    return n;
}

json node_to_json(const NodeSpec& n) {
    json pattern{{"type", n.pattern.is_timing() ? "timing" : "interrupt"}};
    if (n.pattern.is_timing()) {
        pattern["period_us"] = n.pattern.period.us();
        pattern["phase_us"] = n.pattern.phase.us();
    }
    json j{{"name", n.name},       {"role", to_string(n.role)},       {"pattern", pattern},
           {"inputs", n.inputs},   {"outputs", n.outputs},            {"latency", latency_to_json(n.latency)},
           {"stateless", n.stateless}, {"payload_bytes", n.payload_bytes}};
    if (n.role == NodeRole::sensor) j["sensor_range_m"] = n.sensor_range_m;
    if (n.fast_latency) j["fast_latency"] = latency_to_json(*n.fast_latency);
    if (n.lookahead_m) j["lookahead_m"] = *n.lookahead_m;
    if (n.fast_lookahead_m) j["fast_lookahead_m"] = *n.fast_lookahead_m;
    if (n.fusion) j["fusion"] = json{{"a", n.fusion->a}, {"n", n.fusion->n}};
    if (n.proactive) {
        j["proactive"] = json{{"trigger_channel", n.proactive->trigger_channel},
                              {"precompute_us", n.proactive->precompute_cost.us()},
                              {"cancel_probability", n.proactive->cancel_probability},
                              {"cancel_after_us", n.proactive->cancel_after.us()},
                              {"dedicated_worker", n.proactive->dedicated_worker}};
    }
    return j;
}

}  // namespace

PipelineGraph pipeline_from_json(const json& j) {
    ObjectReader r(j, "");
    r.allow_only({"format", "name", "channels", "nodes"});
    if (r.integer("format") != kPipelineFormat) r.fail("format", "unsupported version");
    PipelineGraph g;
    g.name = r.opt_string("name").value_or("");
    const json& channels = r.array("channels");
    for (std::size_t i = 0; i < channels.size(); ++i) g.channels.push_back(read_channel(channels[i], r.element("channels", i)));
    const json& nodes = r.array("nodes");
    for (std::size_t i = 0; i < nodes.size(); ++i) g.nodes.push_back(read_node(nodes[i], r.element("nodes", i)));
    return g;
}

json pipeline_to_json(const PipelineGraph& g) {
    json channels = json::array();
    for (const auto& c : g.channels) {
        channels.push_back(json{{"id", c.id},
                                {"policy", c.policy == ChannelPolicy::fifo ? "fifo" : "latest"},
                                {"capacity", c.capacity}});
    }
    json nodes = json::array();
    for (const auto& n : g.nodes) nodes.push_back(node_to_json(n));
    return json{{"format", kPipelineFormat}, {"name", g.name}, {"channels", channels}, {"nodes", nodes}};
}

PipelineGraph load_pipeline(const std::string& path) {
    const json j = read_json_file(path);
    PipelineGraph g;
    try {
        g = pipeline_from_json(j);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
    auto problems = validate_graph(g);
    if (!problems.empty()) throw GraphError(std::move(problems));
    return g;
}

void save_pipeline(const PipelineGraph& g, const std::string& path) {
    write_text_file(path, pipeline_to_json(g).dump(2) + "\n");
}

}  // namespace colasim
