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

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace colasim {

std::string_view to_string(NodeRole r) {
    switch (r) {
        case NodeRole::sensor: return "sensor";
        case NodeRole::perception: return "perception";
        case NodeRole::fusion: return "fusion";
        case NodeRole::prediction: return "prediction";
        case NodeRole::planning: return "planning";
        case NodeRole::control: return "control";
        case NodeRole::other: return "other";
    }
    return "other";
}

NodeRole parse_node_role(std::string_view s) {
    for (NodeRole r : {NodeRole::sensor, NodeRole::perception, NodeRole::fusion, NodeRole::prediction,
                       NodeRole::planning, NodeRole::control, NodeRole::other}) {
        if (to_string(r) == s) return r;
    }
    throw ParseError("unknown node role '" + std::string(s) + "'");
}

const NodeSpec* PipelineGraph::find_node(std::string_view n) const {
    for (const auto& node : nodes) {
        if (node.name == n) return &node;
    }
    return nullptr;
}

const ChannelSpec* PipelineGraph::find_channel(std::string_view id) const {
    for (const auto& c : channels) {
        if (c.id == id) return &c;
    }
    return nullptr;
}

std::vector<std::string> PipelineGraph::producers_of(std::string_view channel) const {
    std::vector<std::string> out;
    for (const auto& n : nodes) {
        if (std::find(n.outputs.begin(), n.outputs.end(), channel) != n.outputs.end()) out.push_back(n.name);
    }
    return out;
}

std::vector<std::string> PipelineGraph::consumers_of(std::string_view channel) const {
    std::vector<std::string> out;
    for (const auto& n : nodes) {
        if (std::find(n.inputs.begin(), n.inputs.end(), channel) != n.inputs.end()) out.push_back(n.name);
    }
    return out;
}

std::vector<Edge> PipelineGraph::edges() const {
    std::vector<Edge> out;
    for (const auto& c : channels) {
        for (const auto& p : producers_of(c.id)) {
            for (const auto& q : consumers_of(c.id)) out.push_back({p, c.id, q});
        }
    }
    return out;
}

std::vector<std::string> PipelineGraph::topological_order() const {
    std::map<std::string, int> indegree;
    std::map<std::string, std::vector<std::string>> succ;
    for (const auto& n : nodes) indegree[n.name];
    for (const auto& e : edges()) {
        succ[e.producer].push_back(e.consumer);
        ++indegree[e.consumer];
    }
    std::vector<std::string> order;
    std::vector<bool> placed(nodes.size(), false);
    // Repeatedly take the first ready node in declaration order.
    while (order.size() < nodes.size()) {
        bool progressed = false;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            if (placed[i] || indegree[nodes[i].name] != 0) continue;
            placed[i] = true;
            order.push_back(nodes[i].name);
            for (const auto& s : succ[nodes[i].name]) --indegree[s];
            progressed = true;
            break;
        }
        if (!progressed) throw GraphError({"topological_order: graph has a cycle"});
    }
    return order;
}

namespace {

std::string join_problems(const std::vector<std::string>& problems) {
    std::string msg;
    for (const auto& p : problems) {
        if (!msg.empty()) msg += "; ";
        msg += p;
    }
    return msg;
}

std::optional<std::vector<std::string>> find_cycle(const PipelineGraph& g) {
    std::map<std::string, std::vector<std::string>> succ;
    for (const auto& e : g.edges()) succ[e.producer].push_back(e.consumer);

    enum class Mark { white, grey, black };
    std::map<std::string, Mark> mark;
    std::vector<std::string> stack;
    std::optional<std::vector<std::string>> cycle;

    std::function<void(const std::string&)> visit = [&](const std::string& n) {
        mark[n] = Mark::grey;
        stack.push_back(n);
        for (const auto& s : succ[n]) {
            if (cycle) return;
            if (mark[s] == Mark::grey) {
                auto it = std::find(stack.begin(), stack.end(), s);
                std::vector<std::string> path(it, stack.end());
                path.push_back(s);
                cycle = path;
                return;
            }
            if (mark[s] == Mark::white) visit(s);
        }
        stack.pop_back();
        mark[n] = Mark::black;
    };
    for (const auto& n : g.nodes) {
        if (cycle) break;
        if (mark[n.name] == Mark::white) visit(n.name);
    }
    return cycle;
}

}  // namespace

GraphError::GraphError(std::vector<std::string> problems)
    : std::runtime_error(join_problems(problems)), problems_(std::move(problems)) {}

std::vector<std::string> validate_graph(const PipelineGraph& g) {
    std::vector<std::string> out;
    if (g.nodes.empty()) out.push_back("pipeline: no nodes");

    std::set<std::string> channel_ids;
    for (const auto& c : g.channels) {
        if (c.id.empty()) out.push_back("channel: empty id");
        if (!channel_ids.insert(c.id).second) out.push_back("channel " + c.id + ": duplicate id");
        if (c.policy == ChannelPolicy::fifo && c.capacity == 0) out.push_back("channel " + c.id + ": capacity must be >= 1");
    }
    std::set<std::string> node_names;
    for (const auto& n : g.nodes) {
        const std::string where = "node " + n.name;
        if (n.name.empty()) out.push_back("node: empty name");
        if (!node_names.insert(n.name).second) out.push_back(where + ": duplicate name");
        if (n.outputs.empty()) out.push_back(where + ": needs at least one output");
        if (n.pattern.is_timing() && n.pattern.period <= SimTime::zero()) out.push_back(where + ": period must be > 0");
        if (n.role == NodeRole::sensor) {
            if (!n.inputs.empty()) out.push_back(where + ": sensor nodes take no inputs");
            if (!n.pattern.is_timing()) out.push_back(where + ": sensor nodes must be timing-based");
            if (!(n.sensor_range_m > 0)) out.push_back(where + ": sensor_range_m must be > 0");
        } else if (n.inputs.empty()) {
            out.push_back(where + ": needs at least one input");
        }
        for (const auto& c : n.inputs) {
            if (!g.find_channel(c)) out.push_back(where + ": input channel " + c + " does not exist");
        }
        for (const auto& c : n.outputs) {
            if (!g.find_channel(c)) out.push_back(where + ": output channel " + c + " does not exist");
        }
        for (auto& p : validate_latency_model(n.latency, where + ".latency")) out.push_back(p);
        if (n.fast_latency) {
            if (n.role != NodeRole::prediction && n.role != NodeRole::planning) {
                out.push_back(where + ": fast_latency is only allowed on prediction and planning nodes");
            }
            for (auto& p : validate_latency_model(*n.fast_latency, where + ".fast_latency")) out.push_back(p);
        }
        if (n.fast_lookahead_m) {
            if (!n.lookahead_m) {
                out.push_back(where + ": fast_lookahead_m requires lookahead_m");
            } else if (!(*n.fast_lookahead_m >= 0 && *n.fast_lookahead_m < *n.lookahead_m)) {
                out.push_back(where + ": fast_lookahead_m must be in [0, lookahead_m)");
            }
        }
        if (n.lookahead_m && !(*n.lookahead_m >= 0)) out.push_back(where + ": lookahead_m must be >= 0");
        if (n.fusion) {
            for (auto& p : validate_fusion(*n.fusion, where + ".fusion")) out.push_back(p);
        }
        if (n.proactive) {
            if (n.role == NodeRole::sensor) out.push_back(where + ": sensors cannot be proactive");
            if (!g.find_channel(n.proactive->trigger_channel)) {
                out.push_back(where + ": proactive trigger channel " + n.proactive->trigger_channel + " does not exist");
            }
            if (n.proactive->precompute_cost < SimTime::zero()) out.push_back(where + ": precompute_us must be >= 0");
            if (!(n.proactive->cancel_probability >= 0 && n.proactive->cancel_probability <= 1)) {
                out.push_back(where + ": cancel_probability must be in [0, 1]");
            }
        }
    }
    for (const auto& c : g.channels) {
        const auto producers = g.producers_of(c.id);
        if (producers.empty()) {
            out.push_back("channel " + c.id + ": no producer");
        } else if (producers.size() > 1) {
            std::string names;
            for (const auto& p : producers) names += (names.empty() ? "" : ", ") + p;
            out.push_back("channel " + c.id + ": multiple producers (" + names + ")");
        }
    }
    if (auto cycle = find_cycle(g)) {
        std::string path;
        for (const auto& n : *cycle) path += (path.empty() ? "" : "→") + n;
        out.push_back("cycle: " + path);
    }
    return out;
}

}  // namespace colasim
