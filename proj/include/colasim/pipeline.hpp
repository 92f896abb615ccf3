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

#include <cstddef>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "colasim/fusion.hpp"
#include "colasim/json_util.hpp"
#include "colasim/latency.hpp"
#include "colasim/sim_time.hpp"

namespace colasim {

enum class NodeRole { sensor, perception, fusion, prediction, planning, control, other };
std::string_view to_string(NodeRole r);
NodeRole parse_node_role(std::string_view s);

struct ExecutionPattern {
    enum class Kind { timing, interrupt };
    Kind kind = Kind::interrupt;
    SimTime period;  // timing only
    SimTime phase;   // first release, timing only

    bool is_timing() const { return kind == Kind::timing; }
    bool operator==(const ExecutionPattern&) const = default;
};

/// Ahead-of-time work a node can start as soon as `trigger_channel` delivers,
/// before the node itself is released.
struct ProactiveSpec {
    std::string trigger_channel;
    SimTime precompute_cost;
    double cancel_probability = 0.0;
    SimTime cancel_after = SimTime::from_us(1);
    bool dedicated_worker = true;

    bool operator==(const ProactiveSpec&) const = default;
};

struct NodeSpec {
    std::string name;
    NodeRole role = NodeRole::other;
    ExecutionPattern pattern;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    LatencyModel latency;
    std::optional<LatencyModel> fast_latency;
    std::optional<double> lookahead_m;
    std::optional<double> fast_lookahead_m;
    std::optional<FusionSpec> fusion;
    std::optional<ProactiveSpec> proactive;
    double sensor_range_m = 60.0;  // sensors only
    std::size_t payload_bytes = 0;
    bool stateless = false;

    bool operator==(const NodeSpec&) const = default;
};

enum class ChannelPolicy { fifo, latest_only };

struct ChannelSpec {
    std::string id;
    ChannelPolicy policy = ChannelPolicy::fifo;
    std::size_t capacity = 16;

    bool operator==(const ChannelSpec&) const = default;
};

struct Edge {
    std::string producer;
    std::string channel;
    std::string consumer;
};

struct PipelineGraph {
    std::string name;
    std::vector<ChannelSpec> channels;
    std::vector<NodeSpec> nodes;

    const NodeSpec* find_node(std::string_view name) const;
    const ChannelSpec* find_channel(std::string_view id) const;
    std::vector<Edge> edges() const;
    std::vector<std::string> producers_of(std::string_view channel) const;
    std::vector<std::string> consumers_of(std::string_view channel) const;
    /// Node names in a deterministic topological order. Requires a valid graph.
    std::vector<std::string> topological_order() const;

    bool operator==(const PipelineGraph&) const = default;
};

class GraphError : public std::runtime_error {
public:
    explicit GraphError(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const { return problems_; }

private:
    std::vector<std::string> problems_;
};

/// Empty result means the graph is valid. A cycle is reported as
/// "cycle: A→B→A".
std::vector<std::string> validate_graph(const PipelineGraph& g);

/// Bounded message queue. FIFO drops the oldest entry on overflow;
/// latest-only keeps just the newest message.
template <class T>
class ChannelQueue {
public:
    explicit ChannelQueue(ChannelSpec spec) : spec_(std::move(spec)) {}

    const ChannelSpec& spec() const { return spec_; }

    /// Returns the number of messages dropped to make room.
    std::size_t push(T msg) {
        std::size_t dropped = 0;
        const std::size_t cap = spec_.policy == ChannelPolicy::latest_only ? 1 : std::max<std::size_t>(1, spec_.capacity);
        while (queue_.size() >= cap) {
            queue_.pop_front();
            ++dropped;
        }
        queue_.push_back(std::move(msg));
        dropped_ += dropped;
        return dropped;
    }

    std::optional<T> pop() {
        if (queue_.empty()) return std::nullopt;
        T v = std::move(queue_.front());
        queue_.pop_front();
        return v;
    }

    /// Drains the queue and returns its newest entry.
    std::optional<T> take_latest() {
        if (queue_.empty()) return std::nullopt;
        T v = std::move(queue_.back());
        queue_.clear();
        return v;
    }

    const T* front() const { return queue_.empty() ? nullptr : &queue_.front(); }
    const T* back() const { return queue_.empty() ? nullptr : &queue_.back(); }
    bool empty() const { return queue_.empty(); }
    std::size_t size() const { return queue_.size(); }
    std::size_t dropped() const { return dropped_; }

private:
    ChannelSpec spec_;
    std::deque<T> queue_;
    std::size_t dropped_ = 0;
};

PipelineGraph pipeline_from_json(const json& j);
json pipeline_to_json(const PipelineGraph& g);
/// Parses and validates; throws ParseError or GraphError.
PipelineGraph load_pipeline(const std::string& path);
void save_pipeline(const PipelineGraph& g, const std::string& path);

}  // namespace colasim
