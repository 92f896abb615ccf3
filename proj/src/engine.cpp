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

#include "colasim/engine.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <memory>

#include "colasim/kernel.hpp"
#include "colasim/random.hpp"

namespace colasim {

std::string_view to_string(SpanKind k) {
    switch (k) {
        case SpanKind::normal: return "normal";
        case SpanKind::fastpath: return "fastpath";
        case SpanKind::residual: return "residual";
        case SpanKind::precompute: return "precompute";
    }
    return "normal";
}

SpanKind parse_span_kind(std::string_view s) {
    for (SpanKind k : {SpanKind::normal, SpanKind::fastpath, SpanKind::residual, SpanKind::precompute}) {
        if (to_string(k) == s) return k;
    }
    throw ParseError("unknown span kind '" + std::string(s) + "'");
}

std::string_view to_string(DecisionKind k) {
    switch (k) {
        case DecisionKind::hold: return "hold";
        case DecisionKind::brake: return "brake";
        case DecisionKind::lane_change: return "lane_change";
    }
    return "hold";
}

DecisionKind parse_decision_kind(std::string_view s) {
    for (DecisionKind k : {DecisionKind::hold, DecisionKind::brake, DecisionKind::lane_change}) {
        if (to_string(k) == s) return k;
    }
    throw ParseError("unknown decision '" + std::string(s) + "'");
}

double RunTrace::busy_fraction() const {
    if (workers.empty() || duration <= SimTime::zero()) return 0.0;
    double busy = 0.0;
    for (const auto& w : workers) busy += static_cast<double>(w.busy.us());
    return busy / (static_cast<double>(workers.size()) * static_cast<double>(duration.us()));
}

namespace {

double commanded_accel(const TrajectorySpec& traj, SimTime before) {
    double a = traj.initial.a;
    for (const auto& seg : traj.segments) {
        if (seg.start >= before) break;
        a = seg.accel;
    }
    return a;
}

}  // namespace

TrajectorySpec apply_control(const TrajectorySpec& ego, const Decision& decision, SimTime t, SimTime actuation_delay) {
    if (decision.kind == DecisionKind::hold) return ego;
    const SimTime effective = t + actuation_delay;
    TrajectorySpec out = ego;
    std::erase_if(out.segments, [&](const Segment& s) { return s.start >= effective; });
    Segment seg{effective, 0.0, std::nullopt};
    if (decision.kind == DecisionKind::brake) {
        seg.accel = -std::abs(decision.brake_mps2);
    } else {
        seg.accel = commanded_accel(out, effective);
        seg.lane = agent_state_at(out, effective).lane + (decision.lane_dir < 0 ? -1 : 1);
    }
    out.segments.push_back(seg);
    return out;
}

namespace {

SimTime first_capture_at_or_after(const NodeSpec& sensor, SimTime t0) {
    const SimTime phase = sensor.pattern.phase;
    if (t0 <= phase) return phase;
    const std::int64_t period = sensor.pattern.period.us();
    const std::int64_t k = (t0.us() - phase.us() + period - 1) / period;
    return phase + SimTime::from_us(k * period);
}

}  // namespace

ReactionRecord measure_reaction(const RunTrace& trace, const PipelineGraph& graph, const HazardEvent& hazard) {
    ReactionRecord r;
    r.label = hazard.label;
    r.agent_id = hazard.agent_id;
    r.t0 = hazard.time;
    const FrameRecord* best = nullptr;
    for (const auto& f : trace.frames) {
        if (f.sensor_ts < hazard.time) continue;
        if (std::find(f.object_ids.begin(), f.object_ids.end(), hazard.agent_id) == f.object_ids.end()) continue;
        if (!best || f.done < best->done) best = &f;
    }
    if (!best) return r;
    const NodeSpec* sensor = graph.find_node(best->sensor);
    if (!sensor) throw EngineError("frame references unknown sensor " + best->sensor);
    r.reacted = true;
    r.t1 = best->done;
    r.t_sensor = first_capture_at_or_after(*sensor, hazard.time) - hazard.time;
    r.t_module = best->module;
    r.t_bubble = r.t1 - r.t0 - r.t_sensor - r.t_module;
    r.in_radius = std::find(best->in_radius_ids.begin(), best->in_radius_ids.end(), hazard.agent_id) !=
                  best->in_radius_ids.end();
    r.sensor = best->sensor;
    r.sensor_seq = best->seq;
    r.path = best->path;
    return r;
}

namespace {

struct Lineage {
    std::string sensor;
    std::uint64_t seq = 0;
    SimTime sensor_ts;
    SimTime chain;  // summed execution time along the critical chain
    std::vector<PathStep> path;
    bool fastpath = false;
};

struct Message {
    std::uint64_t seq = 0;
    SimTime sensor_ts;
    SimTime created_ts;
    std::vector<ObjectSnapshot> objects;
    SimTime deadline;
    bool partial = false;
    std::string provenance;
    Lineage lineage;
};

using MsgPtr = std::shared_ptr<const Message>;

struct Delivery {
    MsgPtr msg;
    SimTime arrived;
};

struct Worker {
    std::string name;
    bool busy = false;
    SimTime busy_total;
    SimTime predicted_free;
};

struct Group {
    ProcessorGroup spec;
    std::vector<Worker> workers;
    std::deque<int> ready;
    std::vector<int> nodes;
};

struct Precompute {
    SimTime arrival;
    bool cancelled = false;
    int group = -1;  // worker borrowed from this group, -1 when dedicated
    int worker = -1;
    bool worker_held = false;
    std::optional<EventHandle> done_event;
    std::optional<EventHandle> cancel_event;
};

struct NodeRt {
    const NodeSpec* spec = nullptr;
    int group = -1;
    int running = 0;
    int max_running = 1;
    std::optional<ChannelQueue<Delivery>> inbox;
    std::map<std::string, MsgPtr> side;
    bool tick_pending = false;
    SimTime tick_release;
    bool in_ready = false;
    std::uint64_t execs = 0;
    std::uint64_t out_seq = 0;
    TrackHistory tracks;
    std::unique_ptr<RandomStream> noise;
    std::unique_ptr<RandomStream> cancel_rng;
    std::optional<Precompute> pre;
    SimTime last_predicted;
    bool sink = false;
};

struct Execution {
    int node = -1;
    int group = -1;
    int worker = -1;
    bool guest = false;
    std::uint64_t exec = 0;
    SimTime release;
    SimTime start;
    SpanKind kind = SpanKind::normal;
    PathChoice choice = PathChoice::normal;
    MsgPtr input;
    std::vector<ObjectSnapshot> objects;  // output set
    std::vector<ObjectSnapshot> residual;
    bool partial_mode = false;
    SimTime saved;
};

class Engine {
public:
    Engine(const Scenario& scenario, const PipelineGraph& graph, const SimConfig& config, std::uint64_t seed)
        : sc_(scenario), g_(graph), cfg_(config), seed_(seed), ego_{scenario.ego, {}, SimTime::zero()} {
        auto problems = validate_graph(g_);
        for (auto& p : validate_sim_config(cfg_, g_)) problems.push_back(p);
        for (auto& p : validate_scenario(sc_)) problems.push_back(p);
        if (!problems.empty()) {
            std::string msg = "invalid run setup:";
            for (const auto& p : problems) msg += "\n  " + p;
            throw EngineError(msg);
        }
        setup();
    }

    RunTrace run() {
        trace_.scenario_name = sc_.name;
        trace_.scenario_hash = scenario_hash(sc_);
        trace_.pipeline_name = g_.name;
        trace_.seed = seed_;
        trace_.duration = sc_.duration;
        trace_.config = cfg_;

        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            const NodeSpec& s = *nodes_[i].spec;
            if (!s.pattern.is_timing()) continue;
            const int idx = static_cast<int>(i);
            if (s.role == NodeRole::sensor) {
                schedule_periodic(idx, 0, [this, idx](std::uint64_t k) { capture(idx, k); });
            } else {
                schedule_periodic(idx, 0, [this, idx](std::uint64_t k) { on_tick(idx, k); });
            }
        }
        schedule_safety(0);
        kernel_.run_until(sc_.duration);

        trace_.ego = ego_;
        for (const auto& grp : groups_) {
            for (const auto& w : grp.workers) trace_.workers.push_back({w.name, w.busy_total});
        }
        for (const auto& h : sc_.hazards) trace_.reactions.push_back(measure_reaction(trace_, g_, h));
        return std::move(trace_);
    }

private:
    void setup() {
        std::map<std::string, int> index;
        for (const auto& n : g_.nodes) {
            index[n.name] = static_cast<int>(nodes_.size());
            NodeRt rt;
            rt.spec = &n;
            rt.noise = std::make_unique<RandomStream>(seed_, "latency:" + n.name);
            rt.cancel_rng = std::make_unique<RandomStream>(seed_, "proactive:" + n.name);
            if (!n.inputs.empty()) rt.inbox.emplace(*g_.find_channel(n.inputs.front()));
            nodes_.push_back(std::move(rt));
        }
        const bool extra = cfg_.mitigation.fastpath && cfg_.mitigation.extra_worker;
        for (const auto& spec : resolve_groups(g_, cfg_)) {
            Group grp;
            grp.spec = spec;
            int workers = spec.workers;
            bool has_stateless = false;
            for (const auto& name : spec.nodes) {
                const int idx = index.at(name);
                if (nodes_[idx].spec->role == NodeRole::sensor) continue;
                nodes_[idx].group = static_cast<int>(groups_.size());
                grp.nodes.push_back(idx);
                if (extra && nodes_[idx].spec->stateless) {
                    nodes_[idx].max_running = 2;
                    has_stateless = true;
                }
            }
            if (has_stateless) ++workers;
            for (int w = 0; w < workers; ++w) grp.workers.push_back(Worker{spec.name + "/" + std::to_string(w), false, {}, {}});
            groups_.push_back(std::move(grp));
        }

        bool any_control = false;
        for (const auto& n : g_.nodes) any_control = any_control || n.role == NodeRole::control;
        for (auto& rt : nodes_) {
            if (any_control) {
                rt.sink = rt.spec->role == NodeRole::control;
            } else {
                bool consumed = false;
                for (const auto& c : rt.spec->outputs) consumed = consumed || !g_.consumers_of(c).empty();
                rt.sink = !consumed;
            }
        }
        for (const auto& c : g_.channels) {
            for (std::size_t i = 0; i < nodes_.size(); ++i) {
                const auto& in = nodes_[i].spec->inputs;
                for (std::size_t k = 0; k < in.size(); ++k) {
                    if (in[k] == c.id) routes_[c.id].push_back({static_cast<int>(i), k == 0});
                }
                const auto& pro = nodes_[i].spec->proactive;
                if (pro && pro->trigger_channel == c.id) proactive_listeners_[c.id].push_back(static_cast<int>(i));
            }
        }
    }

    template <class F>
    void schedule_periodic(int node, std::uint64_t k, F fn) {
        const ExecutionPattern& p = nodes_[node].spec->pattern;
        const SimTime at = p.phase + p.period * static_cast<std::int64_t>(k);
        if (at > sc_.duration) return;
        kernel_.schedule(at, [this, node, k, fn]() {
            fn(k);
            schedule_periodic(node, k + 1, fn);
        });
    }

    void schedule_safety(std::uint64_t k) {
        const SimTime at = cfg_.tick * static_cast<std::int64_t>(k);
        if (at > sc_.duration) return;
        kernel_.schedule(at, [this, k]() {
            safety_tick();
            schedule_safety(k + 1);
        });
    }

    // Sensors -------------------------------------------------------------

    void capture(int idx, std::uint64_t k) {
        NodeRt& n = nodes_[idx];
        const SimTime now = kernel_.now();
        const AgentState ego = agent_state_at(ego_, now);
        const DeadlinePolicy policy{cfg_.mitigation.deadline_cap, cfg_.budget_horizon};
        auto msg = std::make_shared<Message>();
        msg->seq = k;
        msg->sensor_ts = now;
        msg->created_ts = now;
        msg->provenance = n.spec->name;
        for (const auto& v : visible_agents(sc_, ego, now, n.spec->sensor_range_m)) {
            ObjectSnapshot o;
            o.id = v.id;
            o.kind = v.kind;
            o.state = v.state;
            o.observed_ts = now;
            o.deadline = object_deadline(now, ego, v.state, sc_.d_buffer_m, cfg_.rss, policy);
            o.distance_m = planar_distance(ego, v.state);
            msg->objects.push_back(std::move(o));
        }
        msg->deadline = message_deadline(msg->objects, now, cfg_.mitigation.deadline_cap);
        msg->lineage = Lineage{n.spec->name, k, now, SimTime::zero(), {}, false};
        n.execs = k + 1;

        SpanRecord span;
        span.node = n.spec->name;
        span.exec = k;
        span.sensor = n.spec->name;
        span.sensor_seq = k;
        span.release = span.start = span.end = now;
        span.worker = "-";
        span.objects = static_cast<std::int64_t>(msg->objects.size());
        trace_.spans.push_back(std::move(span));

        publish(idx, msg);
        dispatch();
    }

    // Message flow --------------------------------------------------------

    void publish(int idx, const MsgPtr& msg) {
        const SimTime now = kernel_.now();
        for (const auto& ch : nodes_[idx].spec->outputs) {
            auto it = routes_.find(ch);
            if (it != routes_.end()) {
                for (const auto& [consumer, primary] : it->second) {
                    NodeRt& c = nodes_[consumer];
                    if (!primary) {
                        c.side[ch] = msg;
                        continue;
                    }
                    trace_.dropped_messages += static_cast<std::int64_t>(c.inbox->push(Delivery{msg, now}));
                    if (!c.spec->pattern.is_timing()) mark_ready(consumer);
                }
            }
            if (cfg_.mitigation.proactive) {
                auto lit = proactive_listeners_.find(ch);
                if (lit != proactive_listeners_.end()) {
                    for (int p : lit->second) start_precompute(p);
                }
            }
        }
    }

    void on_tick(int idx, std::uint64_t) {
        NodeRt& n = nodes_[idx];
        if (n.inbox->empty()) return;  // nothing new since the last run
        if (!n.tick_pending) {
            n.tick_pending = true;
            n.tick_release = kernel_.now();
        }
        mark_ready(idx);
        dispatch();
    }

    bool has_work(const NodeRt& n) const {
        if (!n.inbox || n.inbox->empty()) return false;
        return n.spec->pattern.is_timing() ? n.tick_pending : true;
    }

    bool runnable(const NodeRt& n) const { return n.running < n.max_running && has_work(n); }

    void mark_ready(int idx) {
        NodeRt& n = nodes_[idx];
        if (n.in_ready || n.group < 0) return;
        n.in_ready = true;
        groups_[n.group].ready.push_back(idx);
    }

    // The message start() would consume next.
    const Delivery& peek_input(const NodeRt& n) const {
        return *(n.spec->pattern.is_timing() ? n.inbox->back() : n.inbox->front());
    }

    // Scheduling ----------------------------------------------------------

    int free_worker(const Group& grp) const {
        for (std::size_t w = 0; w < grp.workers.size(); ++w) {
            if (!grp.workers[w].busy) return static_cast<int>(w);
        }
        return -1;
    }

    int first_runnable(Group& grp) {
        for (auto it = grp.ready.begin(); it != grp.ready.end();) {
            NodeRt& n = nodes_[*it];
            if (!has_work(n)) {
                n.in_ready = false;
                it = grp.ready.erase(it);
                continue;
            }
            if (n.running < n.max_running) return *it;
            ++it;
        }
        return -1;
    }

    void unready(int idx) {
        NodeRt& n = nodes_[idx];
        auto& q = groups_[n.group].ready;
        q.erase(std::remove(q.begin(), q.end(), idx), q.end());
        n.in_ready = false;
    }

    void dispatch() {
        bool progress = true;
        while (progress) {
            progress = false;
            for (std::size_t gi = 0; gi < groups_.size(); ++gi) {
                Group& grp = groups_[gi];
                int w;
                while ((w = free_worker(grp)) >= 0) {
                    const int idx = first_runnable(grp);
                    if (idx < 0) break;
                    start(idx, static_cast<int>(gi), w, false);
                    progress = true;
                }
            }
            if (!progress && cfg_.mitigation.stealing) progress = try_steal();
        }
    }

    SimTime predicted_cost(const NodeRt& n, const std::vector<ObjectSnapshot>& objects) const {
        return predict_latency(n.spec->latency, count_kinds(objects), n.spec->lookahead_m);
    }

    bool try_steal() {
        const double sf = cfg_.mitigation.safety_factor;
        for (std::size_t gi = 0; gi < groups_.size(); ++gi) {
            Group& grp = groups_[gi];
            if (free_worker(grp) >= 0) continue;
            const int idx = first_runnable(grp);
            if (idx < 0) continue;
            const NodeRt& guest = nodes_[idx];
            const Delivery& next = peek_input(guest);
            StealRequest req;
            req.node = guest.spec->name;
            req.counts = count_kinds(next.msg->objects);
            req.predicted_guest_cost = inflate(predicted_cost(guest, next.msg->objects), sf);
            for (std::size_t hi = 0; hi < groups_.size(); ++hi) {
                if (hi == gi) continue;
                Group& host = groups_[hi];
                const int w = free_worker(host);
                if (w < 0 || first_runnable(host) >= 0) continue;
                req.host_group = host.spec.name;
                if (host.spec.budget) {
                    HostState hs;
                    hs.budget = *host.spec.budget;
                    const SimTime now = kernel_.now();
                    for (const auto& wk : host.workers) {
                        hs.worker_loads.push_back(wk.busy && wk.predicted_free > now ? wk.predicted_free - now
                                                                                     : SimTime::zero());
                    }
                    for (int h : host.nodes) {
                        const NodeRt& hn = nodes_[h];
                        const SimTime base = predict_latency(hn.spec->latency, KindCounts{}, hn.spec->lookahead_m);
                        hs.reserve = std::max(hs.reserve, inflate(std::max(base, hn.last_predicted), sf));
                    }
                    if (steal_admission(req, hs) == Admission::reject) continue;
                }
                ++trace_.steals;
                start(idx, static_cast<int>(hi), w, true);
                return true;
            }
        }
        return false;
    }

    SimTime downstream_estimate(int idx, const KindCounts& counts) {
        SimTime best;
        for (const auto& ch : nodes_[idx].spec->outputs) {
            auto it = routes_.find(ch);
            if (it == routes_.end()) continue;
            for (const auto& [consumer, primary] : it->second) {
                if (!primary) continue;
                const NodeSpec& c = *nodes_[consumer].spec;
                const SimTime own = predict_latency(c.latency, counts, c.lookahead_m);
                best = std::max(best, own + downstream_estimate(consumer, counts));
            }
        }
        return best;
    }

    void start(int idx, int gi, int wi, bool guest) {
        NodeRt& n = nodes_[idx];
        const NodeSpec& spec = *n.spec;
        const SimTime now = kernel_.now();

        Delivery in = *(spec.pattern.is_timing() ? n.inbox->take_latest() : n.inbox->pop());
        SimTime release = in.arrived;
        if (spec.pattern.is_timing()) {
            release = n.tick_release;
            n.tick_pending = false;
        }
        unready(idx);
        if (has_work(n)) mark_ready(idx);

        Execution ex;
        ex.node = idx;
        ex.group = gi;
        ex.worker = wi;
        ex.guest = guest;
        ex.exec = n.execs++;
        ex.release = release;
        ex.start = now;
        ex.input = in.msg;
        ex.objects = in.msg->objects;

        if (spec.fusion) {
            std::vector<std::string> ids;
            for (const auto& o : ex.objects) ids.push_back(o.id);
            FusionUpdate fu = fusion_update(*spec.fusion, n.tracks, ids);
            n.tracks = std::move(fu.history);
            std::erase_if(ex.objects, [&](const ObjectSnapshot& o) {
                return !std::binary_search(fu.published.begin(), fu.published.end(), o.id);
            });
        }

        const KindCounts counts = count_kinds(ex.objects);
        SimTime latency;
        if (cfg_.mitigation.fastpath && spec.fast_latency) {
            const SimTime normal_pred = predict_latency(spec.latency, counts, spec.lookahead_m);
            const PathDecision pd =
                choose_path(normal_pred, in.msg->deadline, now, downstream_estimate(idx, counts));
            ex.choice = pd.choice;
        }
        if (ex.choice == PathChoice::fastpath) {
            ex.kind = SpanKind::fastpath;
            if (spec.fast_lookahead_m) {
                latency = sample_latency(*spec.fast_latency, counts, spec.fast_lookahead_m, spec.payload_bytes, *n.noise);
            } else {
                PartialSplit split = partial_update(ex.objects, cfg_.mitigation.radius_m);
                ex.objects = std::move(split.critical);
                ex.residual = std::move(split.residual);
                ex.partial_mode = true;
                latency = sample_latency(*spec.fast_latency, count_kinds(ex.objects), spec.lookahead_m,
                                         spec.payload_bytes, *n.noise);
            }
        } else {
            latency = sample_latency(spec.latency, counts, spec.lookahead_m, spec.payload_bytes, *n.noise);
        }
        n.last_predicted = predict_latency(spec.latency, counts, spec.lookahead_m);

        if (n.pre) ex.saved = consume_precompute(idx);
        if (ex.saved > SimTime::zero()) {
            const SimTime floor = spec.latency.floor;
            latency = latency > ex.saved + floor ? latency - ex.saved : std::min(latency, floor);
        }

        occupy(gi, wi, now + inflate(latency_prediction(n, ex), cfg_.mitigation.safety_factor));
        ++n.running;
        kernel_.schedule(now + latency, [this, ex = std::move(ex)]() mutable { finish(std::move(ex)); });
    }

    SimTime latency_prediction(const NodeRt& n, const Execution& ex) const {
        const NodeSpec& spec = *n.spec;
        const KindCounts c = count_kinds(ex.objects);
        if (ex.kind == SpanKind::fastpath && spec.fast_latency) {
            return predict_latency(*spec.fast_latency, c, spec.fast_lookahead_m ? spec.fast_lookahead_m : spec.lookahead_m);
        }
        return predict_latency(spec.latency, c, spec.lookahead_m);
    }

    void occupy(int gi, int wi, SimTime predicted_free) {
        Worker& w = groups_[gi].workers[wi];
        w.busy = true;
        w.predicted_free = predicted_free;
    }

    void release_worker(int gi, int wi, SimTime busy_since) {
        Worker& w = groups_[gi].workers[wi];
        w.busy = false;
        w.busy_total += kernel_.now() - busy_since;
    }

    void record_span(const Execution& ex, SpanKind kind, std::size_t objects) {
        const NodeRt& n = nodes_[ex.node];
        SpanRecord s;
        s.node = n.spec->name;
        s.exec = ex.exec;
        s.sensor = ex.input->lineage.sensor;
        s.sensor_seq = ex.input->lineage.seq;
        s.release = ex.release;
        s.start = ex.start;
        s.end = kernel_.now();
        s.worker = groups_[ex.group].workers[ex.worker].name;
        s.guest = ex.guest;
        s.kind = kind;
        s.objects = static_cast<std::int64_t>(objects);
        s.saved = ex.saved;
        trace_.spans.push_back(std::move(s));

        const Group& home = groups_[n.group];
        if (home.spec.budget && kernel_.now() - ex.release > *home.spec.budget) {
            trace_.budget_misses.push_back(
                {home.spec.name, n.spec->name, ex.exec, ex.release, kernel_.now(), *home.spec.budget});
        }
    }

    MsgPtr make_output(const Execution& ex, std::vector<ObjectSnapshot> objects, bool partial) {
        NodeRt& n = nodes_[ex.node];
        const SimTime now = kernel_.now();
        auto out = std::make_shared<Message>();
        out->seq = n.out_seq++;
        out->sensor_ts = ex.input->sensor_ts;
        out->created_ts = now;
        out->objects = std::move(objects);
        out->deadline = message_deadline(out->objects, out->sensor_ts, cfg_.mitigation.deadline_cap);
        out->partial = partial;
        out->provenance = n.spec->name;
        out->lineage = ex.input->lineage;
        out->lineage.chain += now - ex.start;
        out->lineage.path.push_back({n.spec->name, ex.choice});
        out->lineage.fastpath = out->lineage.fastpath || ex.choice == PathChoice::fastpath;
        return out;
    }

    void finish(Execution ex) {
        NodeRt& n = nodes_[ex.node];
        record_span(ex, ex.kind, ex.objects.size());
        const bool partial = ex.partial_mode || ex.input->partial;
        MsgPtr out = make_output(ex, ex.objects, partial);
        emit(ex.node, out);

        if (!ex.residual.empty()) {
            // Remaining objects follow on the same worker with the normal model.
            release_worker(ex.group, ex.worker, ex.start);
            Execution rest;
            rest.node = ex.node;
            rest.group = ex.group;
            rest.worker = ex.worker;
            rest.guest = ex.guest;
            rest.exec = ex.exec;
            rest.release = kernel_.now();
            rest.start = kernel_.now();
            rest.kind = SpanKind::residual;
            rest.choice = PathChoice::fastpath;
            rest.input = ex.input;
            rest.objects = std::move(ex.residual);
            const NodeSpec& spec = *n.spec;
            const SimTime latency = sample_latency(spec.latency, count_kinds(rest.objects), spec.lookahead_m,
                                                   spec.payload_bytes, *n.noise);
            occupy(rest.group, rest.worker, kernel_.now() + inflate(latency_prediction(n, rest), cfg_.mitigation.safety_factor));
            kernel_.schedule(kernel_.now() + latency, [this, rest = std::move(rest)]() mutable { finish_residual(std::move(rest)); });
            dispatch();
            return;
        }
        release_worker(ex.group, ex.worker, ex.start);
        --n.running;
        if (has_work(n)) mark_ready(ex.node);
        dispatch();
    }

    void finish_residual(Execution ex) {
        NodeRt& n = nodes_[ex.node];
        record_span(ex, SpanKind::residual, ex.objects.size());
        const SimTime cap_line = ex.input->sensor_ts + cfg_.mitigation.deadline_cap;
        const bool urgent = std::any_of(ex.objects.begin(), ex.objects.end(),
                                        [&](const ObjectSnapshot& o) { return o.deadline < cap_line; });
        if (urgent) {
            // Residual output carries only the residual span on its chain.
            MsgPtr out = make_output(ex, ex.objects, true);
            emit(ex.node, out);
        }
        release_worker(ex.group, ex.worker, ex.start);
        --n.running;
        if (has_work(n)) mark_ready(ex.node);
        dispatch();
    }

    void emit(int idx, const MsgPtr& out) {
        NodeRt& n = nodes_[idx];
        if (n.sink) record_frame(idx, *out);
        if (n.spec->role == NodeRole::control) control(idx, *out);
        publish(idx, out);
    }

    void record_frame(int idx, const Message& m) {
        FrameRecord f;
        f.sensor = m.lineage.sensor;
        f.seq = m.lineage.seq;
        f.sink = nodes_[idx].spec->name;
        f.sensor_ts = m.sensor_ts;
        f.done = m.created_ts;
        f.e2e = f.done - f.sensor_ts;
        f.module = m.lineage.chain;
        f.bubble = f.e2e - f.module;
        f.fastpath = m.lineage.fastpath;
        f.partial = m.partial;
        f.objects = static_cast<std::int64_t>(m.objects.size());
        f.message_deadline = m.deadline;
        for (const auto& o : m.objects) {
            f.object_ids.push_back(o.id);
            if (o.distance_m <= cfg_.mitigation.radius_m) f.in_radius_ids.push_back(o.id);
        }
        f.in_radius = !f.in_radius_ids.empty();
        f.path = m.lineage.path;
        trace_.frames.push_back(std::move(f));
    }

    // Control -------------------------------------------------------------

    void control(int idx, const Message& m) {
        const SimTime now = kernel_.now();
        const AgentState ego = agent_state_at(ego_, now);
        std::optional<SimTime> worst;
        std::string cause;
        for (const auto& o : m.objects) {
            const TrajectorySpec seen{o.state, {}, SimTime::zero()};
            const AgentState predicted = agent_state_at(seen, now - o.observed_ts);
            const ReactionBudget b = object_budget(ego, predicted, sc_.d_buffer_m, cfg_.rss, cfg_.budget_horizon);
            if (b.budget && (!worst || *b.budget < *worst)) {
                worst = b.budget;
                cause = o.id;
            }
        }
        if (!worst || *worst >= cfg_.control.response_margin) return;
        const Decision d = Decision::brake(cfg_.control.brake_mps2);
        const SimTime effective = now + cfg_.actuation_delay;
        if (commanded_accel(ego_, effective + SimTime::from_us(1)) == -d.brake_mps2) return;
        ego_ = apply_control(ego_, d, now, cfg_.actuation_delay);
        trace_.decisions.push_back({now, effective, nodes_[idx].spec->name, d, cause});
    }

    // Proactive precomputation --------------------------------------------

    void end_precompute_hold(int idx) {
        Precompute& p = *nodes_[idx].pre;
        if (!p.worker_held) return;
        Worker& w = groups_[p.group].workers[p.worker];
        w.busy = false;
        w.busy_total += kernel_.now() - p.arrival;
        p.worker_held = false;

        SpanRecord s;
        s.node = nodes_[idx].spec->name;
        s.release = s.start = p.arrival;
        s.end = kernel_.now();
        s.worker = w.name;
        s.kind = SpanKind::precompute;
        trace_.spans.push_back(std::move(s));
    }

    void drop_precompute(int idx) {
        NodeRt& n = nodes_[idx];
        if (!n.pre) return;
        if (n.pre->done_event) kernel_.cancel(*n.pre->done_event);
        if (n.pre->cancel_event) kernel_.cancel(*n.pre->cancel_event);
        end_precompute_hold(idx);
        n.pre.reset();
    }

    void start_precompute(int idx) {
        NodeRt& n = nodes_[idx];
        const ProactiveSpec& ps = *n.spec->proactive;
        drop_precompute(idx);
        const SimTime now = kernel_.now();
        // Draw unconditionally so the stream position depends only on arrivals.
        const bool will_cancel = n.cancel_rng->uniform01() < ps.cancel_probability;
        Precompute p;
        p.arrival = now;
        if (!ps.dedicated_worker) {
            Group& grp = groups_[n.group];
            const int w = free_worker(grp);
            if (w < 0) return;  // no capacity to run ahead
            p.group = n.group;
            p.worker = w;
            p.worker_held = true;
            occupy(p.group, w, now + ps.precompute_cost);
            p.done_event = kernel_.schedule(now + ps.precompute_cost, [this, idx]() {
                NodeRt& node = nodes_[idx];
                node.pre->done_event.reset();
                end_precompute_hold(idx);
                dispatch();
            });
        }
        if (will_cancel) {
            p.cancel_event = kernel_.schedule(now + ps.cancel_after, [this, idx]() {
                NodeRt& node = nodes_[idx];
                node.pre->cancel_event.reset();
                node.pre->cancelled = true;
                if (node.pre->done_event) {
                    kernel_.cancel(*node.pre->done_event);
                    node.pre->done_event.reset();
                }
                end_precompute_hold(idx);
                dispatch();
            });
        }
        n.pre = p;
    }

    SimTime consume_precompute(int idx) {
        NodeRt& n = nodes_[idx];
        if (!n.pre) return SimTime::zero();
        const SimTime now = kernel_.now();
        const ProactiveSpec& ps = *n.spec->proactive;
        const SimTime saved = proactive_saving(ps.precompute_cost, n.pre->arrival, now, n.pre->cancelled);
        trace_.proactive.push_back({n.spec->name, n.pre->arrival, now, saved, n.pre->cancelled});
        drop_precompute(idx);
        return saved;
    }

    // Safety --------------------------------------------------------------

    void safety_tick() {
        const SimTime now = kernel_.now();
        const AgentState ego = agent_state_at(ego_, now);
        SafetySample s;
        s.t = now;
        s.ego_s = ego.s;
        s.ego_v = ego.v;
        for (const auto& a : sc_.agents) {
            const AgentState st = agent_state_at(a.trajectory, now);
            const SafetyStatus status = check_safety(ego, st, cfg_.rss, sc_.d_buffer_m);
            if (status.level > s.level) {
                s.level = status.level;
                s.agent = a.id;
            }
            bool& colliding = colliding_[a.id];
            if (status.level == SafetyLevel::collision && !colliding) ++trace_.collisions;
            colliding = status.level == SafetyLevel::collision;
            if (in_ego_path(ego, st, cfg_.rss) && (!s.min_gap_m || status.longitudinal_gap < *s.min_gap_m)) {
                s.min_gap_m = status.longitudinal_gap;
            }
        }
        if (s.level == SafetyLevel::violation) ++trace_.violations;
        trace_.safety.push_back(std::move(s));
    }

    const Scenario& sc_;
    const PipelineGraph& g_;
    const SimConfig& cfg_;
    std::uint64_t seed_;
    TrajectorySpec ego_;
    Kernel kernel_;
    RunTrace trace_;
    std::vector<NodeRt> nodes_;
    std::vector<Group> groups_;
    std::map<std::string, std::vector<std::pair<int, bool>>> routes_;
    std::map<std::string, std::vector<int>> proactive_listeners_;
    std::map<std::string, bool> colliding_;
};

}  // namespace

RunTrace run_simulation(const Scenario& scenario, const PipelineGraph& graph, const SimConfig& config,
                        std::uint64_t seed) {
    Engine engine(scenario, graph, config, seed);
    return engine.run();
}

}  // namespace colasim
