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

#include "colasim/latency.hpp"

#include <cmath>

namespace colasim {

LatencyModel LatencyModel::fixed(SimTime latency) {
    LatencyModel m;
    m.offset = latency;
    m.floor = std::min(m.floor, latency);
    return m;
}

std::vector<std::string> validate_latency_model(const LatencyModel& m, const std::string& where) {
    std::vector<std::string> out;
    if (m.floor <= SimTime::zero()) out.push_back(where + ".floor_us: must be > 0");
    if (m.noise.kind == NoiseModel::Kind::lognormal && !(m.noise.sigma >= 0.0)) {
        out.push_back(where + ".noise.sigma: must be >= 0");
    }
    if (m.contention) {
        if (!(m.contention->slope_us_per_miss >= 0) || !(m.contention->base_misses >= 0) ||
            !(m.contention->misses_per_kib >= 0)) {
            out.push_back(where + ".contention: coefficients must be >= 0");
        }
    }
    if (m.lookahead_cost_us_per_m && !(*m.lookahead_cost_us_per_m >= 0)) {
        out.push_back(where + ".lookahead_us_per_m: must be >= 0");
    }
    return out;
}

SimTime predict_latency(const LatencyModel& m, const KindCounts& counts, std::optional<double> lookahead_m) {
    SimTime total = m.offset;
    for (std::size_t k = 0; k < counts.size(); ++k) total += m.per_kind_cost[k] * std::max<std::int64_t>(0, counts[k]);
    if (lookahead_m && m.lookahead_cost_us_per_m) {
        total += SimTime::from_us(std::llround(std::max(0.0, *lookahead_m) * *m.lookahead_cost_us_per_m));
    }
    return std::max(total, m.floor);
}

double contention_misses(const ContentionModel& c, std::size_t payload_bytes) {
    return c.base_misses + c.misses_per_kib * static_cast<double>(payload_bytes) / 1024.0;
}

SimTime sample_latency(const LatencyModel& m, const KindCounts& counts, std::optional<double> lookahead_m,
                       std::size_t payload_bytes, RandomStream& stream) {
    const SimTime base = predict_latency(m, counts, lookahead_m);
    if (m.noise.kind == NoiseModel::Kind::none && !m.contention) return base;

    double us = static_cast<double>(base.us());
    switch (m.noise.kind) {
        case NoiseModel::Kind::none: break;
        case NoiseModel::Kind::lognormal: us *= std::exp(m.noise.sigma * stream.normal()); break;
        case NoiseModel::Kind::uniform: {
            const double j = static_cast<double>(m.noise.jitter.us());
            us += stream.uniform(-j, j);
            break;
        }
    }
    if (m.contention) us += m.contention->slope_us_per_miss * contention_misses(*m.contention, payload_bytes);
    const double floor = static_cast<double>(m.floor.us());
    return SimTime::from_us(std::llround(std::max(us, floor)));
}

bool is_stochastic(const LatencyModel& m) {
    switch (m.noise.kind) {
        case NoiseModel::Kind::none: return false;
        case NoiseModel::Kind::lognormal: return m.noise.sigma > 0.0;
        case NoiseModel::Kind::uniform: return m.noise.jitter > SimTime::zero();
    }
    return false;
}

namespace {

SimTime read_us(const ObjectReader& r, std::string_view key, SimTime fallback) {
    auto v = r.opt_integer(key);
    if (!v) return fallback;
    if (*v < 0) r.fail(key, "must be >= 0");
    return SimTime::from_us(*v);
}

}  // namespace

LatencyModel latency_from_json(const json& j, const std::string& path) {
    ObjectReader r(j, path);
    r.allow_only({"per_kind_us", "offset_us", "floor_us", "noise", "contention", "lookahead_us_per_m"});
    LatencyModel m;
    if (r.has("per_kind_us")) {
        ObjectReader kr(r.object("per_kind_us"), r.child("per_kind_us"));
        kr.allow_only({"vehicle", "pedestrian", "cyclist"});
        for (AgentKind k : kAgentKinds) {
            m.per_kind_cost[static_cast<std::size_t>(k)] = read_us(kr, to_string(k), SimTime::zero());
        }
    }
    m.offset = read_us(r, "offset_us", SimTime::zero());
    m.floor = read_us(r, "floor_us", std::min(SimTime::from_us(1), m.offset > SimTime::zero() ? m.offset : SimTime::from_us(1)));
    if (r.has("noise")) {
        ObjectReader nr(r.object("noise"), r.child("noise"));
        nr.allow_only({"type", "sigma", "jitter_us"});
        const std::string type = nr.string("type");
        if (type == "none") {
            m.noise.kind = NoiseModel::Kind::none;
        } else if (type == "lognormal") {
            m.noise.kind = NoiseModel::Kind::lognormal;
            m.noise.sigma = nr.number("sigma");
        } else if (type == "uniform") {
            m.noise.kind = NoiseModel::Kind::uniform;
            m.noise.jitter = read_us(nr, "jitter_us", SimTime::zero());
        } else {
            nr.fail("type", "expected none, lognormal or uniform");
        }
    }
    if (r.has("contention")) {
        ObjectReader cr(r.object("contention"), r.child("contention"));
        cr.allow_only({"slope_us_per_miss", "base_misses", "misses_per_kib"});
        ContentionModel c;
        c.slope_us_per_miss = cr.opt_number("slope_us_per_miss").value_or(c.slope_us_per_miss);
        c.base_misses = cr.opt_number("base_misses").value_or(0.0);
        c.misses_per_kib = cr.opt_number("misses_per_kib").value_or(0.0);
        m.contention = c;
    }
    m.lookahead_cost_us_per_m = r.opt_number("lookahead_us_per_m");
    auto problems = validate_latency_model(m, path);
    if (!problems.empty()) throw ParseError(problems.front());
    return m;
}

json latency_to_json(const LatencyModel& m) {
    json per_kind = json::object();
    for (AgentKind k : kAgentKinds) per_kind[std::string(to_string(k))] = m.per_kind_cost[static_cast<std::size_t>(k)].us();
    json j{{"per_kind_us", per_kind}, {"offset_us", m.offset.us()}, {"floor_us", m.floor.us()}};
    switch (m.noise.kind) {
        case NoiseModel::Kind::none: j["noise"] = json{{"type", "none"}}; break;
        case NoiseModel::Kind::lognormal: j["noise"] = json{{"type", "lognormal"}, {"sigma", m.noise.sigma}}; break;
        case NoiseModel::Kind::uniform: j["noise"] = json{{"type", "uniform"}, {"jitter_us", m.noise.jitter.us()}}; break;
    }
    if (m.contention) {
        j["contention"] = json{{"slope_us_per_miss", m.contention->slope_us_per_miss},
                               {"base_misses", m.contention->base_misses},
                               {"misses_per_kib", m.contention->misses_per_kib}};
    }
    if (m.lookahead_cost_us_per_m) j["lookahead_us_per_m"] = *m.lookahead_cost_us_per_m;
    return j;
}

}  // namespace colasim
