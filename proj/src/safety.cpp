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

#include "colasim/safety.hpp"

#include <cmath>
#include <limits>

namespace colasim {

std::vector<std::string> validate_rss(const RssParams& p) {
    std::vector<std::string> out;
    if (p.response_time <= SimTime::zero()) out.push_back("rss.response_time_us: must be > 0");
    if (!(p.a_max_accel > 0)) out.push_back("rss.a_max_accel_mps2: must be > 0");
    if (!(p.a_min_brake > 0)) out.push_back("rss.a_min_brake_mps2: must be > 0");
    if (!(p.a_max_brake > 0)) out.push_back("rss.a_max_brake_mps2: must be > 0");
    if (p.a_min_brake > p.a_max_brake) out.push_back("rss.a_min_brake_mps2: must be <= a_max_brake_mps2");
    if (!(p.lateral_mu > 0)) out.push_back("rss.lateral_mu_m: must be > 0");
    if (!(p.body_length_m > 0)) out.push_back("rss.body_length_m: must be > 0");
    if (!(p.body_width_m > 0)) out.push_back("rss.body_width_m: must be > 0");
    return out;
}

RssParams rss_from_json(const json& j, const std::string& path) {
    ObjectReader r(j, path);
    r.allow_only({"response_time_us", "a_max_accel_mps2", "a_min_brake_mps2", "a_max_brake_mps2", "lateral_mu_m",
                  "body_length_m", "body_width_m"});
    RssParams p;
    if (auto v = r.opt_integer("response_time_us")) {
        if (*v <= 0) r.fail("response_time_us", "must be > 0");
        p.response_time = SimTime::from_us(*v);
    }
    p.a_max_accel = r.opt_number("a_max_accel_mps2").value_or(p.a_max_accel);
    p.a_min_brake = r.opt_number("a_min_brake_mps2").value_or(p.a_min_brake);
    p.a_max_brake = r.opt_number("a_max_brake_mps2").value_or(p.a_max_brake);
    p.lateral_mu = r.opt_number("lateral_mu_m").value_or(p.lateral_mu);
    p.body_length_m = r.opt_number("body_length_m").value_or(p.body_length_m);
    p.body_width_m = r.opt_number("body_width_m").value_or(p.body_width_m);
    auto problems = validate_rss(p);
    if (!problems.empty()) throw ParseError(problems.front());
    return p;
}

json rss_to_json(const RssParams& p) {
    return json{{"response_time_us", p.response_time.us()}, {"a_max_accel_mps2", p.a_max_accel},
                {"a_min_brake_mps2", p.a_min_brake},        {"a_max_brake_mps2", p.a_max_brake},
                {"lateral_mu_m", p.lateral_mu},             {"body_length_m", p.body_length_m},
                {"body_width_m", p.body_width_m}};
}

double rss_longitudinal_min_distance(double v_rear, double v_front, const RssParams& p) {
    const double rho = p.response_time.seconds();
    const double v_after = v_rear + rho * p.a_max_accel;
    const double d = v_rear * rho + 0.5 * p.a_max_accel * rho * rho + v_after * v_after / (2.0 * p.a_min_brake) -
                     v_front * v_front / (2.0 * p.a_max_brake);
    return std::max(0.0, d);
}

double closure_distance(const AgentState& ego, const AgentState& obstacle, SimTime t, double /*assumed_ego_decel*/) {
    const double ego_travel = ego.v * t.seconds();
    const TrajectorySpec obstacle_traj{obstacle, {}, SimTime::zero()};
    const double obstacle_travel = agent_state_at(obstacle_traj, t).s - obstacle.s;
    return ego_travel - obstacle_travel;
}

ReactionBudget reaction_budget(const AgentState& ego, const AgentState& obstacle, double d_buffer_m,
                               const RssParams& p, SimTime horizon) {
    ReactionBudget out;
    out.derivation = BudgetDerivation{ego, obstacle, d_buffer_m, p.a_min_brake};
    if (!(d_buffer_m > 0.0)) {
        out.budget = SimTime::zero();
        return out;
    }
    const auto reached = [&](std::int64_t ms) {
        return closure_distance(ego, obstacle, SimTime::from_ms(ms), p.a_min_brake) >= d_buffer_m;
    };

    std::int64_t hi = horizon.us() / 1000;
    // With an accelerating obstacle the closure peaks and then shrinks, so
    // only the rising part can contain the first crossing.
    if (obstacle.a > 0.0 && ego.v > obstacle.v) {
        const double t_peak_ms = (ego.v - obstacle.v) / obstacle.a * 1e3;
        hi = std::min<std::int64_t>(hi, static_cast<std::int64_t>(std::ceil(t_peak_ms)));
    } else if (obstacle.a > 0.0) {
        hi = 0;
    }
    if (hi <= 0 || !reached(hi)) return out;

    // Invariant: closure(lo) < d_buffer <= closure(hi).
    std::int64_t lo = 0;
    while (hi - lo > 1) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        if (reached(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    out.budget = SimTime::from_ms(hi);
    return out;
}

std::string_view to_string(SafetyLevel level) {
    switch (level) {
        case SafetyLevel::safe: return "safe";
        case SafetyLevel::violation: return "violation";
        case SafetyLevel::collision: return "collision";
    }
    return "safe";
}

SafetyLevel parse_safety_level(std::string_view s) {
    if (s == "safe") return SafetyLevel::safe;
    if (s == "violation") return SafetyLevel::violation;
    if (s == "collision") return SafetyLevel::collision;
    throw ParseError("unknown safety level '" + std::string(s) + "'");
}

Gaps measure_gaps(const AgentState& ego, const AgentState& obstacle, const RssParams& p) {
    return Gaps{std::abs(obstacle.s - ego.s) - p.body_length_m, std::abs(obstacle.l - ego.l) - p.body_width_m};
}

bool in_ego_path(const AgentState& ego, const AgentState& obstacle, const RssParams& p) {
    return obstacle.s > ego.s && measure_gaps(ego, obstacle, p).lateral < p.lateral_mu;
}

SafetyStatus check_safety(const AgentState& ego, const AgentState& obstacle, const RssParams& p, double d_buffer_m) {
    const Gaps g = measure_gaps(ego, obstacle, p);
    SafetyStatus st{SafetyLevel::safe, g.longitudinal, g.lateral};
    if (g.longitudinal <= 0.0 && g.lateral <= 0.0) {
        st.level = SafetyLevel::collision;
    } else if (in_ego_path(ego, obstacle, p) &&
               g.longitudinal < rss_longitudinal_min_distance(ego.v, obstacle.v, p) + d_buffer_m) {
        st.level = SafetyLevel::violation;
    }
    return st;
}

std::optional<double> buffer_slack(const AgentState& ego, const AgentState& obstacle, const RssParams& p,
                                   double d_buffer_m) {
    if (!in_ego_path(ego, obstacle, p)) return std::nullopt;
    const Gaps g = measure_gaps(ego, obstacle, p);
    return g.longitudinal - rss_longitudinal_min_distance(ego.v, obstacle.v, p) - d_buffer_m;
}

ReactionBudget object_budget(const AgentState& ego, const AgentState& obstacle, double d_buffer_m,
                             const RssParams& p, SimTime horizon) {
    const auto slack = buffer_slack(ego, obstacle, p, d_buffer_m);
    if (!slack) return ReactionBudget{std::nullopt, BudgetDerivation{ego, obstacle, d_buffer_m, p.a_min_brake}};
    return reaction_budget(ego, obstacle, *slack, p, horizon);
}

SimTime object_deadline(SimTime now, const AgentState& ego, const AgentState& obstacle, double d_buffer_m,
                        const RssParams& p, const DeadlinePolicy& policy) {
    const ReactionBudget b = object_budget(ego, obstacle, d_buffer_m, p, policy.horizon);
    if (b.unbounded()) return now + policy.cap;
    return now + std::min(*b.budget, policy.cap);
}

ReactionBudget requirement_budget(const RequirementScenario& sc, const RequirementCalibration& cal,
                                  const RssParams& p, SimTime horizon) {
    const double v = sc.ego_speed_kmh / 3.6;
    AgentState ego{0.0, 0.0, v, 0.0, 0};
    AgentState obstacle{sc.distance_m, 0.0, v, -cal.lead_decel_mps2, 0};
    if (sc.kind == RequirementKind::occluded_cut_in) {
        obstacle.v = 0.0;
        obstacle.a = 0.0;
    }
    return reaction_budget(ego, obstacle, cal.buffer_fraction * sc.distance_m, p, horizon);
}

namespace {

double calibration_loss(std::span<const RequirementTarget> targets, const RequirementCalibration& cal,
                        const RssParams& p) {
    double loss = 0.0;
    for (const auto& t : targets) {
        const ReactionBudget b = requirement_budget(t.scenario, cal, p);
        const double ms = b.unbounded() ? 1e4 : std::max(1.0, b.budget->ms());
        const double e = std::log(ms / t.latency_ms);
        loss += e * e;
    }
    return loss;
}

}  // namespace

RequirementCalibration calibrate_requirements(std::span<const RequirementTarget> targets, const RssParams& p) {
    // Buffer fraction searched linearly, lead deceleration in log space.
    double f_lo = 0.02, f_hi = 1.0;
    double la_lo = std::log(0.5), la_hi = std::log(500.0);
    RequirementCalibration best;
    double best_loss = std::numeric_limits<double>::infinity();
    constexpr int kSteps = 60;
    for (int round = 0; round < 4; ++round) {
        for (int i = 0; i <= kSteps; ++i) {
            for (int k = 0; k <= kSteps; ++k) {
                RequirementCalibration cal{f_lo + (f_hi - f_lo) * i / kSteps,
                                           std::exp(la_lo + (la_hi - la_lo) * k / kSteps)};
                const double loss = calibration_loss(targets, cal, p);
                if (loss < best_loss) {
                    best_loss = loss;
                    best = cal;
                }
            }
        }
        const double f_span = (f_hi - f_lo) / kSteps * 4;
        const double la_span = (la_hi - la_lo) / kSteps * 4;
        f_lo = std::max(1e-3, best.buffer_fraction - f_span);
        f_hi = best.buffer_fraction + f_span;
        la_lo = std::log(best.lead_decel_mps2) - la_span;
        la_hi = std::log(best.lead_decel_mps2) + la_span;
    }
    return best;
}

}  // namespace colasim
