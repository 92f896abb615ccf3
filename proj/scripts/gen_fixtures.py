#!/usr/bin/env python3
# Copyright 2026 The cola-sim Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Regenerates everything under fixtures/. Output is deterministic."""

import json
import random
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent / "fixtures"
LANE_W = 3.5
MS = 1000
S = 1_000_000


def write(rel, obj):
    path = ROOT / rel
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2) + "\n")


def state(s, v, lane, a=0.0):
    return {"s_m": round(s, 3), "l_m": lane * LANE_W, "v_mps": round(v, 3), "a_mps2": a, "lane": lane}


def agent(aid, kind, st, segments=(), visible_from_us=0):
    out = {"id": aid, "kind": kind, "initial": st, "segments": list(segments)}
    if visible_from_us:
        out["visible_from_us"] = visible_from_us
    return out


def scenario(name, ego, agents, duration_us, hazards=(), lane_count=3, d_buffer_m=1.0):
    return {
        "format": 1,
        "name": name,
        "lane_count": lane_count,
        "ego": ego,
        "agents": agents,
        "duration_us": duration_us,
        "hazards": [{"time_us": t, "agent": a, "label": l} for t, a, l in hazards],
        "d_buffer_m": d_buffer_m,
    }


def pedestrian_cluster(rng, prefix, center_s, size, lane_count=3):
    # Pedestrians waiting on both sidewalks; never in a driving lane.
    out = []
    for i in range(size):
        lane = -1 if rng.random() < 0.5 else lane_count
        s = center_s + rng.uniform(-8.0, 8.0)
        v = 0.0 if rng.random() < 0.6 else rng.uniform(0.5, 1.4)
        out.append(agent(f"{prefix}{i}", "pedestrian", state(s, v, lane)))
    return out


# Scenarios ------------------------------------------------------------------


def minimal():
    ego = state(0.0, 10.0, 1)
    lead = agent("lead", "vehicle", state(40.0, 10.0, 1))
    return scenario("minimal", ego, [lead], 2 * S)


def open_road():
    return scenario("open_road", state(0.0, 10.0, 1), [], 10 * S)


def vehicle_following(kmh=35.0, gap=30.0, decel=6.0, brake_at=3 * S, name="vehicle_following"):
    v = kmh / 3.6
    ego = state(0.0, v, 1)
    lead = agent("lead", "vehicle", state(gap, v, 1), [{"start_us": brake_at, "a_mps2": -decel}])
    return scenario(name, ego, [lead], 10 * S, [(brake_at, "lead", "lead_brake")])


def occluded_pedestrian():
    ego = state(0.0, 8.0, 1)
    ped = agent("ped", "pedestrian", state(40.0, 0.0, 1), visible_from_us=2 * S)
    parked = agent("parked", "vehicle", state(36.0, 0.0, 2))
    return scenario("occluded_pedestrian", ego, [ped, parked], 8 * S, [(2 * S, "ped", "pedestrian_emerges")])


def dense_traffic(name="dense_traffic", seed=11, duration_s=100, cutins=False):
    """Pedestrian clusters every 150 m give a count-bursty object stream."""
    rng = random.Random(seed)
    v_ego = 10.0
    ego = state(0.0, v_ego, 1)
    agents = []
    s = 70.0
    k = 0
    while s < v_ego * duration_s + 60.0:
        agents += pedestrian_cluster(rng, f"c{k}_p", s, rng.randint(3, 12))
        s += 150.0
        k += 1
    for i in range(3):
        lane = 0 if i % 2 == 0 else 2
        agents.append(agent(f"side{i}", "vehicle", state(-20.0 + 25.0 * i, v_ego + rng.uniform(-0.3, 0.3), lane)))
    hazards = []
    if cutins:
        # Faster vehicles merge ahead of the ego every 5 s, then leave.
        for i in range(18):
            t = (4 + 5 * i) * S
            v = v_ego + 3.0
            start_s = 12.0 + (v_ego - v) * t / S
            aid = f"merge{i}"
            kind = "cyclist" if i % 6 == 5 else "vehicle"
            agents.append(
                agent(
                    aid,
                    kind,
                    state(start_s, v, 2),
                    [{"start_us": t, "a_mps2": 0.0, "lane": 1}, {"start_us": t + 3 * S, "a_mps2": 0.0, "lane": 2}],
                )
            )
            hazards.append((t, aid, f"merge_{i}"))
    return scenario(name, ego, agents, duration_s * S, hazards)


# Corner-case suite ------------------------------------------------------------


def corner_suite():
    rng = random.Random(2026)
    cases = []

    def with_crowd(sc, at_us, size):
        # Crowd the sensor view right when the hazard unfolds.
        ego_v = sc["ego"]["v_mps"]
        center = ego_v * at_us / S + 12.0
        sc["agents"] += pedestrian_cluster(rng, "crowd", center, size)
        return sc

    for kmh in (20.0, 35.0):
        for decel, gap in ((4.0, 12.0), (6.0, 13.0), (8.0, 14.0)):
            name = f"follow_{int(kmh)}kmh_d{int(decel)}"
            sc = vehicle_following(kmh, gap, decel, 3 * S, name)
            cases.append(with_crowd(sc, 3 * S, 12))

    for i, (gap, dv) in enumerate(((8.0, 3.0), (10.0, 4.0), (12.0, 5.0), (9.0, 6.0), (11.0, 2.0))):
        v = 10.0
        t = 3 * S
        ego = state(0.0, v, 1)
        lead_s = v * 3.0 + gap - (v - dv) * 3.0
        cut = agent("cutter", "vehicle", state(lead_s, v - dv, 2), [{"start_us": t, "a_mps2": 0.0, "lane": 1}])
        sc = scenario(f"cutin_encroach_{i}", ego, [cut], 8 * S, [(t, "cutter", "encroaching_cut_in")])
        cases.append(with_crowd(sc, t, 12))

    for i, (gap, dv) in enumerate(((12.0, 4.0), (14.0, 5.0), (13.0, 6.0), (15.0, 3.0), (11.0, 2.0))):
        v = 10.0
        t = 3 * S
        ego = state(0.0, v, 1)
        lead_s = v * 3.0 + gap - (v - dv) * 3.0
        # Hidden behind the truck until it swerves into the ego lane.
        cut = agent("cutter", "vehicle", state(lead_s, v - dv, 2), [{"start_us": t, "a_mps2": 0.0, "lane": 1}],
                    visible_from_us=t)
        truck = agent("truck", "vehicle", state(v * 3.0 + gap - 8.0, v - 0.5, 0))
        sc = scenario(f"cutin_occluded_{i}", ego, [cut, truck], 8 * S, [(t, "cutter", "occluded_cut_in")])
        cases.append(with_crowd(sc, t, 12))

    for i, dist in enumerate((16.0, 18.0, 20.0, 22.0)):
        v = 8.0
        t = 2 * S
        ego = state(0.0, v, 1)
        ped = agent("ped", "pedestrian", state(v * 2.0 + dist, 0.0, 1), visible_from_us=t)
        sc = scenario(f"ped_occluded_{i}", ego, [ped], 7 * S, [(t, "ped", "pedestrian_emerges")])
        cases.append(with_crowd(sc, t, 12))

    for i, dist in enumerate((45.0, 55.0)):
        v = 12.0
        ego = state(0.0, v, 1)
        stopped = agent("stopped", "vehicle", state(dist, 0.0, 1))
        sc = scenario(f"stopped_ahead_{i}", ego, [stopped], 8 * S, [(0, "stopped", "stopped_vehicle")])
        cases.append(with_crowd(sc, 1 * S, 12))

    for sc in cases:
        write(f"corner_suite/{sc['name']}.json", sc)
    return len(cases)


# Pipelines ------------------------------------------------------------------


def channel(cid, policy="latest", capacity=None):
    out = {"id": cid, "policy": policy}
    if capacity is not None:
        out["capacity"] = capacity
    return out


def timing(period_us, phase_us=0):
    return {"type": "timing", "period_us": period_us, "phase_us": phase_us}


INTERRUPT = {"type": "interrupt"}


def per_kind(vehicle, pedestrian, cyclist):
    return {"vehicle": vehicle, "pedestrian": pedestrian, "cyclist": cyclist}


def av_stack():
    return {
        "format": 1,
        "name": "av_stack",
        "channels": [channel(c) for c in ("camera", "detections", "tracks", "forecasts", "plan", "cmd")],
        "nodes": [
            {"name": "camera", "role": "sensor", "pattern": timing(100 * MS), "outputs": ["camera"],
             "latency": {"offset_us": 0}, "sensor_range_m": 60.0},
            {"name": "perception", "role": "perception", "pattern": INTERRUPT, "inputs": ["camera"],
             "outputs": ["detections"], "payload_bytes": 65536,
             "latency": {"per_kind_us": per_kind(1500, 1000, 1200), "offset_us": 25 * MS,
                         "noise": {"type": "uniform", "jitter_us": 3 * MS}}},
            {"name": "fusion", "role": "fusion", "pattern": INTERRUPT, "inputs": ["detections"],
             "outputs": ["tracks"], "fusion": {"a": 2, "n": 3},
             "latency": {"per_kind_us": per_kind(500, 500, 500), "offset_us": 5 * MS}},
            {"name": "prediction", "role": "prediction", "pattern": INTERRUPT, "inputs": ["tracks"],
             "outputs": ["forecasts"], "stateless": True,
             "latency": {"per_kind_us": per_kind(3000, 3000, 3000), "offset_us": 10 * MS},
             "fast_latency": {"per_kind_us": per_kind(500, 500, 500), "offset_us": 5 * MS}},
            {"name": "planning", "role": "planning", "pattern": INTERRUPT, "inputs": ["forecasts"],
             "outputs": ["plan"], "lookahead_m": 100.0, "fast_lookahead_m": 30.0,
             "latency": {"per_kind_us": per_kind(500, 500, 500), "offset_us": 30 * MS, "lookahead_us_per_m": 300},
             "fast_latency": {"per_kind_us": per_kind(500, 500, 500), "offset_us": 15 * MS,
                              "lookahead_us_per_m": 300},
             "proactive": {"trigger_channel": "tracks", "precompute_us": 8 * MS}},
            {"name": "control", "role": "control", "pattern": INTERRUPT, "inputs": ["plan"], "outputs": ["cmd"],
             "latency": {"offset_us": 5 * MS}},
        ],
    }


def queue_trace():
    return {
        "format": 1,
        "name": "queue_trace",
        "channels": [channel("frames", "fifo", 16), channel("objects", "fifo", 16), channel("cmd", "fifo", 16)],
        "nodes": [
            {"name": "camera", "role": "sensor", "pattern": timing(100 * MS), "outputs": ["frames"],
             "latency": {"offset_us": 0}},
            {"name": "detector", "role": "perception", "pattern": INTERRUPT, "inputs": ["frames"],
             "outputs": ["objects"], "latency": {"offset_us": 150 * MS}},
            {"name": "control", "role": "control", "pattern": INTERRUPT, "inputs": ["objects"], "outputs": ["cmd"],
             "latency": {"offset_us": 10 * MS}},
        ],
    }


def steal_pair():
    return {
        "format": 1,
        "name": "steal_pair",
        "channels": [channel(c) for c in ("frames", "a1_out", "a2_out", "b1_out")],
        "nodes": [
            {"name": "camera", "role": "sensor", "pattern": timing(100 * MS), "outputs": ["frames"],
             "latency": {"offset_us": 0}},
            {"name": "a1", "role": "perception", "pattern": INTERRUPT, "inputs": ["frames"], "outputs": ["a1_out"],
             "latency": {"offset_us": 80 * MS}},
            {"name": "a2", "role": "perception", "pattern": INTERRUPT, "inputs": ["frames"], "outputs": ["a2_out"],
             "latency": {"offset_us": 80 * MS}},
            {"name": "b1", "role": "other", "pattern": INTERRUPT, "inputs": ["frames"], "outputs": ["b1_out"],
             "latency": {"offset_us": 20 * MS}},
        ],
    }


def proactive_pair(cancel_probability=0.0):
    return {
        "format": 1,
        "name": "proactive_pair",
        "channels": [channel(c) for c in ("frames", "objects", "plan")],
        "nodes": [
            {"name": "camera", "role": "sensor", "pattern": timing(100 * MS), "outputs": ["frames"],
             "latency": {"offset_us": 0}},
            {"name": "detector", "role": "perception", "pattern": INTERRUPT, "inputs": ["frames"],
             "outputs": ["objects"], "latency": {"offset_us": 10 * MS}},
            {"name": "planner", "role": "planning", "pattern": timing(100 * MS, 50 * MS), "inputs": ["objects"],
             "outputs": ["plan"], "latency": {"offset_us": 30 * MS},
             "proactive": {"trigger_channel": "objects", "precompute_us": 8 * MS,
                           "cancel_probability": cancel_probability}},
        ],
    }


def cyclic():
    return {
        "format": 1,
        "name": "cyclic",
        "channels": [channel(c) for c in ("frames", "ab", "ba")],
        "nodes": [
            {"name": "camera", "role": "sensor", "pattern": timing(100 * MS), "outputs": ["frames"],
             "latency": {"offset_us": 0}},
            {"name": "A", "role": "perception", "pattern": INTERRUPT, "inputs": ["ba", "frames"], "outputs": ["ab"],
             "latency": {"offset_us": 10 * MS}},
            {"name": "B", "role": "planning", "pattern": INTERRUPT, "inputs": ["ab"], "outputs": ["ba"],
             "latency": {"offset_us": 10 * MS}},
        ],
    }


# Configs --------------------------------------------------------------------


def config(scenario_path, pipeline_path, out, seed=None, mitigation=None, groups=None, **extra):
    out_obj = {"format": 1, "scenario": scenario_path, "pipeline": pipeline_path, "out": out}
    if seed is not None:
        out_obj["seed"] = seed
    if groups:
        out_obj["groups"] = groups
    if mitigation:
        out_obj["mitigation"] = mitigation
    out_obj.update(extra)
    return out_obj


ALL_ON = {"fastpath": True, "proactive": True, "stealing": True, "deadline_cap_us": 125 * MS}


def main():
    write("scenarios/minimal.json", minimal())
    write("scenarios/open_road.json", open_road())
    write("scenarios/vehicle_following.json", vehicle_following())
    write("scenarios/occluded_pedestrian.json", occluded_pedestrian())
    write("scenarios/dense_traffic.json", dense_traffic())
    write("scenarios/mixed_long.json", dense_traffic("mixed_long", seed=5, cutins=True))

    write("pipelines/av_stack.json", av_stack())
    write("pipelines/queue_trace.json", queue_trace())
    write("pipelines/steal_pair.json", steal_pair())
    write("pipelines/proactive_pair.json", proactive_pair())
    write("pipelines/cyclic.json", cyclic())

    write("configs/following_baseline.json",
          config("../scenarios/vehicle_following.json", "../pipelines/av_stack.json", "../../out/following", seed=7))
    write("configs/mixed_mitigated.json",
          config("../scenarios/mixed_long.json", "../pipelines/av_stack.json", "../../out/mixed", seed=7,
                 mitigation=ALL_ON))
    write("configs/density_sweep.json",
          config("../scenarios/open_road.json", "../pipelines/av_stack.json", "../../out/density", seed=1,
                 traffic={"density": 0.0}))
    write("configs/steal_pair.json",
          config("../scenarios/minimal.json", "../pipelines/steal_pair.json", "../../out/steal",
                 groups=[{"name": "A", "workers": 1, "nodes": ["a1", "a2"]},
                         {"name": "B", "workers": 1, "nodes": ["b1"], "budget_us": 150 * MS}],
                 mitigation={"stealing": True}))
    n = corner_suite()
    print(f"wrote fixtures ({n} corner-suite scenarios)")


if __name__ == "__main__":
    main()
