#!/usr/bin/env python3
"""Generate the shipped intersection scenarios (geometry, demand, signal plan).

Paths are sampled as polylines inside the junction box; two movements from
different approaches conflict where their paths come within CONFLICT_DIST_M.
Right turns are left out of the conflict matrix unless --with-right-conflicts.
"""
import argparse
import json
import math
from pathlib import Path

import numpy as np

LANE_W = 3.5
CONFLICT_DIST_M = 1.0
STEP_M = 0.05

# Direction of travel for vehicles arriving on each approach.
TRAVEL = {"N": (0.0, -1.0), "E": (-1.0, 0.0), "S": (0.0, 1.0), "W": (1.0, 0.0)}
BOUND = {"N": "SB", "E": "WB", "S": "NB", "W": "EB"}
NEMA = {"EBT": 2, "WBT": 6, "WBL": 1, "EBL": 5, "SBT": 4, "NBT": 8, "NBL": 3, "SBL": 7}


def right_of(d):
    return (d[1], -d[0])


def left_turn(d):
    return (-d[1], d[0])


def right_turn(d):
    return (d[1], -d[0])


def add(a, b, s=1.0):
    return (a[0] + s * b[0], a[1] + s * b[1])


def entry_point(d, half, k):
    return add((-half * d[0], -half * d[1]), right_of(d), (k + 0.5) * LANE_W)


def exit_point(d, half, k):
    return add((half * d[0], half * d[1]), right_of(d), (k + 0.5) * LANE_W)


def bezier(p0, d0, p3, d3):
    chord = math.dist(p0, p3)
    k = 0.5523 * chord / math.sqrt(2.0)
    p1 = add(p0, d0, k)
    p2 = add(p3, d3, -k)
    t = np.linspace(0.0, 1.0, 4000)[:, None]
    pts = ((1 - t) ** 3) * np.array(p0) + 3 * ((1 - t) ** 2) * t * np.array(p1) \
        + 3 * (1 - t) * t ** 2 * np.array(p2) + t ** 3 * np.array(p3)
    return pts


def uturn(p0, d, lanes):
    radius = lanes * LANE_W / 2.0
    lead = LANE_W / 2.0
    a = np.array(p0) + np.array(d) * np.linspace(0, lead, 200)[:, None]
    centre = np.array(add(add(p0, d, lead), left_turn(d), radius))
    theta = np.linspace(0, math.pi, 2000)
    start = np.array(p0) + np.array(d) * lead - centre
    rot = np.stack([np.cos(theta), -np.sin(theta), np.sin(theta), np.cos(theta)], axis=1).reshape(-1, 2, 2)
    # rotate counter-clockwise (a left U-turn)
    b = centre + np.einsum("nij,j->ni", rot, start)
    end = b[-1]
    back = end - np.array(d) * np.linspace(0, lead, 200)[:, None]
    return np.vstack([a, b, back])


def resample(pts):
    seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    s = np.concatenate([[0.0], np.cumsum(seg)])
    grid = np.arange(0.0, s[-1], STEP_M)
    grid = np.append(grid, s[-1])
    x = np.interp(grid, s, pts[:, 0])
    y = np.interp(grid, s, pts[:, 1])
    return np.stack([x, y], axis=1), grid


def build(name, lanes_spec, approach_len, cell, speed_limit, with_right):
    n = len(lanes_spec)
    half = n * LANE_W
    lanes, movements, paths = [], [], []
    for ap in ["N", "E", "S", "W"]:
        d = TRAVEL[ap]
        for k, kinds in enumerate(lanes_spec):
            lane_id = len(lanes)
            lanes.append({"approach": ap})
            for kind in kinds:
                p0 = entry_point(d, half, k)
                if kind == "through":
                    p3 = exit_point(d, half, k)
                    pts = np.array([p0, p3])
                    code = "T"
                elif kind == "left":
                    d3 = left_turn(d)
                    pts = bezier(p0, d, exit_point(d3, half, 0), d3)
                    code = "L"
                elif kind == "right":
                    d3 = right_turn(d)
                    pts = bezier(p0, d, exit_point(d3, half, n - 1), d3)
                    code = "R"
                else:
                    pts = uturn(p0, d, n)
                    code = "U"
                poly, s = resample(pts)
                mname = BOUND[ap] + code
                movements.append({"name": mname, "nema": NEMA.get(mname, 0), "approach": ap, "kind": kind,
                                  "lane": lane_id, "path_length_m": round(float(s[-1]), 3)})
                paths.append((poly, s))
    conflicts = []
    for i in range(len(movements)):
        for j in range(i + 1, len(movements)):
            a, b = movements[i], movements[j]
            if a["approach"] == b["approach"]:
                continue
            if not with_right and ("right" in (a["kind"], b["kind"])):
                continue
            pa, sa = paths[i]
            pb, sb = paths[j]
            dist = np.linalg.norm(pa[:, None, :] - pb[None, :, :], axis=2)
            if dist.min() >= CONFLICT_DIST_M:
                continue
            ia = int(np.argmax(dist.min(axis=1) < CONFLICT_DIST_M))
            ib = int(np.argmin(dist[ia]))
            conflicts.append({"a": a["name"], "b": b["name"],
                              "offset_a_m": round(float(sa[ia]), 3), "offset_b_m": round(float(sb[ib]), 3)})
    return {"name": name, "approach_length_m": approach_len, "cell_size_m": cell,
            "speed_limit_mps": speed_limit, "detector_offset_m": 20.0,
            "lanes": lanes, "movements": movements, "conflicts": conflicts}


def phase(name, protected, permitted=(), initial=30.0):
    return {"name": name, "protected": list(protected), "permitted": list(permitted),
            "min_s": 10.0, "max_s": 60.0, "initial_s": initial}


def signal_plan(uturns):
    def lefts(*bounds):
        out = []
        for b in bounds:
            out.append(b + "L")
            if uturns:
                out.append(b + "U")
        return out

    phases = [
        phase("2+6", ["EBT", "WBT", "EBR", "WBR"], lefts("EB", "WB"), 30.0),
        phase("1+5", lefts("EB", "WB"), (), 15.0),
        phase("4+8", ["SBT", "NBT", "SBR", "NBR"], lefts("NB", "SB"), 30.0),
        phase("3+7", lefts("NB", "SB"), (), 15.0),
        phase("2+5", ["EBT", "EBR"] + lefts("EB")),
        phase("1+6", ["WBT", "WBR"] + lefts("WB")),
        phase("4+7", ["SBT", "SBR"] + lefts("SB")),
        phase("3+8", ["NBT", "NBR"] + lefts("NB")),
    ]
    return {"yellow_s": 3.0, "all_red_s": 2.0, "delta_d_s": 5.0, "acyclic_dt_s": 10.0,
            "phases": phases, "cyclic_order": ["2+6", "1+5", "4+8", "3+7"]}


def peaked(base, peak_factor=1.3):
    return [[0.0, base], [1200.0, round(base * peak_factor, 3)], [2400.0, base]]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "scenarios"))
    ap.add_argument("--with-right-conflicts", action="store_true")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    synthetic = build("synthetic-4x12", [["left"], ["through"], ["right"]], 150.0, 7.5, 22.35,
                      args.with_right_conflicts)
    syn_rates = {
        "EBT": peaked(420), "WBT": peaked(420), "NBT": peaked(260), "SBT": peaked(260),
        "EBL": peaked(150), "WBL": peaked(150), "NBL": peaked(90), "SBL": peaked(90),
        "EBR": peaked(100), "WBR": peaked(100), "NBR": peaked(60), "SBR": peaked(60),
    }
    scenario = {"geometry": synthetic,
                "demand": {"ignore_foe_prob": 0.2, "seed": 11, "rates": syn_rates},
                "signal": signal_plan(False)}
    (out / "synthetic-4x12.json").write_text(json.dumps(scenario, indent=1) + "\n")

    cologne = build("cologne-like-8lane", [["left", "u_turn"], ["through", "right"]], 150.0, 7.5, 13.89,
                    args.with_right_conflicts)
    col_rates = {
        "EBT": peaked(380), "WBT": peaked(380), "NBT": peaked(220), "SBT": peaked(220),
        "EBL": peaked(110), "WBL": peaked(110), "NBL": peaked(70), "SBL": peaked(70),
        "EBU": peaked(20), "WBU": peaked(20), "NBU": peaked(10), "SBU": peaked(10),
        "EBR": peaked(90), "WBR": peaked(90), "NBR": peaked(60), "SBR": peaked(60),
    }
    scenario = {"geometry": cologne,
                "demand": {"ignore_foe_prob": 0.2, "seed": 13, "rates": col_rates},
                "signal": signal_plan(True)}
    (out / "cologne-like-8lane.json").write_text(json.dumps(scenario, indent=1) + "\n")


if __name__ == "__main__":
    main()
