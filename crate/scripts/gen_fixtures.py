#!/usr/bin/env python3
"""Regenerates the bundled robot models, scenes and problem files under data/.

Candidate problems are also handed to the release `prrtc` binary with a
large iteration budget; candidates it cannot solve there (disconnected
endpoints) are dropped. Build it first with `cargo build --release`.

The robots are sphere-approximated serial chains; the scenes are built from
boxes, capsules and spheres. Problem endpoints are drawn with a fixed seed and
kept only when both endpoints are collision-free and the straight-line motion
between them is blocked, so every problem needs actual planning.

Usage: python3 scripts/gen_fixtures.py [--root data]
"""

import argparse
import json
import math
import os
import subprocess

import numpy as np

# ---------------------------------------------------------------- geometry


def quat_x(angle):
    return [math.cos(angle / 2), math.sin(angle / 2), 0.0, 0.0]


def quat_z(angle):
    return [math.cos(angle / 2), 0.0, 0.0, math.sin(angle / 2)]


def quat_to_mat(q):
    w, x, y, z = np.array(q) / np.linalg.norm(q)
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])


def axis_angle(axis, angle):
    x, y, z = axis
    c, s = math.cos(angle), math.sin(angle)
    v = 1 - c
    return np.array([
        [c + x * x * v, x * y * v - z * s, x * z * v + y * s],
        [y * x * v + z * s, c + y * y * v, y * z * v - x * s],
        [z * x * v - y * s, z * y * v + x * s, c + z * z * v],
    ])


def segment_spheres(a, b, r):
    a, b = np.array(a, float), np.array(b, float)
    length = np.linalg.norm(b - a)
    n = max(1, int(math.ceil(length / r)))
    return [(a + (b - a) * k / n).tolist() for k in range(n + 1)]


def link_entry(name, joint, segments):
    fine = []
    for a, b, r in segments:
        fine += [{"center": [round(c, 6) for c in p], "radius": r} for p in segment_spheres(a, b, r)]
    centers = np.array([f["center"] for f in fine])
    mid = (centers.min(axis=0) + centers.max(axis=0)) / 2
    rad = max(np.linalg.norm(np.array(f["center"]) - mid) + f["radius"] for f in fine)
    coarse = {"center": [round(c, 6) for c in mid], "radius": round(rad + 1e-4, 6)}
    return {"name": name, "joint": joint, "coarse": coarse, "fine": fine}


def joint(kind, parent, xyz, quat=None, axis=(0, 0, 1), limits=None):
    j = {
        "type": kind,
        "parent": parent,
        "origin": {"translation": list(xyz), "rotation": quat or [1.0, 0.0, 0.0, 0.0]},
        "axis": list(axis),
    }
    if limits is not None:
        j["limits"] = list(limits)
    return j


# ---------------------------------------------------------------- robots


def planar3():
    lengths = [0.5, 0.4, 0.3]
    links = []
    for k, length in enumerate(lengths):
        offset = 0.0 if k == 0 else lengths[k - 1]
        lim = [-math.pi, math.pi] if k == 0 else [-2.8, 2.8]
        j = joint("revolute", None if k == 0 else k - 1, (offset, 0, 0), limits=lim)
        links.append(link_entry(f"link{k + 1}", j, [((0, 0, 0), (length, 0, 0), 0.05)]))
    return {"name": "planar3", "links": links, "self_pairs": [[0, 2]]}


PANDA = [
    # (origin xyz, rpy-x, limits, geometry segments in link frame)
    ((0, 0, 0.333), 0.0, (-2.8973, 2.8973), [((0, 0, -0.25), (0, 0, 0), 0.08)]),
    ((0, 0, 0), -math.pi / 2, (-1.7628, 1.7628), [((0, 0, 0), (0, -0.316, 0), 0.08)]),
    ((0, -0.316, 0), math.pi / 2, (-2.8973, 2.8973), [((0, 0, -0.1), (0.0825, 0, 0), 0.07)]),
    ((0.0825, 0, 0), math.pi / 2, (-3.0718, -0.0698), [((0, 0, 0), (-0.0825, 0.384, 0), 0.07)]),
    ((-0.0825, 0.384, 0), -math.pi / 2, (-2.8973, 2.8973), [((0, 0, -0.2), (0, 0, 0), 0.06)]),
    ((0, 0, 0), math.pi / 2, (-0.0175, 3.7525), [((0, 0, 0), (0.088, 0, 0), 0.06)]),
    ((0.088, 0, 0), math.pi / 2, (-2.8973, 2.8973), [((0, 0, 0), (0, 0, 0.107), 0.05)]),
]
HAND = [((0, -0.08, 0.06), (0, 0.08, 0.06), 0.035), ((0, 0, 0.0), (0, 0, 0.04), 0.04)]


def arm_links(prefix, base_xyz, first_index):
    links = []
    for k, (xyz, rx, lim, geom) in enumerate(PANDA):
        parent = None if k == 0 else first_index + k - 1
        xyz = tuple(np.add(xyz, base_xyz)) if k == 0 else xyz
        links.append(link_entry(f"{prefix}link{k + 1}", joint("revolute", parent, xyz, quat_x(rx), limits=lim), geom))
    hand = joint("fixed", first_index + len(PANDA) - 1, (0, 0, 0.107), quat_z(-math.pi / 4))
    links.append(link_entry(f"{prefix}hand", hand, HAND))
    return links


class Kin:
    def __init__(self, robot):
        self.robot = robot
        self.links = robot["links"]
        self.limits = [l["joint"]["limits"] for l in self.links if l["joint"]["type"] != "fixed"]
        self.dof = len(self.limits)

    def fk(self, q):
        poses = []
        qi = 0
        for l in self.links:
            j = l["joint"]
            R0 = quat_to_mat(j["origin"]["rotation"])
            t0 = np.array(j["origin"]["translation"], float)
            if j["type"] == "revolute":
                Rl, tl = R0 @ axis_angle(j["axis"], q[qi]), t0
                qi += 1
            elif j["type"] == "prismatic":
                Rl, tl = R0, t0 + R0 @ (np.array(j["axis"]) * q[qi])
                qi += 1
            else:
                Rl, tl = R0, t0
            if j["parent"] is None:
                poses.append((Rl, tl))
            else:
                Rp, tp = poses[j["parent"]]
                poses.append((Rp @ Rl, Rp @ tl + tp))
        return poses

    def fine(self, q):
        out = []
        for l, (R, t) in zip(self.links, self.fk(q)):
            out.append([(R @ np.array(s["center"]) + t, s["radius"]) for s in l["fine"]])
        return out

    def sample(self, rng):
        return [rng.uniform(lo, hi) for lo, hi in self.limits]


def pair_hits(a, b):
    return any(np.linalg.norm(ca - cb) < ra + rb for ca, ra in a for cb, rb in b)


def choose_self_pairs(robot, candidates, rng, home):
    kin = Kin(robot)
    keep = []
    samples = [kin.fine(kin.sample(rng)) for _ in range(300)]
    home_f = kin.fine(home)
    for a, b in candidates:
        if pair_hits(home_f[a], home_f[b]):
            continue
        rate = sum(pair_hits(s[a], s[b]) for s in samples) / len(samples)
        if rate < 0.5:
            keep.append([a, b])
    return keep


PANDA_HOME = [0.0, -0.785, 0.0, -2.356, 0.0, 1.571, 0.785]


def chain7(rng):
    links = arm_links("", (0, 0, 0), 0)
    robot = {"name": "chain7", "links": links, "self_pairs": []}
    adjacent = {(l["joint"]["parent"], i) for i, l in enumerate(links) if l["joint"]["parent"] is not None}
    cands = [(a, b) for a in range(len(links)) for b in range(a + 2, len(links)) if (a, b) not in adjacent]
    robot["self_pairs"] = choose_self_pairs(robot, cands, rng, PANDA_HOME)
    return robot


def dual14(rng, chain):
    left = arm_links("left_", (0, 0.45, 0), 0)
    right = arm_links("right_", (0, -0.45, 0), len(left))
    links = left + right
    n = len(left)
    pairs = [list(p) for p in chain["self_pairs"]] + [[a + n, b + n] for a, b in chain["self_pairs"]]
    robot = {"name": "dual14", "links": links, "self_pairs": pairs}
    cross = [(a, b + n) for a in range(2, n) for b in range(2, n)]
    robot["self_pairs"] += choose_self_pairs(robot, cross, rng, PANDA_HOME + PANDA_HOME)
    return robot


# ---------------------------------------------------------------- scenes


def box(center, half, quat=None):
    return {"type": "box", "translation": list(center), "rotation": quat or [1.0, 0.0, 0.0, 0.0], "half_extents": list(half)}


def capsule(a, b, r):
    return {"type": "capsule", "a": list(a), "b": list(b), "radius": r}


def sphere(c, r):
    return {"type": "sphere", "center": list(c), "radius": r}


def scenes():
    s = {}
    # planar arm, everything straddles z = 0
    s["planar_tabletop"] = [
        box((0.0, -0.35, 0), (1.5, 0.05, 0.2)),
        sphere((0.75, 0.35, 0), 0.12),
        box((-0.6, 0.3, 0), (0.08, 0.25, 0.2), quat_z(0.4)),
        capsule((0.35, -0.2, -0.2), (0.35, -0.2, 0.2), 0.06),
    ]
    s["planar_shelf"] = [
        box((0.95, 0.0, 0), (0.05, 1.2, 0.2)),
        box((0.75, 0.3, 0), (0.2, 0.03, 0.2)),
        box((0.75, -0.3, 0), (0.2, 0.03, 0.2)),
        box((-0.7, 0.55, 0), (0.25, 0.05, 0.2)),
        sphere((-0.55, -0.6, 0), 0.15),
    ]
    posts = []
    for k in range(10):
        if k in (0, 5):
            continue
        a = 2 * math.pi * k / 10 + 0.3
        posts.append(capsule((0.95 * math.cos(a), 0.95 * math.sin(a), -0.2), (0.95 * math.cos(a), 0.95 * math.sin(a), 0.2), 0.1))
    posts.append(sphere((0.45, 0.45, 0), 0.08))
    posts.append(sphere((-0.4, -0.5, 0), 0.08))
    s["planar_cage"] = posts

    # 7-DoF arm mounted at the origin, z up
    s["tabletop"] = [
        box((0.6, 0.0, 0.18), (0.3, 0.6, 0.02)),
        capsule((0.55, 0.15, 0.2), (0.55, 0.15, 0.42), 0.04),
        capsule((0.5, -0.2, 0.2), (0.5, -0.2, 0.38), 0.035),
        box((0.7, -0.02, 0.28), (0.05, 0.08, 0.08), quat_z(0.5)),
        sphere((0.45, 0.35, 0.27), 0.06),
        box((0.0, 0.0, -0.05), (1.2, 1.2, 0.02)),
    ]
    shelf = [box((0.85, 0.0, 0.6), (0.02, 0.45, 0.6))]
    for z in (0.25, 0.55, 0.85, 1.15):
        shelf.append(box((0.68, 0.0, z), (0.17, 0.45, 0.015)))
    shelf += [box((0.68, y, 0.6), (0.17, 0.015, 0.6)) for y in (-0.45, 0.0, 0.45)]
    shelf.append(box((0.0, 0.0, -0.05), (1.2, 1.2, 0.02)))
    s["shelf"] = shelf
    cage = [box((0.0, 0.0, -0.05), (1.2, 1.2, 0.02)), box((0.0, 0.0, 1.25), (0.9, 0.9, 0.02))]
    for k in range(8):
        a = 2 * math.pi * k / 8 + math.pi / 8
        x, y = 0.7 * math.cos(a), 0.7 * math.sin(a)
        cage.append(capsule((x, y, 0.0), (x, y, 1.2), 0.03))
    for z in (0.35, 0.75):
        for k in range(8):
            a0 = 2 * math.pi * k / 8 + math.pi / 8
            a1 = 2 * math.pi * (k + 1) / 8 + math.pi / 8
            if k % 2 == 0:
                cage.append(capsule((0.7 * math.cos(a0), 0.7 * math.sin(a0), z), (0.7 * math.cos(a1), 0.7 * math.sin(a1), z), 0.025))
    cage.append(capsule((0.35, -0.35, 0.5), (0.35, 0.35, 0.5), 0.03))
    s["cage"] = cage
    return {name: {"name": name, "primitives": prims} for name, prims in s.items()}


def prim_hits(c, r, p):
    t = p["type"]
    if t == "sphere":
        return np.linalg.norm(c - np.array(p["center"])) < r + p["radius"]
    if t == "capsule":
        a, b = np.array(p["a"]), np.array(p["b"])
        ab = b - a
        u = np.clip(np.dot(c - a, ab) / np.dot(ab, ab), 0, 1) if np.dot(ab, ab) > 0 else 0.0
        return np.linalg.norm(c - (a + u * ab)) < r + p["radius"]
    R = quat_to_mat(p["rotation"])
    local = R.T @ (c - np.array(p["translation"]))
    d = np.maximum(np.abs(local) - np.array(p["half_extents"]), 0)
    return np.linalg.norm(d) < r


def free(kin, scene, q):
    fine = kin.fine(q)
    for spheres in fine:
        for c, r in spheres:
            if any(prim_hits(c, r, p) for p in scene["primitives"]):
                return False
    for a, b in kin.robot["self_pairs"]:
        if pair_hits(fine[a], fine[b]):
            return False
    return True


def edge_free(kin, scene, a, b, n):
    a, b = np.array(a), np.array(b)
    return all(free(kin, scene, (a + (b - a) * i / n).tolist()) for i in range(1, n + 1))


def ee(kin, q):
    R, t = kin.fk(q)[-1]
    return t


# ---------------------------------------------------------------- problems


def pick(kin, scene, rng, region, tries=20000):
    for _ in range(tries):
        q = kin.sample(rng)
        if region(ee(kin, q)) and free(kin, scene, q):
            return [round(v, 6) for v in q]
    raise RuntimeError("no valid configuration in region")


BINARY = os.path.join(os.path.dirname(__file__), "..", "target", "release", "prrtc")


def solvable(root, robot_name, scene_name, s, g):
    cmd = [
        BINARY, "plan",
        "--robot", os.path.join(root, "robots", f"{robot_name}.json"),
        "--scene", os.path.join(root, "scenes", f"{scene_name}.json"),
        "--start=" + ",".join(map(str, s)), "--goal=" + ",".join(map(str, g)),
        "--workers", "1", "--max-iters", "50000", "--no-dynamic-domain",
    ]
    return subprocess.run(cmd, capture_output=True).returncode == 0


def problems(robots, scenes_, rng, root):
    p3 = Kin(robots["planar3"])
    c7 = Kin(robots["chain7"])
    out = []

    def box_region(lo, hi):
        lo, hi = np.array(lo), np.array(hi)
        return lambda p: bool(np.all(p >= lo) and np.all(p <= hi))

    specs = [
        # (scene, kin, robot file, start region, goal region, count)
        ("planar_tabletop", p3, "planar3", box_region((0.4, 0.0, -1), (1.2, 0.6, 1)), box_region((-1.2, -0.25, -1), (-0.3, 0.5, 1)), 2),
        ("planar_shelf", p3, "planar3", box_region((0.6, -0.25, -1), (0.9, 0.25, 1)), box_region((-1.0, -0.3, -1), (0.3, 0.45, 1)), 3),
        ("planar_cage", p3, "planar3", box_region((0.5, -0.6, -1), (1.3, 0.0, 1)), box_region((-1.3, 0.0, -1), (-0.4, 0.6, 1)), 2),
        ("tabletop", c7, "chain7", box_region((0.3, 0.05, 0.22), (0.75, 0.5, 0.45)), box_region((0.3, -0.5, 0.22), (0.75, -0.05, 0.45)), 4),
        ("shelf", c7, "chain7", box_region((0.45, 0.05, 0.3), (0.75, 0.4, 0.5)), box_region((0.45, -0.4, 0.6), (0.75, -0.05, 0.8)), 5),
        ("cage", c7, "chain7", box_region((0.2, -0.5, 0.4), (0.6, 0.0, 0.7)), box_region((-0.6, 0.0, 0.4), (-0.2, 0.5, 0.9)), 4),
    ]
    for scene_name, kin, robot_name, sr, gr, count in specs:
        scene = scenes_[scene_name]
        made = 0
        while made < count:
            s = pick(kin, scene, rng, sr)
            g = pick(kin, scene, rng, gr)
            if edge_free(kin, scene, s, g, 64) or not solvable(root, robot_name, scene_name, s, g):
                continue
            made += 1
            out.append({
                "name": f"{scene_name}_{made}",
                "robot": f"../robots/{robot_name}.json",
                "scene": f"../scenes/{scene_name}.json",
                "start": s,
                "goal": g,
            })
    return out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--root", default=os.path.join(os.path.dirname(__file__), "..", "data"))
    args = ap.parse_args()
    rng = np.random.default_rng(20250101)
    robots = {"planar3": planar3()}
    robots["chain7"] = chain7(rng)
    robots["dual14"] = dual14(rng, robots["chain7"])
    sc = scenes()
    for sub in ("robots", "scenes", "problems"):
        os.makedirs(os.path.join(args.root, sub), exist_ok=True)
    for name, r in robots.items():
        with open(os.path.join(args.root, "robots", f"{name}.json"), "w") as f:
            json.dump(r, f, indent=1)
    for name, s in sc.items():
        with open(os.path.join(args.root, "scenes", f"{name}.json"), "w") as f:
            json.dump(s, f, indent=1)
    staged = os.path.join(args.root, "problems_unordered")
    os.makedirs(staged, exist_ok=True)
    for p in problems(robots, sc, rng, args.root):
        with open(os.path.join(staged, f"{p['name']}.json"), "w") as f:
            json.dump(p, f, indent=1)
    order_by_difficulty(args.root, staged)
    near_wall(args.root, robots["chain7"])


def order_by_difficulty(root, staged):
    """Names problems pNN_<name> by increasing mean solve time (30 seeded trials, one worker)."""
    csv_path = os.path.join(staged, "timing.csv")
    subprocess.run([
        BINARY, "bench", "--problems", staged, "--trials", "30", "--workers", "1",
        "--sampler", "uniform", "--seed", "1000", "--csv", csv_path,
    ], check=True, capture_output=True)
    times = {}
    with open(csv_path) as f:
        next(f)
        for line in f:
            name, status, ms = line.split(",")[:3]
            times.setdefault(name, []).append(float(ms))
    ranked = sorted(times, key=lambda n: sum(times[n]) / len(times[n]))
    out = os.path.join(root, "problems")
    for old in os.listdir(out):
        os.remove(os.path.join(out, old))
    for k, name in enumerate(ranked):
        with open(os.path.join(staged, f"{name}.json")) as f:
            p = json.load(f)
        p["name"] = f"p{k + 1:02d}_{name}"
        with open(os.path.join(out, f"{p['name']}.json"), "w") as f:
            json.dump(p, f, indent=1)
    for old in os.listdir(staged):
        os.remove(os.path.join(staged, old))
    os.rmdir(staged)


def near_wall(root, robot):
    """7-DoF chain starting 1.2 mm from a wall, goal behind the base; kept outside the suite."""
    scene = {
        "name": "near_wall",
        "primitives": [
            box((0.62, 0.0, 0.6), (0.02, 1.0, 0.6)),
            box((0.0, 0.0, -0.05), (1.2, 1.2, 0.02)),
            box((0.2, 0.0, 1.0), (0.4, 1.0, 0.02)),
        ],
    }
    start = [1.726691, 1.198678, -1.277789, -2.035778, -2.782031, 2.832136, -0.558752]
    goal = [-1.173731, -0.868661, -1.761181, -2.03459, -2.706551, 2.341938, 1.84407]
    kin = Kin(robot)
    assert free(kin, scene, start) and free(kin, scene, goal)
    with open(os.path.join(root, "scenes", "near_wall.json"), "w") as f:
        json.dump(scene, f, indent=1)
    os.makedirs(os.path.join(root, "near_wall"), exist_ok=True)
    problem = {"name": "near_wall", "robot": "../robots/chain7.json", "scene": "../scenes/near_wall.json", "start": start, "goal": goal}
    with open(os.path.join(root, "near_wall", "near_wall.json"), "w") as f:
        json.dump(problem, f, indent=1)


if __name__ == "__main__":
    main()
