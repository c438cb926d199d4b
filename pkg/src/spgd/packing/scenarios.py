"""Builders for the four bundled packing scenarios.

The JSON files under ``scenarios/`` are the frozen output of
:func:`build_all`; ``tests/test_packing.py`` checks they still agree.
Scenario 4 uses made-up stand-ins for industrial parts (gear, hook,
rivet, bracket, ...) since only their names are known.
"""

from __future__ import annotations

import itertools
import json
from pathlib import Path

import numpy as np

from .geometry import Pose, RigidComponent, bounding_box, generate_cube_spheres
from .io import Scenario, scenario_to_dict
from .objective import PackingProblem
from .solver import LinearSchedule, PackingSpgdConfig

SPHERES_PER_CUBE = 100


def default_solver(components, max_iter=3000, seed=0, alpha=1e-4) -> PackingSpgdConfig:
    """Schedules scaled to the parts' size and to the iteration budget."""
    diag = float(np.mean([np.linalg.norm(np.subtract(*bounding_box(c.centers, c.radii)[::-1]))
                          for c in components]))
    ramp = int(0.8 * max_iter)
    return PackingSpgdConfig(
        alpha=alpha, max_iter=max_iter, patience=2000,
        acceptance_factor=LinearSchedule(1.3, 1.0, int(0.6 * max_iter)),
        amp_displacement=LinearSchedule(0.5 * diag, 0.05 * diag, ramp),
        amp_orientation=LinearSchedule(np.pi / 4, np.pi / 36, ramp),
        perturb_interval=LinearSchedule(25, 100, ramp),
        n_p_per_variable=4, seed=seed)


def _cube(name, side, pose):
    c, r = generate_cube_spheres(side, SPHERES_PER_CUBE)
    return RigidComponent(name, c, r, pose)


def _layout(n, spacing, jitter, rng, z_stagger=0.0):
    corners = np.array(list(itertools.product((-1, 1), repeat=3)), dtype=float)
    if n == 4:
        corners = np.array([[-1, -1, -1], [1, -1, 1], [-1, 1, 1], [1, 1, -1]], dtype=float)
        corners[:, 2] *= z_stagger
    pos = corners[:n] * spacing + rng.uniform(-jitter, jitter, (n, 3))
    eul = rng.uniform(-np.pi / 3, np.pi / 3, (n, 3))
    return [Pose(p, e) for p, e in zip(pos, eul)]


def scenario1(seed=7) -> Scenario:
    rng = np.random.default_rng(seed)
    poses = _layout(4, 1.1, 0.2, rng, z_stagger=0.5)
    comps = [_cube(f"cube{k}", 1.0, p) for k, p in enumerate(poses)]
    return Scenario("scenario1", PackingProblem(comps), default_solver(comps))


def scenario2(seed=8) -> Scenario:
    rng = np.random.default_rng(seed)
    poses = _layout(8, 1.1, 0.15, rng)
    comps = [_cube(f"cube{k}", 1.0, p) for k, p in enumerate(poses)]
    return Scenario("scenario2", PackingProblem(comps), default_solver(comps))


SCENARIO3_SIDES = (0.6, 0.75, 0.85, 1.0, 1.0, 1.15, 1.3, 1.4)


def scenario3(seed=9) -> Scenario:
    rng = np.random.default_rng(seed)
    poses = _layout(8, 1.5, 0.15, rng)
    comps = [_cube(f"cube{k}", s, p) for k, (s, p) in enumerate(zip(SCENARIO3_SIDES, poses))]
    return Scenario("scenario3", PackingProblem(comps), default_solver(comps))


def _gear(teeth=10, radius=0.45, r=0.08):
    ang = np.linspace(0, 2 * np.pi, teeth, endpoint=False)
    rim = np.stack([radius * np.cos(ang), radius * np.sin(ang), np.zeros(teeth)], axis=1)
    inner = rim * 0.6
    hub = np.zeros((1, 3))
    centers = np.vstack([rim, inner, hub])
    return centers, np.r_[np.full(teeth, r), np.full(teeth, r), 0.12]


def _hook(r=0.07):
    shaft = np.stack([np.zeros(8), np.zeros(8), np.linspace(0.0, 0.9, 8)], axis=1)
    t = np.linspace(0, np.pi, 7)[1:]
    curl = np.stack([0.2 - 0.2 * np.cos(t), np.zeros(6), -0.2 * np.sin(t)], axis=1)
    centers = np.vstack([shaft, curl]) - [0.1, 0.0, 0.35]
    return centers, np.full(len(centers), r)


def _rivet():
    shaft = np.stack([np.zeros(6), np.zeros(6), np.linspace(-0.3, 0.3, 6)], axis=1)
    ang = np.linspace(0, 2 * np.pi, 8, endpoint=False)
    head = np.stack([0.18 * np.cos(ang), 0.18 * np.sin(ang), np.full(8, 0.38)], axis=1)
    centers = np.vstack([shaft, head, [[0.0, 0.0, 0.38]]])
    return centers, np.r_[np.full(6, 0.09), np.full(9, 0.1)]


def _bracket(r=0.1):
    leg = np.linspace(0.0, 0.8, 5)
    a = np.stack([leg, np.zeros(5), np.zeros(5)], axis=1)
    b = np.stack([np.zeros(4), np.zeros(4), leg[1:]], axis=1)
    centers = np.vstack([a, b]) - [0.3, 0.0, 0.3]
    return centers, np.full(len(centers), r)


def _rod(length=1.2, r=0.09):
    z = np.linspace(-length / 2, length / 2, 8)
    return np.stack([np.zeros(8), np.zeros(8), z], axis=1), np.full(8, r)


def _washer(radius=0.3, r=0.08):
    ang = np.linspace(0, 2 * np.pi, 12, endpoint=False)
    return np.stack([radius * np.cos(ang), radius * np.sin(ang), np.zeros(12)], axis=1), np.full(12, r)


def scenario4(seed=10) -> Scenario:
    rng = np.random.default_rng(seed)
    shapes = [("gear_large", _gear()), ("gear_small", _gear(8, 0.3, 0.07)), ("hook", _hook()),
              ("rivet", _rivet()), ("bracket", _bracket()), ("rod", _rod()),
              ("washer", _washer()), ("block", generate_cube_spheres(0.6, 27))]
    poses = _layout(8, 1.0, 0.1, rng)
    comps = [RigidComponent(name, c, r, p) for (name, (c, r)), p in zip(shapes, poses)]
    return Scenario("scenario4", PackingProblem(comps), default_solver(comps))


BUILDERS = {"scenario1": scenario1, "scenario2": scenario2, "scenario3": scenario3,
            "scenario4": scenario4}


def build_all(folder) -> None:
    folder = Path(folder)
    folder.mkdir(parents=True, exist_ok=True)
    for name, build in BUILDERS.items():
        (folder / f"{name}.json").write_text(json.dumps(scenario_to_dict(build()), indent=1) + "\n")
