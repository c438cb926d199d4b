"""JSON geometry files, scenario configs and run outputs.

Geometry file::

    {"components": [{"name": "a",
                     "spheres": [{"c": [x, y, z], "r": r}, ...],
                     "pose": {"d": [x, y, z], "euler": [rx, ry, rz]}}]}

A scenario file is a geometry file with two optional extra blocks,
``"problem"`` (loss weights) and ``"solver"`` (:class:`PackingSpgdConfig`
fields, schedules as ``{"start_value", "end_value", "end_iter"}``).
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .geometry import Pose, RigidComponent, world_spheres
from .objective import PackingProblem, components_at
from .solver import PackingResult, PackingSpgdConfig


class SchemaError(ValueError):
    """Malformed geometry or scenario file; the message names the offending field."""


def _vec3(value, where):
    if not isinstance(value, list) or len(value) != 3:
        raise SchemaError(f"{where}: expected a list of 3 numbers")
    try:
        out = [float(v) for v in value]
    except (TypeError, ValueError):
        raise SchemaError(f"{where}: expected a list of 3 numbers") from None
    if not all(np.isfinite(out)):
        raise SchemaError(f"{where}: values must be finite")
    return out


def _get(obj, key, where):
    if not isinstance(obj, dict):
        raise SchemaError(f"{where}: expected an object")
    if key not in obj:
        raise SchemaError(f"{where}: missing field '{key}'")
    return obj[key]


def components_from_dict(data) -> list:
    comps = _get(data, "components", "$")
    if not isinstance(comps, list) or not comps:
        raise SchemaError("$.components: expected a non-empty list")
    out = []
    for i, comp in enumerate(comps):
        where = f"$.components[{i}]"
        name = _get(comp, "name", where)
        if not isinstance(name, str):
            raise SchemaError(f"{where}.name: expected a string")
        spheres = _get(comp, "spheres", where)
        if not isinstance(spheres, list) or not spheres:
            raise SchemaError(f"{where}.spheres: expected a non-empty list")
        centers, radii = [], []
        for k, s in enumerate(spheres):
            sw = f"{where}.spheres[{k}]"
            centers.append(_vec3(_get(s, "c", sw), f"{sw}.c"))
            r = _get(s, "r", sw)
            if isinstance(r, bool) or not isinstance(r, (int, float)) or not r > 0:
                raise SchemaError(f"{sw}.r: radius must be a positive number, got {r!r}")
            radii.append(float(r))
        pose = comp.get("pose", {"d": [0, 0, 0], "euler": [0, 0, 0]})
        pw = f"{where}.pose"
        d = _vec3(_get(pose, "d", pw), f"{pw}.d")
        e = _vec3(_get(pose, "euler", pw), f"{pw}.euler")
        out.append(RigidComponent(name, np.array(centers), np.array(radii), Pose(d, e)))
    return out


def components_to_dict(components) -> dict:
    return {"components": [
        {"name": c.name,
         "spheres": [{"c": [float(v) for v in ctr], "r": float(r)}
                     for ctr, r in zip(c.centers, c.radii)],
         "pose": {"d": c.pose.displacement.tolist(), "euler": c.pose.orientation.tolist()}}
        for c in components]}


def _read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None


def load_components(path) -> list:
    try:
        return components_from_dict(_read_json(path))
    except SchemaError as exc:
        raise SchemaError(f"{path}: {exc}") from None


def save_components(path, components) -> None:
    Path(path).write_text(json.dumps(components_to_dict(components), indent=1) + "\n")


@dataclass
class Scenario:
    name: str
    problem: PackingProblem
    solver: PackingSpgdConfig


_PROBLEM_KEYS = {"w_b", "w_c", "eps", "clearance_floor"}


def scenario_from_dict(data, name="scenario") -> Scenario:
    comps = components_from_dict(data)
    weights = data.get("problem", {})
    unknown = set(weights) - _PROBLEM_KEYS
    if unknown:
        raise SchemaError(f"$.problem: unknown keys {sorted(unknown)}")
    try:
        problem = PackingProblem(comps, **weights)
        solver = PackingSpgdConfig.from_dict(data.get("solver", {}))
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"$.solver/$.problem: {exc}") from None
    return Scenario(data.get("name", name), problem, solver)


def scenario_to_dict(scn: Scenario) -> dict:
    p = scn.problem
    out = {"name": scn.name,
           "problem": {"w_b": p.w_b, "w_c": p.w_c, "eps": p.eps,
                       "clearance_floor": p.clearance_floor},
           "solver": scn.solver.to_dict()}
    out.update(components_to_dict(p.components))
    return out


def load_scenario(path) -> Scenario:
    """Load a scenario from a path, or by bare name from the bundled set."""
    p = Path(path)
    if not p.exists() and p.suffix in ("", ".json") and p.parent == Path("."):
        bundled = resources.files("spgd.packing") / "scenarios" / f"{p.stem}.json"
        if bundled.is_file():
            return scenario_from_dict(json.loads(bundled.read_text()), p.stem)
    try:
        return scenario_from_dict(_read_json(p), p.stem)
    except SchemaError as exc:
        raise SchemaError(f"{p}: {exc}") from None


def bundled_scenarios() -> list:
    folder = resources.files("spgd.packing") / "scenarios"
    return sorted(f.name[:-5] for f in folder.iterdir() if f.name.endswith(".json"))


def write_history_csv(path, result: PackingResult) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["iter", "loss", "volume", "min_clearance", "event"])
        for h in result.history:
            w.writerow([h["iter"], f"{h['loss']:.17g}", f"{h['volume']:.17g}",
                        f"{h['min_clearance']:.17g}", h["event"]])


def final_scene_dict(problem: PackingProblem, poses) -> dict:
    """World-frame spheres for each component, ready for an external renderer."""
    out = []
    for comp in components_at(problem, poses):
        centers, radii = world_spheres(comp)
        out.append({"name": comp.name,
                    "pose": {"d": comp.pose.displacement.tolist(),
                             "euler": comp.pose.orientation.tolist()},
                    "spheres": [{"c": c.tolist(), "r": float(r)} for c, r in zip(centers, radii)]})
    return {"components": out}


def write_outputs(out_dir, problem: PackingProblem, result: PackingResult, algo: str) -> Path:
    """Write ``history.csv``, ``final_scene.json`` and ``summary.json`` under ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_history_csv(out / "history.csv", result)
    (out / "final_scene.json").write_text(
        json.dumps(final_scene_dict(problem, result.best_poses), indent=1) + "\n")
    summary = {"algo": algo, "best_loss": result.best_loss, "best_volume": result.best_volume,
               "n_iter": result.n_iter, "status": result.status,
               "accepted_perturbations": len(result.acceptances),
               "wall_time_ms": result.wall_time_ms}
    (out / "summary.json").write_text(json.dumps(summary, indent=1) + "\n")
    return out
