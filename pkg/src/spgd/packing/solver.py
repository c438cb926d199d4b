"""GD and SPGD drivers for component packing.

Both drivers take gradient steps on the packing loss and refuse any step
that would leave two components overlapping. Plain GD therefore stops at
the first blocked step: without perturbations nothing would change again.
SPGD keeps going, relying on its perturbation phases to open a path.
"""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from ..core import NonFiniteValueError, RngStream
from .objective import PackingProblem, Scene


@dataclass
class LinearSchedule:
    """Linear ramp from ``start_value`` to ``end_value``, held after ``end_iter``."""

    start_value: float
    end_value: float
    end_iter: int

    def __post_init__(self):
        if self.end_iter < 1:
            raise ValueError("end_iter must be >= 1")

    def __call__(self, i: int) -> float:
        t = min(i / self.end_iter, 1.0)
        return self.start_value + (self.end_value - self.start_value) * t


def _schedule(v):
    return v if isinstance(v, LinearSchedule) else LinearSchedule(**v)


@dataclass
class PackingSpgdConfig:
    """Step size, stopping rules and the four perturbation schedules.

    ``perturb_interval`` is the number of iterations between perturbation
    phases; it should grow over the run so that late, crowded states are
    perturbed less often.
    """

    alpha: float = 1e-4
    max_iter: int = 3000
    patience: int = 2000
    acceptance_factor: LinearSchedule = field(
        default_factory=lambda: LinearSchedule(1.3, 1.0, 1800))
    amp_displacement: LinearSchedule = field(
        default_factory=lambda: LinearSchedule(0.5, 0.05, 2400))
    amp_orientation: LinearSchedule = field(
        default_factory=lambda: LinearSchedule(np.pi / 4, np.pi / 36, 2400))
    perturb_interval: LinearSchedule = field(
        default_factory=lambda: LinearSchedule(25, 100, 2400))
    n_p_per_variable: int = 4
    seed: int = 0

    def __post_init__(self):
        for name in ("acceptance_factor", "amp_displacement", "amp_orientation",
                     "perturb_interval"):
            setattr(self, name, _schedule(getattr(self, name)))
        if not self.alpha > 0:
            raise ValueError("alpha must be > 0")
        if self.max_iter < 1 or self.patience < 1 or self.n_p_per_variable < 1:
            raise ValueError("max_iter, patience and n_p_per_variable must be >= 1")
        if self.acceptance_factor.end_value != 1.0:
            raise ValueError("acceptance factor must end at 1.0")
        if min(self.acceptance_factor.start_value, self.acceptance_factor.end_value) < 1.0:
            raise ValueError("acceptance factor must stay >= 1")
        for s in (self.amp_displacement, self.amp_orientation):
            if not min(s.start_value, s.end_value) > 0:
                raise ValueError("perturbation amplitudes must stay > 0")
        if self.perturb_interval.end_value < self.perturb_interval.start_value:
            raise ValueError("perturb_interval must be non-decreasing")
        if not self.perturb_interval.start_value >= 1:
            raise ValueError("perturb_interval must be >= 1")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "PackingSpgdConfig":
        import dataclasses

        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ValueError(f"unknown solver keys: {sorted(unknown)}")
        return cls(**data)


@dataclass
class PackingResult:
    best_loss: float
    best_volume: float
    best_poses: np.ndarray
    final_poses: np.ndarray
    history: list  # dicts: iter, loss, volume, min_clearance, event
    acceptances: list  # dicts describing every accepted perturbation
    wall_time_ms: float
    n_iter: int
    status: str = "ok"

    @property
    def loss_history(self) -> np.ndarray:
        return np.array([h["loss"] for h in self.history])


def accept_candidate(candidate_volume: float, current_volume: float, factor: float,
                     candidate_clearance: float = np.inf) -> bool:
    """Collision-free and no more than ``factor`` times the current volume."""
    return candidate_clearance > 0 and candidate_volume <= factor * current_volume


def perturb_variable(poses, comp_idx: int, var_idx: int, amp: float,
                     rng: RngStream) -> np.ndarray:
    """Copy of ``poses`` with one scalar shifted by ``amp * (2U - 1)``."""
    if not 0 <= var_idx < 6:
        raise ValueError("var_idx must be in 0..5")
    out = np.array(poses, dtype=float).reshape(-1, 6)
    out[comp_idx, var_idx] += amp * (2.0 * rng.uniform() - 1.0)
    return out


def perturbation_order(n: int, rng: RngStream) -> np.ndarray:
    return rng.permutation(n)


def _phase(scene: Scene, cfg: PackingSpgdConfig, rng: RngStream, i: int, log: list) -> Scene:
    prob = scene.problem
    factor = cfg.acceptance_factor(i)
    amps = (cfg.amp_displacement(i),) * 3 + (cfg.amp_orientation(i),) * 3
    for j in perturbation_order(prob.n, rng):
        j = int(j)
        for var in range(6):
            best = None
            for _ in range(cfg.n_p_per_variable):
                pose = perturb_variable(scene.poses[j:j + 1], 0, var, amps[var], rng)[0]
                vol, clr, update = scene.trial(j, pose)
                if not clr > 0:
                    continue
                loss = prob.loss_from(vol, clr)
                if best is None or loss < best[0]:
                    best = (loss, vol, clr, update)
            if best is None:
                continue
            loss, vol, clr, update = best
            current = scene.volume
            if accept_candidate(vol, current, factor, clr):
                scene.commit(update)
                log.append({"iter": i, "component": j, "variable": var, "factor": factor,
                            "volume_before": current, "volume_after": vol,
                            "min_clearance": clr, "loss": loss})
    return scene


def _run(problem: PackingProblem, cfg: PackingSpgdConfig, perturb: bool) -> PackingResult:
    t0 = time.perf_counter()
    scene = Scene(problem)
    if not scene.clearance > 0:
        raise ValueError("initial configuration must be collision-free")
    rng = RngStream(cfg.seed)
    history, acceptances = [], []
    loss = scene.loss
    history.append({"iter": 0, "loss": loss, "volume": scene.volume,
                    "min_clearance": scene.clearance, "event": "start"})
    best = (loss, scene.volume, scene.poses.copy())
    since_best = 0
    i_p = 0
    status = "max-iter"
    i = 0
    for i in range(1, cfg.max_iter + 1):
        events = []
        if perturb and i - i_p >= cfg.perturb_interval(i):
            i_p = i
            n_before = len(acceptances)
            scene = _phase(scene, cfg, rng, i, acceptances)
            events.append("perturb-accepted" if len(acceptances) > n_before
                          else "perturb-rejected")
        step = scene.poses - cfg.alpha * scene.gradient().reshape(problem.n, 6)
        if not np.all(np.isfinite(step)):
            raise NonFiniteValueError("non-finite packing step", x=step.reshape(-1),
                                      partial=_result(best, scene, history, acceptances,
                                                      t0, i, "non-finite"))
        moved = scene.moved(step)
        if moved.clearance > 0:
            scene = moved
            events.append("gd-step")
        else:
            events.append("gd-collision")
        loss = scene.loss
        history.append({"iter": i, "loss": loss, "volume": scene.volume,
                        "min_clearance": scene.clearance, "event": "|".join(events)})
        if loss < best[0]:
            best = (loss, scene.volume, scene.poses.copy())
            since_best = 0
        else:
            since_best += 1
        if not perturb and events[-1] == "gd-collision":
            status = "collision-stall"
            break
        if since_best >= cfg.patience:
            status = "patience"
            break
    return _result(best, scene, history, acceptances, t0, i, status)


def _result(best, scene, history, acceptances, t0, n_iter, status):
    return PackingResult(best_loss=float(best[0]), best_volume=float(best[1]),
                         best_poses=best[2], final_poses=scene.poses.copy(),
                         history=history, acceptances=acceptances,
                         wall_time_ms=(time.perf_counter() - t0) * 1e3,
                         n_iter=n_iter, status=status)


def run_packing_spgd(problem: PackingProblem, cfg: PackingSpgdConfig) -> PackingResult:
    """SPGD for packing.

    On schedule, every component (in a freshly shuffled order) has each of
    its six pose scalars perturbed separately, ``n_p_per_variable``
    candidates at a time. The lowest-loss collision-free candidate is kept
    when its box volume is within the current acceptance factor of the
    present volume. A gradient step follows every iteration.
    """
    return _run(problem, cfg, perturb=True)


def run_packing_gd(problem: PackingProblem, cfg: PackingSpgdConfig) -> PackingResult:
    return _run(problem, cfg, perturb=False)
