"""Gradient descent, SPGD, perturbed GD and simulated annealing.

All solvers share the same conventions:

* ``x`` is a 1-D float array; the objective goes through
  :func:`spgd.core.evaluate` / :func:`spgd.core.gradient` with a per-run
  :class:`~spgd.core.EvalCounter`.
* ``max_iter`` bounds the number of gradient steps.
* The trace holds one row per event; row 0 is the starting point.
"""

from __future__ import annotations

import dataclasses
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .core import (ContractViolation, EvalCounter, NonFiniteValueError, Objective,
                   RngStream, RunResult, TraceRecorder, as_vector, evaluate,
                   evaluate_batch, gradient)

# Extra trace event for perturbations applied without a descent test
# (PGD's stagnation kick, SA's uphill Metropolis moves).
FORCED = "perturb-forced"


@dataclass
class GdConfig:
    alpha: float = 0.01
    max_iter: int = 1000
    grad_tol: float = 1e-8

    def __post_init__(self):
        if not self.alpha > 0:
            raise ContractViolation("alpha must be > 0")
        if self.max_iter < 1:
            raise ContractViolation("max_iter must be >= 1")
        if self.grad_tol < 0:
            raise ContractViolation("grad_tol must be >= 0")


@dataclass
class SpgdConfig:
    """SPGD settings. ``n_p = 0`` switches perturbation off entirely."""

    gd: GdConfig = field(default_factory=GdConfig)
    n_p: int = 10
    iter_p: int = 10
    amp: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if isinstance(self.gd, dict):
            self.gd = config_from_dict(GdConfig, self.gd)
        if self.n_p < 0:
            raise ContractViolation("n_p must be >= 0")
        if self.iter_p < 1:
            raise ContractViolation("iter_p must be >= 1")
        if not self.amp > 0:
            raise ContractViolation("amp must be > 0")


@dataclass
class PgdConfig:
    gd: GdConfig = field(default_factory=GdConfig)
    stagnation_tol: float = 1e-6
    amp: float = 0.1
    max_perturbations: int = 10
    seed: int = 0

    def __post_init__(self):
        if isinstance(self.gd, dict):
            self.gd = config_from_dict(GdConfig, self.gd)
        if self.stagnation_tol < 0:
            raise ContractViolation("stagnation_tol must be >= 0")
        if not self.amp > 0:
            raise ContractViolation("amp must be > 0")
        if self.max_perturbations < 1:
            raise ContractViolation("max_perturbations must be >= 1")


@dataclass
class SaConfig:
    """Geometric-cooling annealing schedule.

    Proposals are uniform in a box of half-width
    ``step_scale * sqrt(T / t_init)``, so moves shrink as the chain cools.
    """

    t_init: float = 1.0
    cooling: float = 0.95
    steps_per_temp: int = 50
    step_scale: float = 1.0
    t_min: float = 1e-6
    seed: int = 0

    def __post_init__(self):
        if not self.t_init > 0 or not self.t_min > 0:
            raise ContractViolation("temperatures must be > 0")
        if not 0 < self.cooling < 1:
            raise ContractViolation("cooling must lie in (0, 1)")
        if not self.t_min < self.t_init:
            raise ContractViolation("t_min must be < t_init")
        if self.steps_per_temp < 1:
            raise ContractViolation("steps_per_temp must be >= 1")
        if not self.step_scale > 0:
            raise ContractViolation("step_scale must be > 0")


CONFIG_TYPES = {"gd": GdConfig, "spgd": SpgdConfig, "pgd": PgdConfig, "sa": SaConfig}


def config_from_dict(cls, data: dict):
    """Build a config dataclass, rejecting unknown keys."""
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = set(data) - names
    if unknown:
        raise ContractViolation(f"unknown {cls.__name__} keys: {sorted(unknown)}")
    kwargs = dict(data)
    if "gd" in kwargs and isinstance(kwargs["gd"], dict):
        kwargs["gd"] = config_from_dict(GdConfig, kwargs["gd"])
    return cls(**kwargs)


def config_to_dict(cfg) -> dict:
    return dataclasses.asdict(cfg)


def load_config(path, algo: str):
    with open(Path(path)) as fh:
        return config_from_dict(CONFIG_TYPES[algo], json.load(fh))


def save_config(cfg, path) -> None:
    with open(Path(path), "w") as fh:
        json.dump(config_to_dict(cfg), fh, indent=2, sort_keys=True)


def gd_step(x, grad, alpha: float) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    grad = np.asarray(grad, dtype=float)
    if x.shape != grad.shape:
        raise ContractViolation(f"shape mismatch {x.shape} vs {grad.shape}")
    return x - alpha * grad


def sample_perturbations(x, amp: float, n_p: int, rng: RngStream) -> np.ndarray:
    """``n_p`` candidates ``x + amp * (2U - 1)``, drawn candidate-major."""
    if not amp > 0:
        raise ContractViolation("amp must be > 0")
    x = np.asarray(x, dtype=float)
    u = rng.uniforms((n_p, x.size))
    return x + amp * (2.0 * u - 1.0)


def spgd_select(candidate_fs, f_current: float) -> Optional[int]:
    """Index of the best candidate if it is no worse than ``f_current``.

    Ties go to the lowest index.
    """
    fs = np.asarray(candidate_fs, dtype=float)
    if fs.size == 0:
        raise ContractViolation("no candidates")
    j = int(np.argmin(fs))
    return j if fs[j] <= f_current else None


def _finish(rec: TraceRecorder, counter: EvalCounter, t0: float, seed: int,
            n_iter: int, status: str = "ok") -> RunResult:
    return RunResult(best_x=rec.best_x, best_f=rec.best_f,
                     fn_evals=counter.fn_evals, grad_evals=counter.grad_evals,
                     wall_time_ms=(time.perf_counter() - t0) * 1e3, seed=seed,
                     n_iter=n_iter, trace=rec.steps if rec.enabled else None,
                     status=status)


def _abort(err: NonFiniteValueError, rec, counter, t0, seed, n_iter):
    err.partial = _finish(rec, counter, t0, seed, n_iter, status="non-finite")
    raise err


def run_gd(obj: Objective, x0, cfg: GdConfig, record_trace: bool = True,
           seed: int = 0) -> RunResult:
    """Plain fixed-step gradient descent."""
    t0 = time.perf_counter()
    counter = EvalCounter()
    rec = TraceRecorder(enabled=record_trace)
    x = as_vector(x0, obj.dimension)
    i = 0
    try:
        f = evaluate(obj, x, counter)
        g = gradient(obj, x, counter)
        gn = float(np.linalg.norm(g))
        rec.record("gd-step", x, f, gn)
        while i < cfg.max_iter and not gn < cfg.grad_tol:
            x = gd_step(x, g, cfg.alpha)
            f = evaluate(obj, x, counter)
            g = gradient(obj, x, counter)
            gn = float(np.linalg.norm(g))
            i += 1
            rec.record("gd-step", x, f, gn)
    except NonFiniteValueError as err:
        _abort(err, rec, counter, t0, seed, i)
    rec.record("terminated", x, f, gn)
    return _finish(rec, counter, t0, seed, i)


def run_spgd(obj: Objective, x0, cfg: SpgdConfig, record_trace: bool = True) -> RunResult:
    """Gradient descent with a batch of uniform candidates every ``iter_p`` steps.

    At a perturbation iteration the best of ``n_p`` candidates replaces the
    iterate when its value is no worse; the gradient step is taken either
    way. The run stops after ``max_iter`` steps, or once the gradient norm
    has stayed below ``grad_tol`` for ``iter_p`` iterations without an
    accepted candidate.
    """
    t0 = time.perf_counter()
    gd = cfg.gd
    counter = EvalCounter()
    rng = RngStream(cfg.seed)
    rec = TraceRecorder(enabled=record_trace)
    x = as_vector(x0, obj.dimension)
    i = i_p = 0
    flat_since = None
    try:
        f = evaluate(obj, x, counter)
        g = gradient(obj, x, counter)
        gn = float(np.linalg.norm(g))
        rec.record("gd-step", x, f, gn)
        while i < gd.max_iter:
            if cfg.n_p > 0 and i - i_p == cfg.iter_p:
                i_p = i
                cands = sample_perturbations(x, cfg.amp, cfg.n_p, rng)
                fs = evaluate_batch(obj, cands, counter)
                j = spgd_select(fs, f)
                if j is None:
                    rec.record("perturb-rejected", x, f, gn)
                else:
                    x, f = cands[j], float(fs[j])
                    g = gradient(obj, x, counter)
                    gn = float(np.linalg.norm(g))
                    flat_since = None
                    rec.record("perturb-accepted", x, f, gn)
            if gn < gd.grad_tol:
                if flat_since is None:
                    flat_since = i
                if cfg.n_p == 0 or i - flat_since >= cfg.iter_p:
                    break
            else:
                flat_since = None
            x = gd_step(x, g, gd.alpha)
            f = evaluate(obj, x, counter)
            g = gradient(obj, x, counter)
            gn = float(np.linalg.norm(g))
            i += 1
            rec.record("gd-step", x, f, gn)
    except NonFiniteValueError as err:
        _abort(err, rec, counter, t0, cfg.seed, i)
    rec.record("terminated", x, f, gn)
    return _finish(rec, counter, t0, cfg.seed, i)


def run_pgd(obj: Objective, x0, cfg: PgdConfig, record_trace: bool = True) -> RunResult:
    """Gradient descent that kicks the iterate once each time it stagnates.

    Stagnation means ``||grad|| < stagnation_tol``. The kick is a single
    uniform draw in ``[-amp, amp]^d`` applied unconditionally. After
    ``max_perturbations`` kicks the next stagnation ends the run; with
    ``stagnation_tol = 0`` this is plain GD, including its ``grad_tol`` stop.
    """
    t0 = time.perf_counter()
    gd = cfg.gd
    counter = EvalCounter()
    rng = RngStream(cfg.seed)
    rec = TraceRecorder(enabled=record_trace)
    x = as_vector(x0, obj.dimension)
    i = 0
    kicks = 0
    try:
        f = evaluate(obj, x, counter)
        g = gradient(obj, x, counter)
        gn = float(np.linalg.norm(g))
        rec.record("gd-step", x, f, gn)
        while i < gd.max_iter:
            if gn < cfg.stagnation_tol:
                if kicks == cfg.max_perturbations:
                    break
                kicks += 1
                x = sample_perturbations(x, cfg.amp, 1, rng)[0]
                f = evaluate(obj, x, counter)
                g = gradient(obj, x, counter)
                gn = float(np.linalg.norm(g))
                rec.record(FORCED, x, f, gn)
            elif gn < gd.grad_tol:
                break
            x = gd_step(x, g, gd.alpha)
            f = evaluate(obj, x, counter)
            g = gradient(obj, x, counter)
            gn = float(np.linalg.norm(g))
            i += 1
            rec.record("gd-step", x, f, gn)
    except NonFiniteValueError as err:
        _abort(err, rec, counter, t0, cfg.seed, i)
    rec.record("terminated", x, f, gn)
    return _finish(rec, counter, t0, cfg.seed, i)


def metropolis_accept_probability(delta_f: float, temperature: float) -> float:
    if delta_f <= 0:
        return 1.0
    if temperature <= 0:
        return 0.0
    return math.exp(-delta_f / temperature)


def run_sa(obj: Objective, x0, cfg: SaConfig, record_trace: bool = True) -> RunResult:
    """Simulated annealing baseline; returns the best point ever visited."""
    t0 = time.perf_counter()
    counter = EvalCounter()
    rng = RngStream(cfg.seed)
    rec = TraceRecorder(enabled=record_trace)
    x = as_vector(x0, obj.dimension)
    n = 0
    try:
        f = evaluate(obj, x, counter)
        rec.record("gd-step", x, f, 0.0)
        temp = cfg.t_init
        while temp > cfg.t_min:
            half = cfg.step_scale * math.sqrt(temp / cfg.t_init)
            for _ in range(cfg.steps_per_temp):
                y = sample_perturbations(x, half, 1, rng)[0]
                fy = evaluate(obj, y, counter)
                n += 1
                delta = fy - f
                if delta <= 0:
                    x, f = y, fy
                    rec.record("perturb-accepted", x, f, 0.0)
                elif rng.uniform() < metropolis_accept_probability(delta, temp):
                    x, f = y, fy
                    rec.record(FORCED, x, f, 0.0)
                elif record_trace:
                    rec.record("perturb-rejected", x, f, 0.0)
            temp *= cfg.cooling
    except NonFiniteValueError as err:
        _abort(err, rec, counter, t0, cfg.seed, n)
    rec.record("terminated", x, f, 0.0)
    return _finish(rec, counter, t0, cfg.seed, n)


SOLVERS = {"gd": run_gd, "spgd": run_spgd, "pgd": run_pgd, "sa": run_sa}


def run(algo: str, obj: Objective, x0, cfg, record_trace: bool = True) -> RunResult:
    """Dispatch by algorithm name."""
    if algo not in SOLVERS:
        raise KeyError(f"unknown algorithm {algo!r}; valid: {', '.join(SOLVERS)}")
    if algo == "gd":
        return run_gd(obj, x0, cfg, record_trace=record_trace)
    return SOLVERS[algo](obj, x0, cfg, record_trace=record_trace)


def preset(function: str, algo: str, name: str = "paper"):
    """Frozen hyperparameters from ``spgd/data/presets.json``.

    ``paper`` presets are tuned for the single fixture start of each
    function; ``robust`` presets for starts drawn anywhere in its bounds.
    """
    from importlib.resources import files

    table = json.loads(files("spgd").joinpath("data/presets.json").read_text())
    try:
        return config_from_dict(CONFIG_TYPES[algo], table[name][function][algo])
    except KeyError:
        raise KeyError(f"no preset {name!r} for {function}/{algo}") from None
