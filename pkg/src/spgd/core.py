"""Shared value types: objectives, evaluation counters, seeded streams, traces.

Points are plain 1-D ``float64`` numpy arrays. Objectives are pure; the
number of function and gradient evaluations is tracked by an
:class:`EvalCounter` passed next to the objective, never by the objective.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np

EVENTS = ("gd-step", "perturb-accepted", "perturb-rejected", "terminated")


class ContractViolation(ValueError):
    """Raised when an input breaks a documented precondition."""


class NonFiniteValueError(FloatingPointError):
    """An objective or gradient produced NaN/Inf.

    ``x`` is the offending point; ``partial`` is filled in by solvers with
    the :class:`RunResult` accumulated before the failure.
    """

    def __init__(self, message, x=None, partial=None):
        super().__init__(message)
        self.x = None if x is None else np.array(x, dtype=float)
        self.partial = partial


def as_vector(x, dim: Optional[int] = None) -> np.ndarray:
    """Copy ``x`` into a finite 1-D float array, optionally checking its length."""
    v = np.array(x, dtype=float).reshape(-1)
    if dim is not None and v.shape[0] != dim:
        raise ContractViolation(f"expected a vector of length {dim}, got {v.shape[0]}")
    if not np.all(np.isfinite(v)):
        raise ContractViolation(f"vector has non-finite entries: {v}")
    return v


@dataclass(frozen=True)
class Objective:
    """A scalar function on R^n with its analytic gradient.

    ``func`` and ``grad`` must accept an array whose last axis has length
    ``dimension``; benchmark objectives broadcast over leading axes so a
    batch of candidates can be scored in one call.
    """

    name: str
    dimension: int
    func: Callable[[np.ndarray], np.ndarray]
    grad: Callable[[np.ndarray], np.ndarray]
    lower_bounds: Optional[np.ndarray] = None
    upper_bounds: Optional[np.ndarray] = None
    known_optimum: Optional[tuple] = None  # (x_star, f_star)

    def __post_init__(self):
        if self.dimension < 1:
            raise ContractViolation("dimension must be positive")
        if (self.lower_bounds is None) != (self.upper_bounds is None):
            raise ContractViolation("give both bounds or neither")
        if self.lower_bounds is not None:
            lo = as_vector(self.lower_bounds, self.dimension)
            hi = as_vector(self.upper_bounds, self.dimension)
            if not np.all(lo < hi):
                raise ContractViolation("lower_bounds must be < upper_bounds")
            object.__setattr__(self, "lower_bounds", lo)
            object.__setattr__(self, "upper_bounds", hi)
        if self.known_optimum is not None:
            xs, fs = self.known_optimum
            object.__setattr__(self, "known_optimum", (as_vector(xs, self.dimension), float(fs)))

    @property
    def bounds(self):
        if self.lower_bounds is None:
            return None
        return np.column_stack([self.lower_bounds, self.upper_bounds])


@dataclass
class EvalCounter:
    """Per-run evaluation bookkeeping."""

    fn_evals: int = 0
    grad_evals: int = 0


def evaluate(obj: Objective, x, counter: Optional[EvalCounter] = None) -> float:
    x = np.asarray(x, dtype=float)
    if x.shape != (obj.dimension,):
        raise ContractViolation(
            f"{obj.name} expects shape ({obj.dimension},), got {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ContractViolation(f"non-finite point {x}")
    if counter is not None:
        counter.fn_evals += 1
    value = float(obj.func(x))
    if not np.isfinite(value):
        raise NonFiniteValueError(f"{obj.name} returned {value}", x=x)
    return value


def evaluate_batch(obj: Objective, xs, counter: Optional[EvalCounter] = None) -> np.ndarray:
    """Score each row of ``xs``; counts one evaluation per row."""
    xs = np.asarray(xs, dtype=float)
    if xs.ndim != 2 or xs.shape[1] != obj.dimension:
        raise ContractViolation(
            f"{obj.name} expects shape (k, {obj.dimension}), got {xs.shape}")
    if counter is not None:
        counter.fn_evals += xs.shape[0]
    values = np.asarray(obj.func(xs), dtype=float).reshape(xs.shape[0])
    bad = ~np.isfinite(values)
    if bad.any():
        k = int(np.argmax(bad))
        raise NonFiniteValueError(f"{obj.name} returned {values[k]}", x=xs[k])
    return values


def gradient(obj: Objective, x, counter: Optional[EvalCounter] = None) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (obj.dimension,):
        raise ContractViolation(
            f"{obj.name} expects shape ({obj.dimension},), got {x.shape}")
    if counter is not None:
        counter.grad_evals += 1
    g = np.array(obj.grad(x), dtype=float).reshape(obj.dimension)
    if not np.all(np.isfinite(g)):
        raise NonFiniteValueError(f"{obj.name} gradient is {g}", x=x)
    return g


def finite_difference_gradient(obj: Objective, x, h: float = 1e-5,
                               counter: Optional[EvalCounter] = None) -> np.ndarray:
    """Central differences, one coordinate at a time.

    Deliberately goes through :func:`evaluate` point by point so it shares
    nothing with the analytic gradient path it is used to check.
    """
    if not h > 0:
        raise ContractViolation("h must be positive")
    x = as_vector(x, obj.dimension)
    g = np.empty_like(x)
    for k in range(x.size):
        xp = x.copy()
        xm = x.copy()
        xp[k] += h
        xm[k] -= h
        g[k] = (evaluate(obj, xp, counter) - evaluate(obj, xm, counter)) / (2.0 * h)
    return g


class RngStream:
    """Seeded uniform stream backed by numpy's PCG64.

    PCG64 with ``Generator.random`` is a fixed, documented algorithm, so a
    seed pins the sequence on every platform. ``draws`` counts the doubles
    consumed; filling an array of ``k`` values consumes exactly ``k``.
    """

    def __init__(self, seed: int):
        self.seed = int(seed)
        self._gen = np.random.Generator(np.random.PCG64(self.seed))
        self.draws = 0

    def uniform(self) -> float:
        self.draws += 1
        return float(self._gen.random())

    def uniforms(self, shape) -> np.ndarray:
        out = self._gen.random(shape)
        self.draws += out.size
        return out

    def permutation(self, n: int) -> np.ndarray:
        # Fisher-Yates from uniform draws so the draw count stays exact
        order = np.arange(n)
        for i in range(n - 1, 0, -1):
            j = int(self.uniform() * (i + 1))
            order[i], order[j] = order[j], order[i]
        return order


def uniform_draw(rng: RngStream) -> float:
    return rng.uniform()


@dataclass(frozen=True)
class TraceStep:
    """One recorded event. ``iter`` is the row index within the trace."""

    iter: int
    event: str
    x: np.ndarray
    f: float
    grad_norm: float


@dataclass
class RunResult:
    best_x: np.ndarray
    best_f: float
    fn_evals: int
    grad_evals: int
    wall_time_ms: float
    seed: int = 0
    n_iter: int = 0
    trace: Optional[list] = None
    status: str = "ok"

    def summary(self) -> dict:
        """JSON-ready summary (no trace)."""
        return {
            "best_x": [float(v) for v in self.best_x],
            "best_f": float(self.best_f),
            "fn_evals": int(self.fn_evals),
            "grad_evals": int(self.grad_evals),
            "n_iter": int(self.n_iter),
            "wall_time_ms": float(self.wall_time_ms),
            "seed": int(self.seed),
            "status": self.status,
        }


@dataclass
class TraceRecorder:
    """Accumulates trace rows and the best point seen."""

    enabled: bool = True
    steps: list = field(default_factory=list)
    best_x: Optional[np.ndarray] = None
    best_f: float = np.inf
    _n: int = 0

    def record(self, event: str, x: np.ndarray, f: float, grad_norm: float):
        if f < self.best_f:
            self.best_f = f
            self.best_x = np.array(x, dtype=float)
        if self.enabled:
            self.steps.append(TraceStep(self._n, event, np.array(x, dtype=float),
                                        float(f), float(grad_norm)))
        self._n += 1


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def write_trace_csv(path, trace) -> None:
    """Write ``iter,event,f,grad_norm,x0,...`` with round-trippable reals."""
    trace = list(trace)
    dim = trace[0].x.size if trace else 0
    with open(Path(path), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["iter", "event", "f", "grad_norm"] + [f"x{k}" for k in range(dim)])
        for s in trace:
            w.writerow([s.iter, s.event, _fmt(s.f), _fmt(s.grad_norm)]
                       + [_fmt(v) for v in s.x])


def read_trace_csv(path) -> list:
    steps = []
    with open(Path(path), newline="") as fh:
        for row in csv.DictReader(fh):
            xs = [float(row[k]) for k in row if k.startswith("x")]
            steps.append(TraceStep(int(row["iter"]), row["event"], np.array(xs),
                                   float(row["f"]), float(row["grad_norm"])))
    return steps
