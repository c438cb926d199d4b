"""Two-dimensional test functions and the one-dimensional quartic demo.

Every function works on arrays whose last axis holds the coordinates, so a
single point ``(2,)`` and a batch ``(k, 2)`` go through the same code.
Gradients are hand-derived; ``tests/test_benchmarks.py`` checks each one
against central differences.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Objective, as_vector

TWO_PI = 2.0 * np.pi


def _xy(p):
    p = np.asarray(p, dtype=float)
    return p[..., 0], p[..., 1]


def peaks(x, y):
    """MATLAB ``peaks`` surface."""
    e1 = np.exp(-x**2 - (y + 1.0) ** 2)
    e2 = np.exp(-(x + 1.0) ** 2 - y**2)
    e3 = np.exp(-x**2 - y**2)
    return 3.0 * e1 * (x - 1.0) ** 2 - e2 / 3.0 + e3 * (10.0 * x**3 - 2.0 * x + 10.0 * y**5)


def peaks_grad(x, y):
    e1 = np.exp(-x**2 - (y + 1.0) ** 2)
    e2 = np.exp(-(x + 1.0) ** 2 - y**2)
    e3 = np.exp(-x**2 - y**2)
    poly = 10.0 * x**3 - 2.0 * x + 10.0 * y**5
    gx = (3.0 * e1 * (2.0 * (x - 1.0) - 2.0 * x * (x - 1.0) ** 2)
          + (2.0 / 3.0) * (x + 1.0) * e2
          + e3 * (30.0 * x**2 - 2.0 - 2.0 * x * poly))
    gy = (-6.0 * (y + 1.0) * (x - 1.0) ** 2 * e1
          + (2.0 / 3.0) * y * e2
          + e3 * (50.0 * y**4 - 2.0 * y * poly))
    return gx, gy


def ackley(x, y):
    r = np.sqrt(0.5 * (x**2 + y**2))
    # grouped so the origin evaluates to exactly 0
    return 20.0 * (1.0 - np.exp(-0.2 * r)) + (np.e - np.exp(0.5 * (np.cos(TWO_PI * x) + np.cos(TWO_PI * y))))


def ackley_grad(x, y):
    """Gradient of :func:`ackley`; the cone tip at the origin gets the zero subgradient."""
    r = np.sqrt(0.5 * (x**2 + y**2))
    safe_r = np.where(r > 0.0, r, 1.0)
    cone = np.where(r > 0.0, 2.0 * np.exp(-0.2 * r) / safe_r, 0.0)
    wave = np.pi * np.exp(0.5 * (np.cos(TWO_PI * x) + np.cos(TWO_PI * y)))
    return cone * x + wave * np.sin(TWO_PI * x), cone * y + wave * np.sin(TWO_PI * y)


def easom(x, y):
    return -np.cos(x) * np.cos(y) * np.exp(-((x - np.pi) ** 2 + (y - np.pi) ** 2))


def easom_grad(x, y):
    env = np.exp(-((x - np.pi) ** 2 + (y - np.pi) ** 2))
    cx, cy, sx, sy = np.cos(x), np.cos(y), np.sin(x), np.sin(y)
    gx = env * (sx * cy + 2.0 * (x - np.pi) * cx * cy)
    gy = env * (cx * sy + 2.0 * (y - np.pi) * cx * cy)
    return gx, gy


def levy13(x, y):
    """Levy function N.13."""
    return (np.sin(3.0 * np.pi * x) ** 2
            + (x - 1.0) ** 2 * (1.0 + np.sin(3.0 * np.pi * y) ** 2)
            + (y - 1.0) ** 2 * (1.0 + np.sin(TWO_PI * y) ** 2))


def levy13_grad(x, y):
    gx = (3.0 * np.pi * np.sin(6.0 * np.pi * x)
          + 2.0 * (x - 1.0) * (1.0 + np.sin(3.0 * np.pi * y) ** 2))
    gy = ((x - 1.0) ** 2 * 3.0 * np.pi * np.sin(6.0 * np.pi * y)
          + 2.0 * (y - 1.0) * (1.0 + np.sin(TWO_PI * y) ** 2)
          + (y - 1.0) ** 2 * TWO_PI * np.sin(4.0 * np.pi * y))
    return gx, gy


def quartic1d(x):
    return x**4 - 3.0 * x**2 + x


def quartic1d_grad(x):
    return 4.0 * x**3 - 6.0 * x + 1.0


def _wrap2d(fn, grad_fn):
    def func(p):
        return fn(*_xy(p))

    def grad(p):
        gx, gy = grad_fn(*_xy(p))
        return np.stack([gx, gy], axis=-1)

    return func, grad


def _make(name, fn, grad_fn, half_width, x_star, f_star):
    func, grad = _wrap2d(fn, grad_fn)
    return Objective(name=name, dimension=2, func=func, grad=grad,
                     lower_bounds=np.full(2, -half_width),
                     upper_bounds=np.full(2, half_width),
                     known_optimum=(x_star, f_star))


# Optima refined by a 40-digit Newton solve on the gradient, then rounded
# to double precision.
PEAKS_XSTAR = (0.22827892055636910, -1.6255349574999965)
PEAKS_FSTAR = -6.5511333328358369
QUARTIC_XSTAR = -1.3008395659415771
QUARTIC_FSTAR = -3.5139050389347890

OBJECTIVES = {
    "peaks": _make("peaks", peaks, peaks_grad, 4.0, PEAKS_XSTAR, PEAKS_FSTAR),
    "ackley": _make("ackley", ackley, ackley_grad, 5.0, (0.0, 0.0), 0.0),
    "easom": _make("easom", easom, easom_grad, 100.0, (np.pi, np.pi), -1.0),
    "levy13": _make("levy13", levy13, levy13_grad, 10.0, (1.0, 1.0), 0.0),
    "quartic1d": Objective(
        name="quartic1d", dimension=1,
        func=lambda p: quartic1d(np.asarray(p, dtype=float)[..., 0]),
        grad=lambda p: quartic1d_grad(np.asarray(p, dtype=float)[..., 0])[..., None],
        lower_bounds=np.array([-3.0]), upper_bounds=np.array([3.0]),
        known_optimum=((QUARTIC_XSTAR,), QUARTIC_FSTAR)),
}


@dataclass(frozen=True)
class BenchmarkFixture:
    objective: Objective
    x0: np.ndarray
    amp: float

    @property
    def bounds(self):
        return self.objective.bounds


# Starting points and perturbation amplitudes used for the single-start
# comparisons. The quartic start sits in the basin of the local minimum.
_FIXTURES = {
    "peaks": ((-2.81, -1.47), 2.5),
    "ackley": ((-3.75, -1.96), 2.5),
    "easom": ((69.33, 12.23), 5.0),
    "levy13": ((-3.75, -1.96), 2.5),
    "quartic1d": ((2.0,), 2.5),
}

NAMES = tuple(_FIXTURES)


def get_objective(name: str) -> Objective:
    try:
        return OBJECTIVES[name]
    except KeyError:
        raise KeyError(f"unknown function {name!r}; valid names: {', '.join(NAMES)}") from None


def fixture(name: str) -> BenchmarkFixture:
    obj = get_objective(name)
    x0, amp = _FIXTURES[name]
    return BenchmarkFixture(objective=obj, x0=as_vector(x0, obj.dimension), amp=float(amp))
