import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spgd.benchmarks import NAMES, OBJECTIVES, fixture, get_objective
from spgd.core import evaluate, finite_difference_gradient, gradient

TWO_D = ("peaks", "ackley", "easom", "levy13")


def rel_err(a, b):
    return np.linalg.norm(a - b) / max(np.linalg.norm(b), 1e-6)


@pytest.mark.parametrize("name", NAMES)
def test_gradient_matches_central_differences(name):
    obj = get_objective(name)
    rng = np.random.default_rng(123)
    lo, hi = obj.bounds.T
    worst = 0.0
    for x in lo + (hi - lo) * rng.random((100, obj.dimension)):
        worst = max(worst, rel_err(gradient(obj, x), finite_difference_gradient(obj, x, 1e-5)))
    assert worst < 1e-5


def test_peaks_values():
    p = get_objective("peaks")
    assert evaluate(p, [0.2283, -1.6256]) == pytest.approx(-6.5511, abs=1e-4)
    assert evaluate(p, [0.0, 0.0]) == pytest.approx(0.981012, abs=1e-6)
    assert abs(evaluate(p, [10.0, 10.0])) < 1e-30


def test_ackley_values():
    a = get_objective("ackley")
    assert evaluate(a, [0.0, 0.0]) == 0.0
    assert evaluate(a, [1.0, 1.0]) == pytest.approx(20 * (1 - np.exp(-0.2)), abs=1e-12)
    assert evaluate(a, [1.0, 1.0]) == pytest.approx(3.625385, abs=1e-5)


@given(st.floats(-5, 5), st.floats(-5, 5))
@settings(max_examples=200, deadline=None)
def test_ackley_is_even(x, y):
    a = get_objective("ackley")
    assert evaluate(a, [x, y]) == evaluate(a, [-x, -y])


def test_easom_values():
    e = get_objective("easom")
    assert evaluate(e, [np.pi, np.pi]) == -1.0
    assert evaluate(e, [0.0, 0.0]) == pytest.approx(-np.exp(-2 * np.pi**2), rel=1e-12)
    assert evaluate(e, [0.0, 0.0]) == pytest.approx(-2.675e-9, abs=1e-12)
    assert evaluate(e, [69.33, 12.23]) == 0.0
    assert np.all(gradient(e, [69.33, 12.23]) == 0.0)


def test_levy_values():
    v = get_objective("levy13")
    assert evaluate(v, [1.0, 1.0]) == pytest.approx(0.0, abs=1e-30)
    assert evaluate(v, [0.0, 0.0]) == pytest.approx(2.0, abs=1e-15)
    assert evaluate(v, [1.0, 2.0]) == pytest.approx(1.0, abs=1e-14)


def test_quartic_values():
    q = get_objective("quartic1d")
    assert evaluate(q, [0.0]) == 0.0
    assert evaluate(q, [1.0]) == -1.0
    x_star, f_star = q.known_optimum
    assert x_star[0] == pytest.approx(-1.3004, abs=1e-3)
    assert f_star == pytest.approx(-3.5139, abs=1e-4)


def test_quartic_optimum_against_high_precision_root():
    mp.mp.dps = 40
    root = mp.findroot(lambda x: 4 * x**3 - 6 * x + 1, -1.3)
    x_star, f_star = get_objective("quartic1d").known_optimum
    assert x_star[0] == pytest.approx(float(root), abs=1e-15)
    assert f_star == pytest.approx(float(root**4 - 3 * root**2 + root), abs=1e-15)


def test_peaks_optimum_against_high_precision_root():
    mp.mp.dps = 40

    def f(x, y):
        return (3 * (1 - x) ** 2 * mp.exp(-x**2 - (y + 1) ** 2)
                - 10 * (x / 5 - x**3 - y**5) * mp.exp(-x**2 - y**2)
                - mp.exp(-(x + 1) ** 2 - y**2) / 3)

    gx = lambda x, y: mp.diff(lambda t: f(t, y), x)
    gy = lambda x, y: mp.diff(lambda t: f(x, t), y)
    x, y = mp.findroot([gx, gy], (0.228, -1.625))
    x_star, f_star = get_objective("peaks").known_optimum
    assert np.allclose(x_star, (float(x), float(y)), atol=1e-14)
    assert f_star == pytest.approx(float(f(x, y)), abs=1e-14)


@pytest.mark.parametrize("name", NAMES)
def test_known_optimum(name):
    obj = get_objective(name)
    x_star, f_star = obj.known_optimum
    assert evaluate(obj, x_star) == pytest.approx(f_star, abs=1e-9)
    assert np.linalg.norm(gradient(obj, x_star)) < 1e-6
    rng = np.random.default_rng(7)
    d = rng.normal(size=(1000, obj.dimension))
    d *= 1e-3 * rng.random((1000, 1)) / np.linalg.norm(d, axis=1, keepdims=True)
    vals = obj.func(np.asarray(x_star) + d)
    assert np.all(vals >= f_star - 1e-12)


def test_easom_is_flat_far_from_optimum():
    e = get_objective("easom")
    rng = np.random.default_rng(3)
    pts = rng.uniform(-100, 100, (20000, 2))
    pts = pts[((pts - np.pi) ** 2).sum(axis=1) > 40]
    assert np.all(np.abs(e.func(pts)) < 1e-12)
    assert np.all(np.linalg.norm(e.grad(pts), axis=1) < 1e-12)


def test_fixtures():
    assert fixture("peaks").x0.tolist() == [-2.81, -1.47] and fixture("peaks").amp == 2.5
    assert fixture("ackley").x0.tolist() == [-3.75, -1.96] and fixture("ackley").amp == 2.5
    assert fixture("easom").x0.tolist() == [69.33, 12.23] and fixture("easom").amp == 5.0
    assert fixture("levy13").x0.tolist() == [-3.75, -1.96] and fixture("levy13").amp == 2.5
    for name in NAMES:
        fx = fixture(name)
        lo, hi = fx.bounds.T
        assert np.all((lo <= fx.x0) & (fx.x0 <= hi))
        assert fx.objective.known_optimum is not None


def test_standard_bounds():
    half = {"peaks": 4, "ackley": 5, "easom": 100, "levy13": 10, "quartic1d": 3}
    for name, h in half.items():
        assert np.all(OBJECTIVES[name].bounds == [[-h, h]] * OBJECTIVES[name].dimension)


def test_unknown_name_lists_choices():
    with pytest.raises(KeyError, match="peaks"):
        fixture("rosenbrock")


def test_batch_evaluation_matches_pointwise():
    rng = np.random.default_rng(0)
    for name in TWO_D:
        obj = get_objective(name)
        pts = rng.uniform(-3, 3, (5, 2))
        assert np.array_equal(obj.func(pts), [obj.func(p) for p in pts])
