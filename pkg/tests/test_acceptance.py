"""End-to-end acceptance checks, one test per criterion.

Each test prints a single ``ACCEPTANCE <n> PASS|FAIL`` line with the measured
numbers, then asserts. Run with ``pytest tests/test_acceptance.py -v``.
"""

import dataclasses
import time

import numpy as np
import pytest

from spgd.benchmarks import NAMES, fixture, get_objective
from spgd.core import RngStream, finite_difference_gradient, gradient, write_trace_csv
from spgd.harness import ExperimentConfig, run_experiment
from spgd.optimizers import GdConfig, SpgdConfig, preset, run, run_gd, run_spgd, sample_perturbations
from spgd.packing import Scene, packing_gradient, packing_loss, run_packing_gd, run_packing_spgd
from spgd.packing.io import load_scenario

from conftest import random_cube_state
from test_packing import fd_gradient, tie_margin


@pytest.fixture
def report(capsys):
    def emit(n, checks):
        ok = all(passed for _, passed in checks)
        detail = "; ".join(f"{text} [{'ok' if passed else 'MISS'}]" for text, passed in checks)
        with capsys.disabled():
            print(f"\nACCEPTANCE {n} {'PASS' if ok else 'FAIL'}: {detail}")
        assert ok, detail
    return emit


def timed(fn, *args, **kw):
    t0 = time.perf_counter()
    out = fn(*args, **kw)
    return out, time.perf_counter() - t0


def fixture_run(name, algo):
    fx = fixture(name)
    return timed(run, algo, fx.objective, fx.x0, preset(name, algo, "paper"), record_trace=False)


def test_criterion_1_peaks(report):
    spgd, ts = fixture_run("peaks", "spgd")
    gd, tg = fixture_run("peaks", "gd")
    report(1, [
        (f"SPGD best_f={spgd.best_f:.6f} vs -6.5511", abs(spgd.best_f + 6.5511) <= 1e-3),
        (f"GD best_f={gd.best_f:.6f} vs -3.0498", abs(gd.best_f + 3.0498) <= 1e-3),
        (f"times {ts:.2f}s/{tg:.2f}s < 5s", ts < 5 and tg < 5),
    ])


def test_criterion_2_ackley(report):
    gd, t1 = fixture_run("ackley", "gd")
    pgd, t2 = fixture_run("ackley", "pgd")
    spgd, t3 = fixture_run("ackley", "spgd")
    report(2, [
        (f"GD best_f={gd.best_f:.6f} vs 9.3530", abs(gd.best_f - 9.3530) <= 1e-3),
        (f"PGD best_f={pgd.best_f:.6f} vs 9.3530", abs(pgd.best_f - 9.3530) <= 1e-3),
        (f"SPGD |best_f|={abs(spgd.best_f):.2e} < 1e-2", abs(spgd.best_f) < 1e-2),
        (f"time {t1 + t2 + t3:.2f}s < 10s", t1 + t2 + t3 < 10),
    ])


def test_criterion_3_easom(report):
    fx = fixture("easom")
    gd, t1 = fixture_run("easom", "gd")
    cfg = preset("easom", "spgd", "paper")
    spgd, t2 = timed(run_spgd, fx.objective, fx.x0, cfg, record_trace=False)
    report(3, [
        (f"GD best_f={gd.best_f!r} in {gd.n_iter} iterations", abs(gd.best_f) <= 1e-12 and gd.n_iter <= 2),
        (f"SPGD amp={cfg.amp} best_f={spgd.best_f:.6f} vs -1", cfg.amp == 5.0 and abs(spgd.best_f + 1) <= 1e-3),
        (f"time {t1 + t2:.2f}s < 30s", t1 + t2 < 30),
    ])


def test_criterion_4_levy(report):
    gd, t1 = fixture_run("levy13", "gd")
    spgd, t2 = fixture_run("levy13", "spgd")
    report(4, [
        (f"GD best_f={gd.best_f:.6f} vs 6.2915", abs(gd.best_f - 6.2915) <= 1e-3),
        (f"SPGD best_f={spgd.best_f:.2e} < 1e-3", spgd.best_f < 1e-3),
        (f"time {t1 + t2:.2f}s < 10s", t1 + t2 < 10),
    ])


def test_criterion_5_robustness(report, tmp_path):
    t0 = time.perf_counter()
    checks = []
    for name in ("peaks", "ackley", "easom", "levy13"):
        exp = run_experiment(ExperimentConfig(name, master_seed=0), tmp_path / name)
        spgd = exp.report.rows["spgd"].converged_runs
        checks.append((f"{name} SPGD {spgd}/30 >= 28", spgd >= 28))
        if name == "easom":
            gd = exp.report.rows["gd"].converged_runs
            checks.append((f"easom GD {gd}/30 == 0", gd == 0))
    elapsed = time.perf_counter() - t0
    checks.append((f"time {elapsed:.0f}s < 600s", elapsed < 600))
    report(5, checks)


def test_criterion_6_gradient_oracles(report):
    t0 = time.perf_counter()
    checks = []
    rng = np.random.default_rng(6)
    for name in NAMES:
        obj = get_objective(name)
        lo, hi = obj.bounds.T
        worst = 0.0
        for x in lo + (hi - lo) * rng.random((100, obj.dimension)):
            g, fd = gradient(obj, x), finite_difference_gradient(obj, x, 1e-5)
            worst = max(worst, np.linalg.norm(g - fd) / max(np.linalg.norm(g), 1e-6))
        checks.append((f"{name} max rel err {worst:.1e} < 1e-5", worst < 1e-5))
    worst, states = 0.0, 0
    while states < 20:
        prob, poses = random_cube_state(rng)
        if not Scene(prob, poses).clearance > 0 or tie_margin(prob, poses) < 1e-5:
            continue
        g, fd = packing_gradient(prob, poses), fd_gradient(prob, poses)
        worst = max(worst, np.linalg.norm(g - fd) / np.linalg.norm(fd))
        states += 1
    checks.append((f"packing max rel err {worst:.1e} < 1e-4 over {states} states", worst < 1e-4))
    elapsed = time.perf_counter() - t0
    checks.append((f"time {elapsed:.1f}s < 60s", elapsed < 60))
    report(6, checks)


def test_criterion_7_packing(report):
    t0 = time.perf_counter()
    checks = []
    for name in ("scenario1", "scenario2", "scenario3"):
        scn = load_scenario(name)
        gd = run_packing_gd(scn.problem, scn.solver)
        spgd = run_packing_spgd(scn.problem, scn.solver)
        checks.append((f"{name} volume SPGD {spgd.best_volume:.3f} < GD {gd.best_volume:.3f}",
                       spgd.best_volume < gd.best_volume))
        checks.append((f"{name} loss SPGD {spgd.best_loss:.2f} < GD {gd.best_loss:.2f}",
                       spgd.best_loss < gd.best_loss))
        if name == "scenario1":
            cube = sum(np.prod(np.ptp(c.centers, axis=0) + 2 * c.radii[0])
                       for c in scn.problem.components)
            checks.append((f"scenario1 SPGD volume {spgd.best_volume:.3f} <= 1.25 x {cube:.3f}",
                           spgd.best_volume <= 1.25 * cube))
    elapsed = time.perf_counter() - t0
    checks.append((f"time {elapsed:.0f}s < 900s", elapsed < 900))
    report(7, checks)


def test_criterion_8_invariants(report, tmp_path):
    checks = []
    # (a) accepted perturbations never raise f
    worse = 0
    for name in NAMES:
        fx = fixture(name)
        for seed in range(5):
            cfg = dataclasses.replace(preset(name, "spgd"), seed=seed)
            trace = run_spgd(fx.objective, fx.x0, cfg).trace
            worse += sum(s.event == "perturb-accepted" and s.f > p.f for p, s in zip(trace, trace[1:]))
    checks.append((f"(a) {worse} accepted steps with higher f", worse == 0))

    # (b) perturbation disabled reproduces GD
    same = True
    for name in NAMES:
        fx = fixture(name)
        gd = GdConfig(alpha=1e-3, max_iter=500)
        a = run_gd(fx.objective, fx.x0, gd).trace
        b = run_spgd(fx.objective, fx.x0, SpgdConfig(gd=gd, n_p=0)).trace
        same &= [(s.event, s.x.tobytes(), s.f) for s in a] == [(s.event, s.x.tobytes(), s.f) for s in b]
    checks.append(("(b) SPGD with n_p=0 trace-identical to GD", same))

    # (c) fixed seeds give byte-identical traces and reports
    fx = fixture("levy13")
    for tag in ("x", "y"):
        write_trace_csv(tmp_path / f"{tag}.csv", run_spgd(fx.objective, fx.x0, preset("levy13", "spgd")).trace)
    cfg = ExperimentConfig("peaks", n_trials=5, master_seed=3)
    run_experiment(cfg, tmp_path / "r1", workers=1)
    run_experiment(cfg, tmp_path / "r2", workers=2)
    traces_equal = (tmp_path / "x.csv").read_bytes() == (tmp_path / "y.csv").read_bytes()
    reports_equal = (tmp_path / "r1" / "report.json").read_bytes() == (tmp_path / "r2" / "report.json").read_bytes()
    checks.append(("(c) identical traces and report.json", traces_equal and reports_equal))

    # (d) perturbation containment
    x = np.array([0.5, -1.5])
    cand = sample_perturbations(x, 2.5, 10_000, RngStream(8))
    checks.append((f"(d) {cand.size} samples within +-2.5", bool(np.all(np.abs(cand - x) <= 2.5))))
    report(8, checks)
