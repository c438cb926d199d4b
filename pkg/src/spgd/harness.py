"""Multi-start robustness sweeps and their summary tables.

Every algorithm in a sweep starts from the same list of random points. Each
(trial, algorithm) pair gets its own seed derived from the master seed, so
results do not depend on execution order or on how many workers run them.

``report.json`` holds only quantities that are reproducible bit for bit;
wall-clock figures go to ``timing.json`` and ``report.csv``.
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import json
import os
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .benchmarks import get_objective
from .core import NonFiniteValueError, RngStream, RunResult, evaluate, write_trace_csv
from .optimizers import CONFIG_TYPES, config_from_dict, config_to_dict, preset, run

WORKERS_ENV = "SPGD_WORKERS"
NA_THRESHOLD = 1e-12


def random_starts(bounds, n_trials: int, master_seed: int) -> np.ndarray:
    """``n_trials`` points drawn uniformly inside ``bounds`` (shape ``(d, 2)``)."""
    b = np.asarray(bounds, dtype=float)
    if b.ndim != 2 or b.shape[1] != 2 or not np.all(np.isfinite(b)):
        raise ValueError("bounds must be a finite (d, 2) array")
    u = RngStream(master_seed).uniforms((n_trials, b.shape[0]))
    return b[:, 0] + (b[:, 1] - b[:, 0]) * u


def starts_digest(starts) -> str:
    return hashlib.sha256(np.ascontiguousarray(starts, dtype=float).tobytes()).hexdigest()


def trial_seed(master_seed: int, trial: int, algo: str) -> int:
    words = [master_seed & 0xFFFFFFFF, master_seed >> 32, trial, zlib.crc32(algo.encode())]
    return int(np.random.SeedSequence(words).generate_state(1)[0])


def is_converged(result: RunResult, f_star: float, tol: float) -> bool:
    return bool(abs(result.best_f - f_star) <= tol)


@dataclass
class AlgorithmRow:
    algo: str
    n_trials: int
    converged_runs: int
    mean_f: float
    mean_time_ms: float
    fval_improvement_pct: Optional[float] = None
    time_improvement_pct: Optional[float] = None
    closer_pct: Optional[float] = None


@dataclass
class RobustnessReport:
    f_star: float
    tol: float
    reference: str
    rows: dict = field(default_factory=dict)

    def to_dict(self, timing: bool = False) -> dict:
        rows = {}
        for algo, row in self.rows.items():
            d = dataclasses.asdict(row)
            if not timing:
                d.pop("mean_time_ms")
                d.pop("time_improvement_pct")
            rows[algo] = d
        return {"f_star": self.f_star, "tol": self.tol, "reference": self.reference,
                "rows": rows}


def _pct(num: float, den: float) -> Optional[float]:
    return None if abs(den) < NA_THRESHOLD else 100.0 * num / den


def summarize(results: dict, f_star: float, tol: float = 1e-3,
              reference: str = "spgd") -> RobustnessReport:
    """Convergence counts plus three improvement percentages against ``reference``.

    For each baseline B: objective improvement ``(mean_f_B - mean_f_ref) / |mean_f_B|``,
    time improvement ``(t_B - t_ref) / t_B`` and closeness improvement
    ``(d_B - d_ref) / d_B`` with ``d = |mean_f - f_star|``, all in percent and
    ``None`` when the denominator is below 1e-12. The reference row has no
    percentages.
    """
    if reference not in results:
        raise ValueError(f"reference algorithm {reference!r} missing from results")
    if any(len(v) == 0 for v in results.values()):
        raise ValueError("empty result set")
    report = RobustnessReport(f_star=float(f_star), tol=float(tol), reference=reference)
    for algo, runs in results.items():
        report.rows[algo] = AlgorithmRow(
            algo=algo, n_trials=len(runs),
            converged_runs=sum(is_converged(r, f_star, tol) for r in runs),
            mean_f=float(np.mean([r.best_f for r in runs])),
            mean_time_ms=float(np.mean([r.wall_time_ms for r in runs])))
    ref = report.rows[reference]
    d_ref = abs(ref.mean_f - f_star)
    for algo, row in report.rows.items():
        if algo == reference:
            continue
        row.fval_improvement_pct = _pct(row.mean_f - ref.mean_f, abs(row.mean_f))
        row.time_improvement_pct = _pct(row.mean_time_ms - ref.mean_time_ms, row.mean_time_ms)
        d = abs(row.mean_f - f_star)
        row.closer_pct = _pct(d - d_ref, d)
    return report


@dataclass
class ExperimentConfig:
    """One sweep: a function, several algorithms, shared random starts.

    ``configs`` maps algorithm name to solver settings; algorithms without
    an entry fall back to the ``preset`` table.
    """

    function: str
    algorithms: list = field(default_factory=lambda: ["spgd", "gd", "pgd", "sa"])
    n_trials: int = 30
    bounds: Optional[list] = None
    configs: dict = field(default_factory=dict)
    preset: str = "robust"
    master_seed: int = 0
    tol: float = 1e-3
    record_traces: bool = False

    def __post_init__(self):
        get_objective(self.function)
        if self.n_trials < 1:
            raise ValueError("n_trials must be >= 1")
        if not self.tol >= 0:
            raise ValueError("tol must be >= 0")
        for algo in self.algorithms:
            if algo not in CONFIG_TYPES:
                raise ValueError(f"unknown algorithm {algo!r}")
        extra = set(self.configs) - set(self.algorithms)
        if extra:
            raise ValueError(f"configs given for algorithms not in the sweep: {sorted(extra)}")

    def solver_config(self, algo: str):
        if algo in self.configs:
            return config_from_dict(CONFIG_TYPES[algo], self.configs[algo])
        return preset(self.function, algo, self.preset)

    def resolved_bounds(self) -> np.ndarray:
        if self.bounds is not None:
            return np.asarray(self.bounds, dtype=float)
        return get_objective(self.function).bounds

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["configs"] = {a: config_to_dict(self.solver_config(a)) for a in self.algorithms}
        d["bounds"] = self.resolved_bounds().tolist()
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ValueError(f"unknown experiment keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))


def _with_seed(cfg, seed):
    if any(f.name == "seed" for f in dataclasses.fields(cfg)):
        return dataclasses.replace(cfg, seed=seed)
    return cfg


def _one_run(job):
    function, algo, cfg, x0, seed, record = job
    obj = get_objective(function)
    try:
        with np.errstate(over="ignore", invalid="ignore"):
            res = run(algo, obj, x0, _with_seed(cfg, seed), record_trace=record)
    except NonFiniteValueError as err:
        res = err.partial
        if res is None:
            res = RunResult(np.asarray(x0, dtype=float), float(evaluate(obj, x0)), 0, 0, 0.0)
        res.status = f"failed: {err}"
    except Exception as err:  # a broken run is reported, never fatal to the sweep
        f0 = float(evaluate(obj, x0))
        res = RunResult(np.asarray(x0, dtype=float), f0, 0, 0, 0.0, status=f"failed: {err}")
    res.seed = seed
    return res


def default_workers() -> int:
    env = os.environ.get(WORKERS_ENV)
    if env:
        return max(1, int(env))
    return len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else os.cpu_count() or 1


@dataclass
class Experiment:
    config: ExperimentConfig
    starts: np.ndarray
    results: dict
    report: RobustnessReport


def run_experiment(cfg: ExperimentConfig, out_dir=None, workers: Optional[int] = None) -> Experiment:
    obj = get_objective(cfg.function)
    f_star = obj.known_optimum[1]
    starts = random_starts(cfg.resolved_bounds(), cfg.n_trials, cfg.master_seed)
    jobs = [(cfg.function, algo, cfg.solver_config(algo), x0,
             trial_seed(cfg.master_seed, t, algo), cfg.record_traces)
            for algo in cfg.algorithms for t, x0 in enumerate(starts)]
    workers = default_workers() if workers is None else workers
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
            flat = list(pool.map(_one_run, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        flat = [_one_run(j) for j in jobs]
    results = {algo: flat[k * cfg.n_trials:(k + 1) * cfg.n_trials]
               for k, algo in enumerate(cfg.algorithms)}
    report = summarize(results, f_star, cfg.tol, reference=cfg.algorithms[0]
                       if "spgd" not in results else "spgd")
    exp = Experiment(cfg, starts, results, report)
    if out_dir is not None:
        write_experiment(exp, out_dir)
    return exp


def _runs_dict(exp: Experiment) -> dict:
    f_star, tol = exp.report.f_star, exp.report.tol
    out = {}
    for algo, runs in exp.results.items():
        out[algo] = [{"trial": t, "seed": r.seed, "start": exp.starts[t].tolist(),
                      "best_f": float(r.best_f), "best_x": [float(v) for v in r.best_x],
                      "converged": is_converged(r, f_star, tol), "status": r.status,
                      "fn_evals": int(r.fn_evals), "grad_evals": int(r.grad_evals),
                      "n_iter": int(r.n_iter)}
                     for t, r in enumerate(runs)]
    return out


def _fmt(v) -> str:
    return "N/A" if v is None else f"{v:.6g}"


def write_experiment(exp: Experiment, out_dir) -> Path:
    """Write ``report.json``, ``timing.json``, ``report.csv`` and optional traces."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    doc = {"config": exp.config.to_dict(), "starts_sha256": starts_digest(exp.starts),
           "summary": exp.report.to_dict(timing=False), "runs": _runs_dict(exp)}
    (out / "report.json").write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")
    timing = {algo: {"mean_time_ms": row.mean_time_ms,
                     "time_improvement_pct": row.time_improvement_pct,
                     "wall_time_ms": [r.wall_time_ms for r in exp.results[algo]]}
              for algo, row in exp.report.rows.items()}
    (out / "timing.json").write_text(json.dumps(timing, indent=1) + "\n")
    with open(out / "report.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["algo", "n_trials", "converged_runs", "mean_f", "fval_improvement_pct",
                    "time_improvement_pct", "closer_pct", "mean_time_ms"])
        for row in exp.report.rows.values():
            w.writerow([row.algo, row.n_trials, row.converged_runs, f"{row.mean_f:.17g}",
                        _fmt(row.fval_improvement_pct), _fmt(row.time_improvement_pct),
                        _fmt(row.closer_pct), f"{row.mean_time_ms:.3f}"])
    if exp.config.record_traces:
        tdir = out / "traces"
        tdir.mkdir(exist_ok=True)
        for algo, runs in exp.results.items():
            for t, r in enumerate(runs):
                if r.trace is not None:
                    write_trace_csv(tdir / f"{algo}_{t:03d}.csv", r.trace)
    return out
