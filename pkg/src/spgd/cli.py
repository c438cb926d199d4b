"""Command-line entry points ``bench`` and ``pack``.

Exit status is 0 on success, 2 for bad arguments or config files and 1 when
a run itself fails.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .benchmarks import NAMES, fixture, get_objective
from .core import NonFiniteValueError, as_vector, evaluate, gradient, write_trace_csv
from .optimizers import CONFIG_TYPES, config_to_dict, load_config, preset, run


class UsageError(Exception):
    pass


def _vector(text: str) -> np.ndarray:
    try:
        return np.array([float(v) for v in text.split(",")])
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None


def _bench_run(args) -> int:
    fx = fixture(args.function)
    obj = fx.objective
    if args.config:
        cfg = load_config(args.config, args.algo)
    else:
        cfg = preset(args.function, args.algo, args.preset)
    x0 = fx.x0 if args.x0 is None else as_vector(_vector(args.x0), obj.dimension)
    if args.seed is not None and hasattr(cfg, "seed"):
        import dataclasses

        cfg = dataclasses.replace(cfg, seed=args.seed)
    try:
        res = run(args.algo, obj, x0, cfg, record_trace=args.trace is not None)
    except NonFiniteValueError as err:
        print(f"run failed: {err}", file=sys.stderr)
        res = err.partial
        if res is None or args.trace is None:
            return 1
        _write_run(args.trace, args, cfg, res)
        return 1
    if args.trace is not None:
        _write_run(args.trace, args, cfg, res)
    print(json.dumps({"function": args.function, "algo": args.algo, **res.summary()}, indent=1))
    return 0


def _write_run(folder, args, cfg, res) -> None:
    out = Path(folder)
    out.mkdir(parents=True, exist_ok=True)
    write_trace_csv(out / "trace.csv", res.trace or [])
    doc = {"function": args.function, "algo": args.algo, "config": config_to_dict(cfg),
           **res.summary()}
    (out / "result.json").write_text(json.dumps(doc, indent=1) + "\n")


def _bench_robustness(args) -> int:
    from .harness import ExperimentConfig, run_experiment

    try:
        cfg = ExperimentConfig.load(args.config)
    except (OSError, json.JSONDecodeError, TypeError, KeyError, ValueError) as err:
        raise UsageError(f"{args.config}: {err}") from None
    exp = run_experiment(cfg, out_dir=args.out, workers=args.workers)
    for algo, row in exp.report.rows.items():
        print(f"{algo:5s} converged {row.converged_runs}/{row.n_trials}  mean_f {row.mean_f:.6g}")
    return 0


def _bench_eval(args) -> int:
    obj = get_objective(args.function)
    x = as_vector(_vector(args.at), obj.dimension)
    print(json.dumps({"function": args.function, "x": x.tolist(), "f": evaluate(obj, x),
                      "grad": gradient(obj, x).tolist()}))
    return 0


def _pack_run(args) -> int:
    import dataclasses

    from .packing.io import SchemaError, load_scenario, write_outputs
    from .packing.solver import run_packing_gd, run_packing_spgd

    try:
        scn = load_scenario(args.scenario)
    except (OSError, SchemaError) as err:
        raise UsageError(str(err)) from None
    changes = {k: v for k, v in (("max_iter", args.max_iter), ("seed", args.seed)) if v is not None}
    try:
        solver = dataclasses.replace(scn.solver, **changes)
    except ValueError as err:
        raise UsageError(str(err)) from None
    driver = run_packing_spgd if args.algo == "spgd" else run_packing_gd
    try:
        res = driver(scn.problem, solver)
    except (ValueError, NonFiniteValueError) as err:
        print(f"run failed: {err}", file=sys.stderr)
        return 1
    write_outputs(args.out, scn.problem, res, args.algo)
    print(json.dumps({"scenario": scn.name, "algo": args.algo, "best_loss": res.best_loss,
                      "best_volume": res.best_volume, "n_iter": res.n_iter,
                      "status": res.status}, indent=1))
    return 0


def bench_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bench", description="Benchmark-function optimizers.")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="one run from the function's fixture start")
    r.add_argument("--function", required=True, choices=NAMES)
    r.add_argument("--algo", required=True, choices=sorted(CONFIG_TYPES))
    r.add_argument("--preset", default="paper", choices=["paper", "robust"])
    r.add_argument("--config", help="JSON solver config (overrides --preset)")
    r.add_argument("--x0", help="start point, comma separated")
    r.add_argument("--seed", type=int)
    r.add_argument("--trace", metavar="DIR", help="write trace.csv and result.json here")
    r.set_defaults(handler=_bench_run)

    s = sub.add_parser("robustness", help="multi-start sweep from an experiment config")
    s.add_argument("--config", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--workers", type=int, help="process count (default: $SPGD_WORKERS or all CPUs)")
    s.set_defaults(handler=_bench_robustness)

    e = sub.add_parser("eval", help="value and gradient at a point")
    e.add_argument("--function", required=True, choices=NAMES)
    e.add_argument("--at", required=True, help="point, comma separated")
    e.set_defaults(handler=_bench_eval)
    return p


def pack_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pack", description="Rigid-body packing.")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="pack one scenario")
    r.add_argument("--scenario", required=True,
                   help="scenario JSON path, or a bundled name such as scenario1.json")
    r.add_argument("--algo", required=True, choices=["spgd", "gd"])
    r.add_argument("--out", required=True)
    r.add_argument("--max-iter", type=int)
    r.add_argument("--seed", type=int)
    r.set_defaults(handler=_pack_run)
    return p


def _main(parser, argv) -> int:
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (UsageError, KeyError, ValueError, OSError, json.JSONDecodeError) as err:
        print(f"{parser.prog}: error: {err}", file=sys.stderr)
        return 2


def bench_main(argv=None) -> int:
    return _main(bench_parser(), argv)


def pack_main(argv=None) -> int:
    return _main(pack_parser(), argv)
