# %% [markdown]
# # Random-start robustness sweep
#
# Every algorithm gets the same random starts inside the function's bounds.
# A run counts as converged when its best value is within `tol` of the
# known optimum. The percentages compare each baseline with SPGD.
# Ten trials keep this quick; the CLI default is thirty.

# %%
import tempfile

from spgd.harness import ExperimentConfig, run_experiment

cfg = ExperimentConfig("peaks", n_trials=10, master_seed=1)
out = tempfile.mkdtemp(prefix="sweep-")
exp = run_experiment(cfg, out_dir=out)


def fmt(v):
    return f"{'N/A':>9s}" if v is None else f"{v:9.2f}"


print(f"{'algo':5s} {'conv':>6s} {'mean_f':>9s} {'fval%':>9s} {'time%':>9s} {'closer%':>9s}")
for row in exp.report.rows.values():
    print(f"{row.algo:5s} {row.converged_runs:3d}/{row.n_trials:<2d} {row.mean_f:9.4f} "
          f"{fmt(row.fval_improvement_pct)} {fmt(row.time_improvement_pct)} {fmt(row.closer_pct)}")
print("files written to", out)
