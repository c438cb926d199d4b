# %% [markdown]
# # Four solvers on the four 2-D test functions
#
# Each function is started from its fixture point with the shipped
# default presets (tuned for that start). Compare the final values with the known optima.

# %%
from spgd import fixture, preset, run

rows = []
for name in ("peaks", "ackley", "easom", "levy13"):
    fx = fixture(name)
    f_star = fx.objective.known_optimum[1]
    for algo in ("gd", "pgd", "sa", "spgd"):
        res = run(algo, fx.objective, fx.x0, preset(name, algo), record_trace=False)
        rows.append((name, algo, res.best_f, f_star, res.fn_evals, res.wall_time_ms))

print(f"{'function':8s} {'algo':5s} {'best_f':>12s} {'f*':>9s} {'evals':>7s} {'ms':>8s}")
for name, algo, f, f_star, evals, ms in rows:
    print(f"{name:8s} {algo:5s} {f:12.6g} {f_star:9.4f} {evals:7d} {ms:8.1f}")

# %% [markdown]
# Easom is the clearest case: its surface is numerically flat at the start
# point, so the gradient is exactly zero and GD never moves.
