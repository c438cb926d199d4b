# %% [markdown]
# # Escaping a local minimum in one dimension
#
# `x**4 - 3x**2 + x` has a shallow minimum near 1.13 and the global one
# near -1.30. Plain gradient descent started at 2.0 rolls into the shallow
# one and stops. SPGD takes the same gradient steps but every `iter_p`
# iterations it also scores a handful of random points around the iterate
# and jumps to the best one if it is no worse.

# %%
from spgd import fixture, preset, run_gd, run_spgd

fx = fixture("quartic1d")
gd = run_gd(fx.objective, fx.x0, preset("quartic1d", "gd"))
spgd = run_spgd(fx.objective, fx.x0, preset("quartic1d", "spgd"))
print(f"GD   ends at x={gd.best_x[0]:+.4f}, f={gd.best_f:.4f}")
print(f"SPGD ends at x={spgd.best_x[0]:+.4f}, f={spgd.best_f:.4f}")

# %% [markdown]
# The trace shows where the jump happened.

# %%
for step in spgd.trace:
    if step.event == "perturb-accepted":
        print(f"row {step.iter}: jumped to x={step.x[0]:+.4f}, f={step.f:.4f}")
        break
