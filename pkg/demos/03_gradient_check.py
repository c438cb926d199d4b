# %% [markdown]
# # Checking hand-written gradients against central differences

# %%
import numpy as np

from spgd import get_objective
from spgd.core import finite_difference_gradient, gradient

rng = np.random.default_rng(0)
for name in ("peaks", "ackley", "easom", "levy13", "quartic1d"):
    obj = get_objective(name)
    lo, hi = obj.bounds.T
    pts = lo + (hi - lo) * rng.random((100, obj.dimension))
    errs = [np.linalg.norm(gradient(obj, x) - finite_difference_gradient(obj, x))
            / max(np.linalg.norm(gradient(obj, x)), 1e-6) for x in pts]
    print(f"{name:9s} worst relative error {max(errs):.2e}")

# %% [markdown]
# The packing loss gets the same treatment. Its gradient is a subgradient
# (box faces and the closest sphere pair are min/max selections), so the
# comparison only makes sense away from ties.

# %%
from spgd.packing import (PackingProblem, Pose, RigidComponent, generate_cube_spheres,
                          packing_gradient, packing_loss)

c, r = generate_cube_spheres(1.0, 27)
poses = np.array([[0, 0, 0, 0.3, -0.2, 0.5], [1.9, 0.3, 0.1, -0.4, 0.9, 0.2]])
prob = PackingProblem([RigidComponent(f"c{k}", c, r, Pose.from_array(p)) for k, p in enumerate(poses)])
g = packing_gradient(prob)
h = 1e-6
fd = np.array([(packing_loss(prob, poses.ravel() + h * e) - packing_loss(prob, poses.ravel() - h * e)) / (2 * h)
               for e in np.eye(12)])
print("packing relative error", np.linalg.norm(g - fd) / np.linalg.norm(fd))
