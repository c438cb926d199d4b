import numpy as np
import pytest

from spgd.packing import Pose, PackingProblem, RigidComponent, generate_cube_spheres


@pytest.fixture
def cube_pair():
    c, r = generate_cube_spheres(1.0, 8)
    comps = [RigidComponent("a", c, r, Pose([-0.9, 0, 0], [0.1, 0.2, 0.3])),
             RigidComponent("b", c, r, Pose([0.9, 0.1, 0.05], [-0.2, 0.1, 0.0]))]
    return PackingProblem(comps)


def random_cube_state(rng, n=3, count=27):
    """n unit cubes spread along a diagonal with random orientations."""
    c, r = generate_cube_spheres(1.0, count)
    poses = np.zeros((n, 6))
    poses[:, :3] = np.arange(n)[:, None] * np.array([1.9, 0.4, 0.2]) + rng.uniform(-0.15, 0.15, (n, 3))
    poses[:, 3:] = rng.uniform(-np.pi, np.pi, (n, 3))
    comps = [RigidComponent(f"c{k}", c, r, Pose.from_array(p)) for k, p in enumerate(poses)]
    return PackingProblem(comps), poses
