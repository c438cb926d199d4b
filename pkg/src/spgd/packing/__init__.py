"""Rigid-body packing: sphere-decomposed components in a minimal bounding box."""

from .geometry import (Pose, RigidComponent, bounding_box_volume, generate_cube_spheres,
                       min_clearance, rotation_matrix, world_spheres)
from .objective import PackingProblem, Scene, packing_gradient, packing_loss
from .solver import (LinearSchedule, PackingResult, PackingSpgdConfig, accept_candidate,
                     perturb_variable, run_packing_gd, run_packing_spgd)

__all__ = [
    "Pose", "RigidComponent", "bounding_box_volume", "generate_cube_spheres",
    "min_clearance", "rotation_matrix", "world_spheres", "PackingProblem", "Scene",
    "packing_gradient", "packing_loss", "LinearSchedule", "PackingResult",
    "PackingSpgdConfig", "accept_candidate", "perturb_variable", "run_packing_gd",
    "run_packing_spgd",
]
