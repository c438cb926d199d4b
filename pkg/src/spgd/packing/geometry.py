"""Sphere-decomposed rigid bodies: poses, world transforms, boxes, clearances."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist


@dataclass
class Pose:
    """Displacement plus intrinsic X-Y-Z Euler angles (radians, never wrapped)."""

    displacement: np.ndarray = field(default_factory=lambda: np.zeros(3))
    orientation: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        self.displacement = np.array(self.displacement, dtype=float).reshape(3)
        self.orientation = np.array(self.orientation, dtype=float).reshape(3)

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.displacement, self.orientation])

    @classmethod
    def from_array(cls, a) -> "Pose":
        a = np.asarray(a, dtype=float)
        return cls(a[:3], a[3:6])


@dataclass
class RigidComponent:
    """A named body made of spheres given in its own frame."""

    name: str
    centers: np.ndarray
    radii: np.ndarray
    pose: Pose = field(default_factory=Pose)

    def __post_init__(self):
        self.centers = np.array(self.centers, dtype=float).reshape(-1, 3)
        self.radii = np.array(self.radii, dtype=float).reshape(-1)
        if self.centers.shape[0] == 0:
            raise ValueError(f"component {self.name!r} has no spheres")
        if self.centers.shape[0] != self.radii.shape[0]:
            raise ValueError(f"component {self.name!r}: centers/radii length mismatch")
        if not np.all(self.radii > 0):
            raise ValueError(f"component {self.name!r}: radii must be > 0")
        self.centers.setflags(write=False)
        self.radii.setflags(write=False)

    @property
    def n_spheres(self) -> int:
        return self.radii.size


def _rx(a):
    c, s = np.cos(a), np.sin(a)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def _ry(a):
    c, s = np.cos(a), np.sin(a)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def _rz(a):
    c, s = np.cos(a), np.sin(a)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def _drx(a):
    c, s = np.cos(a), np.sin(a)
    return np.array([[0.0, 0.0, 0.0], [0.0, -s, -c], [0.0, c, -s]])


def _dry(a):
    c, s = np.cos(a), np.sin(a)
    return np.array([[-s, 0.0, c], [0.0, 0.0, 0.0], [-c, 0.0, -s]])


def _drz(a):
    c, s = np.cos(a), np.sin(a)
    return np.array([[-s, -c, 0.0], [c, -s, 0.0], [0.0, 0.0, 0.0]])


def rotation_matrix(euler) -> np.ndarray:
    """R = Rx(a) @ Ry(b) @ Rz(c) for intrinsic X-Y-Z angles (a, b, c)."""
    a, b, c = euler
    return _rx(a) @ _ry(b) @ _rz(c)


def rotation_derivatives(euler):
    """Partial derivatives of :func:`rotation_matrix` w.r.t. each angle."""
    a, b, c = euler
    rx, ry, rz = _rx(a), _ry(b), _rz(c)
    return (_drx(a) @ ry @ rz, rx @ _dry(b) @ rz, rx @ ry @ _drz(c))


def transform(centers, pose_array) -> np.ndarray:
    pose_array = np.asarray(pose_array, dtype=float)
    return centers @ rotation_matrix(pose_array[3:6]).T + pose_array[:3]


def world_spheres(comp: RigidComponent, pose=None):
    """World-frame sphere centers and radii for ``comp`` at ``pose`` (default: its own)."""
    p = comp.pose.as_array() if pose is None else np.asarray(
        pose.as_array() if isinstance(pose, Pose) else pose, dtype=float)
    return transform(comp.centers, p), comp.radii


def bounding_box(centers, radii):
    centers = np.asarray(centers, dtype=float).reshape(-1, 3)
    radii = np.asarray(radii, dtype=float).reshape(-1, 1)
    return (centers - radii).min(axis=0), (centers + radii).max(axis=0)


def bounding_box_volume(centers, radii) -> float:
    """Volume of the axis-aligned box enclosing every sphere."""
    lo, hi = bounding_box(centers, radii)
    return float(np.prod(hi - lo))


def pair_clearance(ca, ra, cb, rb) -> float:
    """Smallest surface gap between two sphere sets (negative = overlap)."""
    return float((cdist(ca, cb) - ra[:, None] - rb[None, :]).min())


def min_clearance(spheres) -> float:
    """Minimum gap over sphere pairs belonging to different components.

    ``spheres`` is a sequence of ``(centers, radii)``, one per component.
    Returns ``inf`` when there is fewer than two components.
    """
    best = np.inf
    for i in range(len(spheres)):
        for j in range(i + 1, len(spheres)):
            best = min(best, pair_clearance(*spheres[i], *spheres[j]))
    return best


def _shell_count(k: int) -> int:
    return k**3 - max(k - 2, 0) ** 3


def generate_cube_spheres(side: float, count: int):
    """Equal spheres on a cubic lattice filling a cube centred at the origin.

    The lattice has ``k`` points per axis, pitch ``side / k`` and radius half
    the pitch. All ``k**3 - (k-2)**3`` surface points are kept (they fix the
    bounding box to the cube) and interior points are added in lattice order
    until ``count`` is reached. Valid counts are therefore those with
    ``shell(k) <= count <= k**3`` for some ``k``, e.g. 1, 8, 26-27, 56-64,
    98-125. Returns ``(centers, radii)``.
    """
    if not side > 0:
        raise ValueError("side must be > 0")
    k = next((k for k in range(1, 64) if _shell_count(k) <= count <= k**3), None)
    if count < 1 or k is None:
        raise ValueError(f"cannot fill a cube lattice with {count} spheres")
    pitch = side / k
    ticks = -side / 2.0 + pitch * (np.arange(k) + 0.5)
    grid = np.array([(x, y, z) for x in range(k) for y in range(k) for z in range(k)])
    on_shell = np.any((grid == 0) | (grid == k - 1), axis=1)
    interior = np.flatnonzero(~on_shell)[: count - int(on_shell.sum())]
    keep = np.concatenate([np.flatnonzero(on_shell), interior])
    keep.sort()
    centers = ticks[grid[keep]]
    return centers, np.full(keep.size, pitch / 2.0)
