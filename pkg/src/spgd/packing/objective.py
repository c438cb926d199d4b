"""Bounding-box volume plus log collision barrier, and its subgradient.

Poses are stored as an ``(N, 6)`` array: displacement ``(dx, dy, dz)``
followed by Euler angles ``(rx, ry, rz)``. The flat gradient has the same
layout, component-major.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .geometry import RigidComponent, rotation_derivatives, transform


@dataclass
class PackingProblem:
    components: list
    w_b: float = 20.0
    w_c: float = 1e-4
    eps: float = 1e-5
    clearance_floor: float = 1e-12

    def __post_init__(self):
        if len(self.components) < 1:
            raise ValueError("need at least one component")
        for name in ("w_b", "w_c", "eps", "clearance_floor"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")

    @property
    def n(self) -> int:
        return len(self.components)

    def initial_poses(self) -> np.ndarray:
        return np.array([c.pose.as_array() for c in self.components])

    def penalty(self, clearance: float) -> float:
        """Collision barrier; zero when there are no cross-component pairs."""
        if not np.isfinite(clearance):
            return 0.0
        return -self.w_c * np.log(max(self.eps + clearance, self.clearance_floor))

    def loss_from(self, volume: float, clearance: float) -> float:
        return self.w_b * volume + self.penalty(clearance)


def _box(world, radii):
    return (world - radii[:, None]).min(axis=0), (world + radii[:, None]).max(axis=0)


class Scene:
    """Poses plus cached world spheres, per-component boxes and pair gaps.

    Moving one component only refreshes that component's rows, which keeps
    single-variable candidate scoring at O(S * total spheres).
    """

    def __init__(self, problem: PackingProblem, poses=None):
        self.problem = problem
        comps = problem.components
        self.body = [c.centers for c in comps]
        self.radii = [c.radii for c in comps]
        self.poses = np.array(problem.initial_poses() if poses is None else poses,
                              dtype=float).reshape(problem.n, 6)
        self.world = [transform(b, p) for b, p in zip(self.body, self.poses)]
        boxes = [_box(w, r) for w, r in zip(self.world, self.radii)]
        self.lo = np.array([b[0] for b in boxes])
        self.hi = np.array([b[1] for b in boxes])
        n = problem.n
        self.gaps = np.full((n, n), np.inf)
        for i in range(n):
            for j in range(i + 1, n):
                self.gaps[i, j] = self.gaps[j, i] = self._gap(i, self.world[i], j)

    def _gap(self, i, world_i, j) -> float:
        return float((cdist(world_i, self.world[j])
                      - self.radii[i][:, None] - self.radii[j][None, :]).min())

    def copy(self) -> "Scene":
        new = object.__new__(Scene)
        new.problem = self.problem
        new.body, new.radii = self.body, self.radii
        new.poses = self.poses.copy()
        new.world = list(self.world)
        new.lo, new.hi = self.lo.copy(), self.hi.copy()
        new.gaps = self.gaps.copy()
        return new

    @property
    def volume(self) -> float:
        return float(np.prod(self.hi.max(axis=0) - self.lo.min(axis=0)))

    @property
    def clearance(self) -> float:
        return float(self.gaps.min())

    @property
    def loss(self) -> float:
        return self.problem.loss_from(self.volume, self.clearance)

    def trial(self, j: int, pose):
        """Score component ``j`` moved to ``pose`` without mutating the scene.

        Returns ``(volume, clearance, update)``; pass ``update`` to
        :meth:`commit` to apply the move.
        """
        pose = np.asarray(pose, dtype=float)
        world_j = transform(self.body[j], pose)
        lo_j, hi_j = _box(world_j, self.radii[j])
        lo = self.lo.copy()
        hi = self.hi.copy()
        lo[j], hi[j] = lo_j, hi_j
        volume = float(np.prod(hi.max(axis=0) - lo.min(axis=0)))
        row = np.full(self.problem.n, np.inf)
        for k in range(self.problem.n):
            if k != j:
                row[k] = self._gap(j, world_j, k)
        others = np.delete(np.delete(self.gaps, j, axis=0), j, axis=1)
        clearance = float(min(row.min(), others.min() if others.size else np.inf))
        return volume, clearance, (j, pose, world_j, lo_j, hi_j, row)

    def commit(self, update) -> None:
        j, pose, world_j, lo_j, hi_j, row = update
        self.poses[j] = pose
        self.world[j] = world_j
        self.lo[j], self.hi[j] = lo_j, hi_j
        self.gaps[j, :] = row
        self.gaps[:, j] = row

    def moved(self, poses) -> "Scene":
        """A new scene at ``poses``, recomputing only components that changed."""
        poses = np.asarray(poses, dtype=float).reshape(self.problem.n, 6)
        new = self.copy()
        for j in np.flatnonzero(np.any(poses != self.poses, axis=1)):
            new.commit(new.trial(j, poses[j])[2])
        return new

    def gradient(self) -> np.ndarray:
        """Subgradient of the loss w.r.t. the flattened poses.

        Box faces and the closest pair each use their lowest-index achiever
        (component first, then sphere), matching what an autodiff ``min``
        or ``max`` would pick.
        """
        prob = self.problem
        n = prob.n
        dc = [np.zeros_like(w) for w in self.world]

        ext = self.hi.max(axis=0) - self.lo.min(axis=0)
        volume = float(np.prod(ext))
        for a in range(3):
            dv = prob.w_b * volume / ext[a]
            p = int(np.argmax(self.hi[:, a]))
            s = int(np.argmax(self.world[p][:, a] + self.radii[p]))
            dc[p][s, a] += dv
            q = int(np.argmin(self.lo[:, a]))
            t = int(np.argmin(self.world[q][:, a] - self.radii[q]))
            dc[q][t, a] -= dv

        if n > 1:
            clearance = self.clearance
            arg = prob.eps + clearance
            if arg > prob.clearance_floor:
                dm = -prob.w_c / arg
                flat = int(np.argmin(self.gaps))
                i, j = divmod(flat, n)
                i, j = min(i, j), max(i, j)
                m = (cdist(self.world[i], self.world[j])
                     - self.radii[i][:, None] - self.radii[j][None, :])
                si, sj = divmod(int(np.argmin(m)), m.shape[1])
                diff = self.world[i][si] - self.world[j][sj]
                u = diff / np.linalg.norm(diff)
                dc[i][si] += dm * u
                dc[j][sj] -= dm * u

        grad = np.zeros((n, 6))
        for k in range(n):
            if not dc[k].any():
                continue
            grad[k, :3] = dc[k].sum(axis=0)
            for axis, dr in enumerate(rotation_derivatives(self.poses[k, 3:6])):
                # d(R b)/d(angle) = dR b for every body-frame center b
                grad[k, 3 + axis] = float(np.sum((self.body[k] @ dr.T) * dc[k]))
        return grad.reshape(-1)


def packing_loss(problem: PackingProblem, poses=None) -> float:
    return Scene(problem, poses).loss


def packing_gradient(problem: PackingProblem, poses=None) -> np.ndarray:
    return Scene(problem, poses).gradient()


def components_at(problem: PackingProblem, poses) -> list:
    """Copies of the problem's components carrying ``poses``."""
    from .geometry import Pose

    poses = np.asarray(poses, dtype=float).reshape(problem.n, 6)
    return [RigidComponent(c.name, c.centers, c.radii, Pose.from_array(p))
            for c, p in zip(problem.components, poses)]
