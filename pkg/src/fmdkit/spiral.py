"""Discrete spirals of Theodorus built from unit steps.

Every generator here produces unit steps ``x_l`` with ``x_{l+1}``
perpendicular to the current vertex ``T_l = x_1 + ... + x_l``.  That alone
forces ``||T_l||^2 = l``: the reversed step sequence is energy preserving.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

__all__ = ["STEERING_RULES", "SpiralPath", "theodorus_2d", "theodorus_3d", "theodorus_nd"]

STEERING_RULES = ("canonical", "cyclic", "random")
DEFAULT_TILT = -math.pi / 720
DEFAULT_TILT_STEP = 18
_DEGENERATE = 1e-12


@dataclass(frozen=True)
class SpiralPath:
    """Vertices ``T_0..T_L`` (``T_0`` is the origin), steps ``x_1..x_L``.

    ``angles[l-1]`` is the polar angle ``Phi_l`` in the plane; only 2D
    spirals carry angles.
    """

    dim: int
    vertices: NDArray
    steps: NDArray
    angles: NDArray | None = None
    warnings: tuple[str, ...] = field(default=())

    @property
    def n_steps(self) -> int:
        return self.steps.shape[0]

    def norms(self) -> NDArray:
        return np.linalg.norm(self.vertices, axis=1)

    def polar_angles(self) -> NDArray:
        """Angle between +z and each ``T_l``, ``l >= 1`` (3D and up)."""
        if self.dim < 3:
            raise ValueError("polar angle needs at least three dimensions")
        v = self.vertices[1:]
        return np.arccos(np.clip(v[:, 2] / np.linalg.norm(v, axis=1), -1.0, 1.0))


def _check_steps(L: int) -> int:
    if int(L) != L or L < 1:
        raise ValueError(f"step count must be a positive integer, got {L}")
    return int(L)


def theodorus_2d(L: int) -> SpiralPath:
    """Classical spiral: ``T_l = sqrt(l) [cos Phi_l, sin Phi_l]``.

    ``Phi_1 = 0`` and ``Phi_{l+1} = Phi_l + arctan(1 / sqrt(l))``; the step
    after ``T_l`` is ``[-sin Phi_l, cos Phi_l]``.
    """
    L = _check_steps(L)
    l = np.arange(1, L + 1, dtype=float)
    phi = np.zeros(L)
    acc = 0.0
    for k in range(1, L):
        acc += math.atan(1.0 / math.sqrt(k))
        phi[k] = acc
    vertices = np.zeros((L + 1, 2))
    vertices[1:, 0] = np.sqrt(l) * np.cos(phi)
    vertices[1:, 1] = np.sqrt(l) * np.sin(phi)
    steps = np.empty((L, 2))
    steps[0] = (1.0, 0.0)
    steps[1:, 0] = -np.sin(phi[:-1])
    steps[1:, 1] = np.cos(phi[:-1])
    return SpiralPath(2, vertices, steps, phi)


def theodorus_3d(L: int, tilt: float = DEFAULT_TILT, tilt_step: int = DEFAULT_TILT_STEP) -> SpiralPath:
    """Planar spiral in ``z = 0`` that is tipped out of the plane once.

    Steps up to ``T_{tilt_step}`` follow :func:`theodorus_2d`.  The step
    after ``T_{tilt_step}`` is rotated out of the plane so that the polar
    angle of ``T_{tilt_step + 1}`` equals ``pi/2 + tilt`` (``tilt < 0``
    lifts the spiral toward +z).  Every later step keeps the same mix of
    azimuthal and meridional direction in the local frame of ``T_l``, so
    the polar angle keeps moving the same way; this is checked per run and
    a warning is recorded if it fails.
    """
    L = _check_steps(L)
    if not abs(tilt) < math.pi / 2:
        raise ValueError(f"|tilt| must be below pi/2, got {tilt}")
    if int(tilt_step) != tilt_step or tilt_step < 1:
        raise ValueError(f"tilt_step must be a positive integer, got {tilt_step}")
    tilt_step = int(tilt_step)
    warnings = []

    planar = theodorus_2d(min(L, tilt_step))
    vertices = np.zeros((L + 1, 3))
    steps = np.zeros((L, 3))
    k = planar.n_steps
    vertices[: k + 1, :2] = planar.vertices
    steps[:k, :2] = planar.steps
    if tilt_step >= L:
        if tilt_step > L:
            warnings.append(f"tilt_step {tilt_step} > steps {L}; spiral left planar")
        return SpiralPath(3, vertices, steps, None, tuple(warnings))

    # meridional share of each step, fixed by the requested polar angle at T_{K+1}
    sin_b = -math.sin(tilt) * math.sqrt(tilt_step + 1)
    if abs(sin_b) > 1:
        raise ValueError(f"tilt {tilt} is unreachable in one unit step from T_{tilt_step}")
    cos_b = math.sqrt(1.0 - sin_b * sin_b)
    zhat = np.array([0.0, 0.0, 1.0])
    T = vertices[k].copy()
    for l in range(k, L):
        t_hat = T / np.linalg.norm(T)
        h = np.cross(zhat, t_hat)
        h_norm = np.linalg.norm(h)
        if h_norm < _DEGENERATE:
            raise ValueError(f"T_{l} is aligned with the z axis; azimuthal direction undefined")
        h /= h_norm
        e = np.cross(t_hat, h)
        x = cos_b * h + sin_b * e
        x -= np.dot(x, t_hat) * t_hat
        x /= np.linalg.norm(x)
        steps[l] = x
        T = T + x
        vertices[l + 1] = T

    path = SpiralPath(3, vertices, steps, None, tuple(warnings))
    if tilt != 0:
        d = np.diff(path.polar_angles()[tilt_step:])
        monotone = np.all(d <= 1e-12) if tilt < 0 else np.all(d >= -1e-12)
        if not monotone:
            warnings.append("polar angle is not monotone after the tilt")
            path = SpiralPath(3, vertices, steps, None, tuple(warnings))
    return path


def _project_out(v: NDArray, t_hat: NDArray) -> NDArray:
    return v - np.dot(v, t_hat) * t_hat


def theodorus_nd(L: int, d: int, steering: str = "canonical", seed: int | None = None) -> SpiralPath:
    """Spiral of Theodorus in ``d`` dimensions.

    Each step is a reference direction projected onto the orthogonal
    complement of ``T_l`` and normalized.  The reference is

    * ``canonical`` -- the previous step (stays in the plane of ``e_1, e_2``
      and reproduces :func:`theodorus_2d`),
    * ``cyclic`` -- basis vector ``e_{(l mod d) + 1}``,
    * ``random`` -- a standard normal vector drawn from
      ``numpy.random.default_rng(seed)``.

    When the projection degenerates, the basis vector with the largest
    projection is used instead.
    """
    L = _check_steps(L)
    if int(d) != d or d < 2:
        raise ValueError(f"dimension must be an integer >= 2, got {d}")
    d = int(d)
    if steering not in STEERING_RULES:
        raise ValueError(f"unknown steering rule {steering!r}; expected one of {STEERING_RULES}")
    rng = np.random.default_rng(seed)
    eye = np.eye(d)

    vertices = np.zeros((L + 1, d))
    steps = np.zeros((L, d))
    steps[0] = eye[0]
    vertices[1] = eye[0]
    T = eye[0].copy()
    for l in range(1, L):
        t_hat = T / np.linalg.norm(T)
        if steering == "canonical":
            ref = steps[l - 1]
        elif steering == "cyclic":
            ref = eye[l % d]
        else:
            ref = rng.standard_normal(d)
        x = _project_out(ref, t_hat)
        if np.linalg.norm(x) < _DEGENERATE * max(np.linalg.norm(ref), 1.0):
            cands = [_project_out(e, t_hat) for e in eye]
            x = max(cands, key=np.linalg.norm)
            if np.linalg.norm(x) < _DEGENERATE:
                raise ValueError(f"no direction orthogonal to T_{l} found")
        # second projection pass keeps the step orthogonal to working precision
        x = x / np.linalg.norm(x)
        x = _project_out(x, t_hat)
        x /= np.linalg.norm(x)
        steps[l] = x
        T = T + x
        vertices[l + 1] = T
    return SpiralPath(d, vertices, steps)
