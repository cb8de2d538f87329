"""
SO(3) and SO(3)^d primitives.

Rotations are 3x3 float arrays, poses are arrays of shape (d, 3, 3).
The hat map sends e1 to the generator of rotations about x, so that
hat(v) @ y == cross(v, y); every Lie-algebra coordinate in the package
inherits this basis (joint j occupies coordinates 3j..3j+2).
"""

import logging
from typing import Callable

import numpy as np
from scipy.linalg import polar

from sigshape.core.errors import AngleAtPi, DataError, JointCountMismatch

logger = logging.getLogger('SigShape.lie')

_SMALL_ANGLE = 1e-8
_NEAR_PI_TRACE = 1e-6
_ORTHO_TOL = 1e-8


def hat(v: np.ndarray) -> np.ndarray:
    """Skew-symmetric matrix of a 3-vector."""
    v = np.asarray(v, dtype=float).reshape(3)
    return np.array([
        [0.0, -v[2], v[1]],
        [v[2], 0.0, -v[0]],
        [-v[1], v[0], 0.0],
    ])


def vee(m: np.ndarray) -> np.ndarray:
    """Inverse of hat; reads the skew part of m."""
    m = np.asarray(m, dtype=float).reshape(3, 3)
    return np.array([m[2, 1], m[0, 2], m[1, 0]])


def exp_so3(v: np.ndarray) -> np.ndarray:
    """Rodrigues formula with series coefficients near zero."""
    v = np.asarray(v, dtype=float).reshape(3)
    theta = float(np.linalg.norm(v))
    k = hat(v)
    k2 = k @ k
    if theta < _SMALL_ANGLE:
        a = 1.0 - theta ** 2 / 6.0
        b = 0.5 - theta ** 2 / 24.0
    else:
        a = np.sin(theta) / theta
        b = (1.0 - np.cos(theta)) / theta ** 2
    return np.eye(3) + a * k + b * k2


def _log_near_pi(r: np.ndarray, theta: float) -> np.ndarray:
    """Axis from the symmetric part, largest diagonal pivot first."""
    sym = 0.5 * (r + r.T)
    cos_t = np.cos(theta)
    aat = (sym - cos_t * np.eye(3)) / (1.0 - cos_t)
    idx = int(np.argmax(np.diag(aat)))
    pivot = aat[idx, idx]
    if not np.isfinite(pivot) or pivot <= 1e-12:
        raise AngleAtPi(f"cannot extract a rotation axis (trace={np.trace(r):.17g})")
    axis = aat[idx] / np.sqrt(pivot)
    axis /= np.linalg.norm(axis)

    # the skew part still carries sin(theta) * axis away from exactly pi
    skew = vee(r - r.T)
    alignment = float(axis @ skew)
    if abs(alignment) > 1e-14:
        if alignment < 0:
            axis = -axis
    else:
        first = axis[np.flatnonzero(np.abs(axis) > 1e-12)[0]]
        if first < 0:
            axis = -axis
    return theta * axis


def log_so3(r: np.ndarray) -> np.ndarray:
    """Principal logarithm of a rotation as an axis-angle vector with norm <= pi."""
    r = np.asarray(r, dtype=float).reshape(3, 3)
    skew = 0.5 * vee(r - r.T)
    sin_t = float(np.linalg.norm(skew))
    cos_t = 0.5 * (np.trace(r) - 1.0)
    theta = float(np.arctan2(sin_t, cos_t))

    if np.trace(r) <= -1.0 + _NEAR_PI_TRACE:
        return _log_near_pi(r, theta)
    if theta < _SMALL_ANGLE:
        return skew * (1.0 + theta ** 2 / 6.0)
    return skew * (theta / sin_t)


def geodesic_interp(a: np.ndarray, b: np.ndarray, s: float) -> np.ndarray:
    """kappa(s) = exp(s log(B A^T)) A; kappa(0) = A, kappa(1) = B."""
    if s == 0.0:
        return np.array(a, dtype=float)
    if s == 1.0:
        return np.array(b, dtype=float)
    return exp_so3(s * log_so3(b @ a.T)) @ a


def orthonormality_error(r: np.ndarray) -> float:
    r = np.asarray(r, dtype=float)
    return float(np.max(np.abs(r.T @ r - np.eye(3))))


def orthonormalize(r: np.ndarray) -> np.ndarray:
    """Project onto SO(3) with the polar decomposition when drift exceeds 1e-8."""
    r = np.asarray(r, dtype=float).reshape(3, 3)
    if not np.all(np.isfinite(r)):
        raise DataError("rotation matrix has non-finite entries")
    if orthonormality_error(r) <= _ORTHO_TOL and np.linalg.det(r) > 0:
        return r
    u, _ = polar(r)
    if np.linalg.det(u) < 0:
        raise DataError("matrix is a reflection, not a rotation")
    logger.debug("Re-orthonormalized rotation with drift %.3e", orthonormality_error(r))
    return u


# --- SO(3)^d --------------------------------------------------------------

def as_pose(p) -> np.ndarray:
    """Coerce to a (d, 3, 3) float array."""
    arr = np.asarray(p, dtype=float)
    if arr.ndim == 2:
        arr = arr[None]
    if arr.ndim != 3 or arr.shape[1:] != (3, 3) or arr.shape[0] < 1:
        raise DataError(f"pose must have shape (d, 3, 3), got {arr.shape}")
    return arr


def identity_pose(d: int) -> np.ndarray:
    return np.tile(np.eye(3), (d, 1, 1))


def _check_joints(p: np.ndarray, q: np.ndarray):
    if p.shape[0] != q.shape[0]:
        raise JointCountMismatch(f"poses have {p.shape[0]} and {q.shape[0]} joints")


def pose_map(f: Callable[[np.ndarray, np.ndarray, float], np.ndarray],
             p: np.ndarray, q: np.ndarray, s: float) -> np.ndarray:
    """Apply a binary rotation operation joint by joint."""
    p, q = as_pose(p), as_pose(q)
    _check_joints(p, q)
    return np.stack([f(pj, qj, s) for pj, qj in zip(p, q)])


def pose_interp(p: np.ndarray, q: np.ndarray, s: float) -> np.ndarray:
    return pose_map(geodesic_interp, p, q, s)


def pose_compose(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    p, q = as_pose(p), as_pose(q)
    _check_joints(p, q)
    return np.matmul(p, q)


def pose_inverse(p: np.ndarray) -> np.ndarray:
    return np.transpose(as_pose(p), (0, 2, 1))


def right_translate(p: np.ndarray, g: np.ndarray) -> np.ndarray:
    """R_g(p) = p . g, joint by joint."""
    return pose_compose(p, g)


def pose_log(p: np.ndarray) -> np.ndarray:
    """Stacked axis-angle coordinates, shape (3d,)."""
    return np.concatenate([log_so3(r) for r in as_pose(p)])


def pose_exp(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=float).reshape(-1, 3)
    return np.stack([exp_so3(x) for x in v])


def orthonormalize_pose(p: np.ndarray) -> np.ndarray:
    return np.stack([orthonormalize(r) for r in as_pose(p)])
