"""
Piecewise-geodesic curves on SO(3)^d.

A curve stores knot times 0 = t_0 < ... < t_m = 1 and one pose per knot.
Between knots it follows the componentwise geodesic
kappa(s) = exp(s log(B A^T)) A, so its right-trivialized derivative is
constant on each segment.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from sigshape.core import lie
from sigshape.core.errors import (AngleAtPi, InvalidParameter, JointCountMismatch, NonMonotone,
                                  NonMonotoneTimes, OutOfDomain, TooFewFrames)

logger = logging.getLogger('SigShape.curve')

KNOT_TOL = 1e-12
ZERO_SPEED_TOL = 1e-8


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=float)
    arr.setflags(write=False)
    return arr


def merge_knots(*knot_arrays: np.ndarray, tol: float = KNOT_TOL) -> np.ndarray:
    """Sorted union of knot sets, collapsing points closer than tol."""
    merged = np.unique(np.concatenate([np.asarray(k, dtype=float) for k in knot_arrays]))
    keep = [merged[0]]
    for t in merged[1:]:
        if t - keep[-1] > tol:
            keep.append(t)
    keep[0], keep[-1] = merged[0], merged[-1]
    if len(keep) > 1 and keep[-1] - keep[-2] <= tol:
        keep.pop(-2)
    return np.array(keep)


@dataclass(frozen=True, eq=False)
class Reparameterization:
    """Piecewise-linear orientation-preserving bijection of [0, 1]."""

    breakpoints: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.breakpoints, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if s.ndim != 1 or s.shape != v.shape or len(s) < 2:
            raise NonMonotone("breakpoints and values must be 1-d arrays of equal length >= 2")
        if s[0] != 0.0 or s[-1] != 1.0 or v[0] != 0.0 or v[-1] != 1.0:
            raise NonMonotone("reparameterization must fix 0 and 1")
        if np.any(np.diff(s) <= 0) or np.any(np.diff(v) <= 0):
            raise NonMonotone("breakpoints and values must be strictly increasing")
        object.__setattr__(self, 'breakpoints', _frozen(s))
        object.__setattr__(self, 'values', _frozen(v))

    @classmethod
    def identity(cls) -> 'Reparameterization':
        return cls(np.array([0.0, 1.0]), np.array([0.0, 1.0]))

    @classmethod
    def sample(cls, f: Callable[[np.ndarray], np.ndarray], n: int) -> 'Reparameterization':
        """Piecewise-linear interpolant of an increasing map f on n+1 uniform points."""
        s = np.linspace(0.0, 1.0, n + 1)
        v = np.asarray(f(s), dtype=float)
        v[0], v[-1] = 0.0, 1.0
        return cls(s, v)

    def __call__(self, s):
        return np.interp(s, self.breakpoints, self.values)

    def inverse(self) -> 'Reparameterization':
        return Reparameterization(self.values, self.breakpoints)

    def preimage(self, t):
        return np.interp(t, self.values, self.breakpoints)

    @property
    def slopes(self) -> np.ndarray:
        return np.diff(self.values) / np.diff(self.breakpoints)

    def compose(self, other: 'Reparameterization') -> 'Reparameterization':
        """(self o other)(s) = self(other(s))."""
        knots = merge_knots(other.breakpoints, other.preimage(self.breakpoints))
        return Reparameterization(knots, self(other(knots)))


@dataclass(frozen=True, eq=False)
class LogDerivative:
    """Piecewise-constant right-trivialized derivative: slopes b_k in R^{3d}."""

    times: np.ndarray
    slopes: np.ndarray

    @property
    def durations(self) -> np.ndarray:
        return np.diff(self.times)

    @property
    def speeds(self) -> np.ndarray:
        return np.linalg.norm(self.slopes, axis=1)


@dataclass(frozen=True, eq=False)
class PiecewiseGeodesicCurve:
    times: np.ndarray
    poses: np.ndarray
    _validated: bool = field(default=False, repr=False, compare=False)

    def __post_init__(self):
        if self._validated:
            return
        times = np.asarray(self.times, dtype=float)
        poses = np.asarray(self.poses, dtype=float)
        if poses.ndim != 4 or poses.shape[2:] != (3, 3):
            raise JointCountMismatch(f"poses must have shape (m+1, d, 3, 3), got {poses.shape}")
        if len(times) < 2 or len(times) != len(poses):
            raise TooFewFrames("a curve needs at least 2 knots with one pose each")
        if times[0] != 0.0 or times[-1] != 1.0 or np.any(np.diff(times) <= 0):
            raise NonMonotoneTimes("knots must increase strictly from 0 to 1")
        object.__setattr__(self, 'times', _frozen(times))
        object.__setattr__(self, 'poses', _frozen(poses))

    @property
    def d(self) -> int:
        return self.poses.shape[1]

    @property
    def dim(self) -> int:
        return 3 * self.d

    @property
    def n_segments(self) -> int:
        return len(self.times) - 1

    @cached_property
    def _log_derivative(self) -> LogDerivative:
        dt = np.diff(self.times)
        slopes = np.empty((self.n_segments, self.dim))
        for k in range(self.n_segments):
            rel = np.matmul(self.poses[k + 1], np.transpose(self.poses[k], (0, 2, 1)))
            slopes[k] = lie.pose_log(rel) / dt[k]
        slopes.setflags(write=False)
        return LogDerivative(self.times, slopes)

    @cached_property
    def zero_velocity(self) -> bool:
        """True when some segment joins (numerically) repeated frames."""
        return bool(np.any(self._log_derivative.speeds < ZERO_SPEED_TOL))


def _trusted(times: np.ndarray, poses: np.ndarray) -> PiecewiseGeodesicCurve:
    return PiecewiseGeodesicCurve(_frozen(times), _frozen(poses), _validated=True)


def from_frames(frames: Sequence[np.ndarray], times: Optional[Sequence[float]] = None) -> PiecewiseGeodesicCurve:
    """Model an animation as a curve through its frames.

    Without times the knots are uniform on [0, 1]; explicit times must be
    strictly increasing and are mapped affinely onto [0, 1]. Every rotation
    is re-orthonormalized on the way in.
    """
    if len(frames) < 2:
        raise TooFewFrames(f"need at least 2 frames, got {len(frames)}")
    poses = [lie.as_pose(f) for f in frames]
    d = poses[0].shape[0]
    for k, p in enumerate(poses):
        if p.shape[0] != d:
            raise JointCountMismatch(f"frame {k} has {p.shape[0]} joints, expected {d}")
    poses = np.stack([lie.orthonormalize_pose(p) for p in poses])

    if times is None:
        knots = np.linspace(0.0, 1.0, len(frames))
    else:
        t = np.asarray(times, dtype=float)
        if t.shape != (len(frames),):
            raise NonMonotoneTimes(f"expected {len(frames)} times, got {t.shape}")
        if np.any(np.diff(t) <= 0):
            raise NonMonotoneTimes("frame times must be strictly increasing")
        knots = (t - t[0]) / (t[-1] - t[0])
        knots[0], knots[-1] = 0.0, 1.0
    curve = _trusted(knots, poses)
    try:
        if curve.zero_velocity:
            logger.debug("Curve with %d knots has zero-velocity segments", len(knots))
    except AngleAtPi:
        logger.warning("Curve with %d knots has a half-turn between consecutive frames", len(knots))
    return curve


def segment_index(c: PiecewiseGeodesicCurve, t: float) -> int:
    k = int(np.searchsorted(c.times, t, side='right')) - 1
    return min(max(k, 0), c.n_segments - 1)


def evaluate(c: PiecewiseGeodesicCurve, t: float) -> np.ndarray:
    if not 0.0 <= t <= 1.0:
        raise OutOfDomain(f"t={t} lies outside [0, 1]")
    k = segment_index(c, t)
    t0, t1 = c.times[k], c.times[k + 1]
    if t == t0:
        return np.array(c.poses[k])
    if t == t1:
        return np.array(c.poses[k + 1])
    return lie.pose_interp(c.poses[k], c.poses[k + 1], (t - t0) / (t1 - t0))


def normalize_to_identity(c: PiecewiseGeodesicCurve) -> PiecewiseGeodesicCurve:
    """Right-translate by c(0)^-1 so the curve starts at the identity pose."""
    if np.array_equal(c.poses[0], lie.identity_pose(c.d)):
        return c
    g = lie.pose_inverse(c.poses[0])
    poses = np.matmul(c.poses, g[None])
    poses[0] = lie.identity_pose(c.d)
    return _trusted(c.times, poses)


def reparameterize(c: PiecewiseGeodesicCurve, phi: Reparameterization) -> PiecewiseGeodesicCurve:
    """c o phi, re-knotted so every segment is still a single geodesic."""
    knots = merge_knots(phi.breakpoints, phi.preimage(c.times))
    images = phi(knots)
    images[0], images[-1] = 0.0, 1.0
    poses = np.stack([evaluate(c, float(min(max(u, 0.0), 1.0))) for u in images])
    return _trusted(knots, poses)


def log_derivative(c: PiecewiseGeodesicCurve) -> LogDerivative:
    return c._log_derivative


def refine(c: PiecewiseGeodesicCurve, t: float) -> PiecewiseGeodesicCurve:
    """Insert a knot at t carrying the interpolated pose."""
    if not 0.0 < t < 1.0:
        raise OutOfDomain(f"refinement point {t} must lie inside (0, 1)")
    if np.any(np.abs(c.times - t) <= KNOT_TOL):
        return c
    k = segment_index(c, t)
    times = np.insert(c.times, k + 1, t)
    poses = np.insert(c.poses, k + 1, evaluate(c, t), axis=0)
    return _trusted(times, poses)


def reverse(c: PiecewiseGeodesicCurve) -> PiecewiseGeodesicCurve:
    times = 1.0 - c.times[::-1]
    times[0], times[-1] = 0.0, 1.0
    return _trusted(times, c.poses[::-1])


def concatenate(c0: PiecewiseGeodesicCurve, c1: PiecewiseGeodesicCurve) -> PiecewiseGeodesicCurve:
    """Run c0 then c1 on halved domains; c1 is right-translated to start at c0(1)."""
    if c0.d != c1.d:
        raise JointCountMismatch(f"cannot concatenate curves with {c0.d} and {c1.d} joints")
    shift = np.matmul(lie.pose_inverse(c1.poses[0]), c0.poses[-1])
    tail = np.matmul(c1.poses[1:], shift[None])
    times = np.concatenate([0.5 * c0.times, 0.5 + 0.5 * c1.times[1:]])
    return _trusted(times, np.concatenate([c0.poses, tail]))


def drop_degenerate_segments(ld: LogDerivative, tol: float = ZERO_SPEED_TOL) -> LogDerivative:
    """Excise segments slower than tol; the kept durations are rescaled to fill [0, 1].

    Each kept segment keeps its displacement duration * slope, so the result
    is a reparameterization of the curve with its pauses removed.
    """
    keep = ld.speeds >= tol
    if np.all(keep):
        return ld
    durations = ld.durations[keep]
    total = durations.sum()
    if total <= 0:
        return LogDerivative(np.array([0.0, 1.0]), np.zeros((0, ld.slopes.shape[1])))
    times = np.concatenate([[0.0], np.cumsum(durations / total)])
    times[-1] = 1.0
    logger.debug("Dropped %d zero-velocity segments", int(np.sum(~keep)))
    return LogDerivative(times, ld.slopes[keep] * total)


# --- seeded factories -----------------------------------------------------

def random_curve(rng: np.random.Generator, n_segments: int, d: int,
                 max_step_angle: float = 1.0, uniform: bool = False) -> PiecewiseGeodesicCurve:
    """Random piecewise-geodesic curve; each step rotates every joint by at most max_step_angle."""
    if n_segments < 1 or d < 1:
        raise InvalidParameter("random_curve needs n_segments >= 1 and d >= 1")
    start = lie.pose_exp(rng.uniform(-1.0, 1.0, size=3 * d))
    frames = [start]
    for _ in range(n_segments):
        step = rng.normal(size=(d, 3))
        norms = np.linalg.norm(step, axis=1, keepdims=True)
        step *= rng.uniform(0.1, 1.0, size=(d, 1)) * max_step_angle / norms
        frames.append(np.matmul(lie.pose_exp(step.ravel()), frames[-1]))
    if uniform:
        return from_frames(frames)
    gaps = rng.uniform(0.5, 1.5, size=n_segments)
    return from_frames(frames, np.concatenate([[0.0], np.cumsum(gaps)]))


def random_reparameterization(rng: np.random.Generator, n_breakpoints: int = 16,
                              slope_range: Tuple[float, float] = (0.25, 4.0)) -> Reparameterization:
    """Random piecewise-linear warp with interior breakpoints and slopes inside slope_range."""
    lo, hi = slope_range
    n = max(int(n_breakpoints), 1)
    widths = rng.uniform(0.5, 1.5, size=n)
    widths /= widths.sum()
    slopes = np.exp(rng.uniform(np.log(lo), np.log(hi), size=n))
    # rescale so the image has length 1 while staying in range
    for _ in range(50):
        total = float(widths @ slopes)
        slopes = np.clip(slopes / total, lo, hi)
        if abs(float(widths @ slopes) - 1.0) < 1e-15:
            break
    s = np.concatenate([[0.0], np.cumsum(widths)])
    v = np.concatenate([[0.0], np.cumsum(widths * slopes)])
    s /= s[-1]
    v /= v[-1]
    return Reparameterization(s, v)
