"""
Square root velocity transform on SO(3)^d and the pulled-back L2 distance.

q(t) = omega(c'(t)) / sqrt(|omega(c'(t))|) where omega is the
right-trivialization; for piecewise-geodesic curves q is piecewise constant,
so every integral below is an exact sum over a common refinement.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from sigshape.core import curve as cv
from sigshape.core.errors import DimensionMismatch, InvalidParameter, NotImmersed

logger = logging.getLogger('SigShape.srvt')


@dataclass(frozen=True, eq=False)
class SRVRepresentation:
    """Piecewise-constant q: values[k] holds on [times[k], times[k+1])."""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        times = np.ascontiguousarray(self.times, dtype=float)
        values = np.ascontiguousarray(self.values, dtype=float)
        if values.ndim != 2 or len(times) != len(values) + 1:
            raise DimensionMismatch(f"expected {len(times) - 1} values, got array of shape {values.shape}")
        times.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, 'times', times)
        object.__setattr__(self, 'values', values)

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    def value_at(self, t: np.ndarray) -> np.ndarray:
        idx = np.clip(np.searchsorted(self.times, t, side='right') - 1, 0, len(self.values) - 1)
        return self.values[idx]


def joint_scale(weights: Optional[Sequence[float]], d: int) -> Optional[np.ndarray]:
    """Per-coordinate factors sqrt(w_j) for the weighted product norm on so(3)^d."""
    if weights is None:
        return None
    w = np.asarray(weights, dtype=float)
    if w.shape != (d,) or np.any(w <= 0) or not np.all(np.isfinite(w)):
        raise InvalidParameter(f"joint weights must be {d} positive numbers, got {list(w)}")
    return np.repeat(np.sqrt(w), 3)


def srv_transform(c: cv.PiecewiseGeodesicCurve,
                  joint_weights: Optional[Sequence[float]] = None) -> SRVRepresentation:
    """SRVT of a curve; zero-velocity segments are excised first."""
    ld = cv.log_derivative(c)
    scale = joint_scale(joint_weights, c.d)
    if scale is not None:
        ld = cv.LogDerivative(ld.times, ld.slopes * scale)
    ld = cv.drop_degenerate_segments(ld)
    if len(ld.slopes) == 0:
        raise NotImmersed("every segment of the curve has zero velocity")
    speeds = np.linalg.norm(ld.slopes, axis=1)
    return SRVRepresentation(ld.times, ld.slopes / np.sqrt(speeds)[:, None])


def _check_dims(q0: SRVRepresentation, q1: SRVRepresentation):
    if q0.dim != q1.dim:
        raise DimensionMismatch(f"representations live in R^{q0.dim} and R^{q1.dim}")


def _cell_values(q: SRVRepresentation, knots: np.ndarray) -> np.ndarray:
    mids = 0.5 * (knots[:-1] + knots[1:])
    return q.value_at(mids)


def l2_distance(q0: SRVRepresentation, q1: SRVRepresentation) -> float:
    """sqrt of the integral of |q0 - q1|^2 over [0, 1], exact on the common refinement."""
    _check_dims(q0, q1)
    knots = cv.merge_knots(q0.times, q1.times)
    diff = _cell_values(q0, knots) - _cell_values(q1, knots)
    return float(np.sqrt(np.sum(np.diff(knots) * np.sum(diff * diff, axis=1))))


def srv_norm(q: SRVRepresentation) -> float:
    return float(np.sqrt(np.sum(np.diff(q.times) * np.sum(q.values * q.values, axis=1))))


def warp_srv(q: SRVRepresentation, phi: cv.Reparameterization) -> SRVRepresentation:
    """(q o phi) * sqrt(phi'), the action matching srv_transform(c o phi)."""
    knots = cv.merge_knots(phi.breakpoints, phi.preimage(q.times))
    mids = 0.5 * (knots[:-1] + knots[1:])
    seg = np.clip(np.searchsorted(phi.breakpoints, mids, side='right') - 1, 0, len(phi.slopes) - 1)
    rates = np.sqrt(phi.slopes[seg])
    return SRVRepresentation(knots, q.value_at(phi(mids)) * rates[:, None])


def pstar_distance(c0: cv.PiecewiseGeodesicCurve, c1: cv.PiecewiseGeodesicCurve,
                   joint_weights: Optional[Sequence[float]] = None) -> float:
    """d_{P*}: L2 distance of the SRVTs after moving both curves to start at the identity."""
    q0 = srv_transform(cv.normalize_to_identity(c0), joint_weights)
    q1 = srv_transform(cv.normalize_to_identity(c1), joint_weights)
    return l2_distance(q0, q1)
