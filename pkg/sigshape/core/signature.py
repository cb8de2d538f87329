"""
Signatures of piecewise-geodesic curves on SO(3)^d.

The right-trivialized derivative of a piecewise-geodesic curve is constant on
each segment, so the signature over [s, t] is the left-to-right product of
exp(duration * b_k) over the (possibly partial) segments inside [s, t].
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from sigshape.core import curve as cv
from sigshape.core import tensor as ta
from sigshape.core.errors import (BadInterval, DimensionMismatch, NonAdjacentIntervals,
                                  ShapeMismatch, ZeroLogSignature)

logger = logging.getLogger('SigShape.signature')

INTERVAL_TOL = 1e-12
ZERO_LOGSIG_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Signature:
    tensor: ta.TruncatedTensor
    start: float = 0.0
    end: float = 1.0

    @property
    def level(self) -> int:
        return self.tensor.level

    @property
    def dim(self) -> int:
        return self.tensor.dim

    def coefficient(self, word: Sequence[int]) -> float:
        return self.tensor.coefficient(word)


@dataclass(frozen=True, eq=False)
class LogSignature:
    tensor: ta.TruncatedTensor

    def coefficient(self, word: Sequence[int]) -> float:
        return self.tensor.coefficient(word)

    def norm(self, level_weights: Optional[Sequence[float]] = None) -> float:
        return self.tensor.norm(level_weights=level_weights)


def signature_of_slopes(durations: np.ndarray, slopes: np.ndarray, level: int) -> ta.TruncatedTensor:
    """exp(dt_1 b_1) (x) ... (x) exp(dt_m b_m), folded left to right."""
    slopes = np.asarray(slopes, dtype=float)
    durations = np.asarray(durations, dtype=float)
    dim = slopes.shape[1]
    ta.check_size(dim, level)
    result = ta.TruncatedTensor.unit(dim, level)
    for dt, b in zip(durations, slopes):
        increment = dt * b
        if not increment.any():
            continue
        result = ta.truncated_product(result, ta.tensor_exp(ta.TruncatedTensor.from_level1(increment, level)))
    return result


def _clipped_durations(times: np.ndarray, s: float, t: float) -> np.ndarray:
    return np.clip(np.minimum(times[1:], t) - np.maximum(times[:-1], s), 0.0, None)


def signature(c: cv.PiecewiseGeodesicCurve, s: float = 0.0, t: float = 1.0,
              level: int = ta.DEFAULT_LEVEL) -> Signature:
    if not 0.0 <= s < t <= 1.0:
        raise BadInterval(f"need 0 <= s < t <= 1, got s={s}, t={t}")
    ld = cv.log_derivative(c)
    durations = _clipped_durations(ld.times, s, t)
    tensor = signature_of_slopes(durations, ld.slopes, level)
    return Signature(tensor, float(s), float(t))


def chen_concat(left: Signature, right: Signature) -> Signature:
    """S_{s,u} (x) S_{u,t} = S_{s,t}."""
    if (left.dim, left.level) != (right.dim, right.level):
        raise ShapeMismatch(
            f"signatures live in T^{left.level}(R^{left.dim}) and T^{right.level}(R^{right.dim})"
        )
    if abs(left.end - right.start) > INTERVAL_TOL:
        raise NonAdjacentIntervals(
            f"[{left.start}, {left.end}] and [{right.start}, {right.end}] do not meet"
        )
    return Signature(ta.truncated_product(left.tensor, right.tensor), left.start, right.end)


def reverse_signature(sig: Signature) -> Signature:
    """Signature of the time-reversed curve, i.e. the inverse of sig."""
    return Signature(sig.tensor.antipode(), 1.0 - sig.end, 1.0 - sig.start)


def log_signature(c: cv.PiecewiseGeodesicCurve, level: int = ta.DEFAULT_LEVEL) -> LogSignature:
    return LogSignature(ta.tensor_log(signature(c, 0.0, 1.0, level).tensor))


def _weighted_flat(logsig: ta.TruncatedTensor, level_weights: Optional[Sequence[float]]) -> np.ndarray:
    if level_weights is None:
        return logsig.flat(include_scalar=False)
    w = ta._level_weights(level_weights, logsig.level)
    return np.concatenate([w[n - 1] * logsig.levels[n] for n in range(1, logsig.level + 1)])


def _unit(vector: np.ndarray) -> np.ndarray:
    norm = float(np.linalg.norm(vector))
    if norm < ZERO_LOGSIG_TOL:
        raise ZeroLogSignature(f"log-signature norm {norm:.3e} is too small to normalize (constant curve?)")
    return vector / norm


def log_signature_features(c: cv.PiecewiseGeodesicCurve, level: int = ta.DEFAULT_LEVEL,
                           per_joint: bool = False,
                           level_weights: Optional[Sequence[float]] = None) -> np.ndarray:
    """Unit-norm log-signature coordinates of a curve.

    With per_joint the curve is split into its d joints, each getting a D=3
    log-signature, and the concatenation is normalized as a whole.
    """
    if not per_joint:
        return _unit(_weighted_flat(log_signature(c, level).tensor, level_weights))
    ld = cv.log_derivative(c)
    durations = ld.durations
    parts = []
    for j in range(c.d):
        sig = signature_of_slopes(durations, ld.slopes[:, 3 * j:3 * j + 3], level)
        parts.append(_weighted_flat(ta.tensor_log(sig), level_weights))
    return _unit(np.concatenate(parts))


def d_sig_features(u: np.ndarray, v: np.ndarray) -> float:
    if u.shape != v.shape:
        raise DimensionMismatch(f"feature vectors have shapes {u.shape} and {v.shape}")
    return float(np.linalg.norm(u - v))


def d_sig(c0: cv.PiecewiseGeodesicCurve, c1: cv.PiecewiseGeodesicCurve, level: int = ta.DEFAULT_LEVEL,
          per_joint: bool = False, level_weights: Optional[Sequence[float]] = None) -> float:
    """|| log S(c0)/||log S(c0)|| - log S(c1)/||log S(c1)|| ||, a value in [0, 2]."""
    if c0.d != c1.d:
        raise DimensionMismatch(f"curves have {c0.d} and {c1.d} joints")
    u = log_signature_features(c0, level, per_joint, level_weights)
    v = log_signature_features(c1, level, per_joint, level_weights)
    return d_sig_features(u, v)
