"""
Embedded property checks run by `sigshape selftest`.

Each check draws seeded random curves and returns the worst deviation it
observed next to its tolerance.
"""

import logging
import time
from dataclasses import dataclass
from math import factorial
from typing import Callable, List, Optional

import numpy as np

from sigshape.core import curve as cv
from sigshape.core import lie, reparam, signature, srvt
from sigshape.core import tensor as ta

logger = logging.getLogger('SigShape.selftest')


@dataclass
class CheckResult:
    name: str
    worst: float
    tolerance: float
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.worst) and self.worst <= self.tolerance)


def _closed_form(rng: np.random.Generator, trials: int) -> float:
    b = np.array([1.0, 2.0, 3.0])
    # one segment of slope b; |b| > pi so it cannot go through from_frames
    sig = signature.signature_of_slopes(np.array([1.0]), b[None], 4)
    worst = 0.0
    for n in range(1, 5):
        for w in ta.words(3, n):
            expected = np.prod([b[i - 1] for i in w]) / factorial(n)
            worst = max(worst, abs(sig.coefficient(w) - expected))
    return worst


def _chen(rng: np.random.Generator, trials: int) -> float:
    worst = 0.0
    for _ in range(trials):
        c = cv.random_curve(rng, 5, 2)
        u = float(rng.uniform(0.05, 0.95))
        whole = signature.signature(c, 0.0, 1.0, 3)
        split = signature.chen_concat(signature.signature(c, 0.0, u, 3), signature.signature(c, u, 1.0, 3))
        worst = max(worst, whole.tensor.max_abs_difference(split.tensor) / max(1.0, whole.tensor.norm()))
    return worst


def _reversal(rng: np.random.Generator, trials: int) -> float:
    worst = 0.0
    for _ in range(trials):
        c = cv.random_curve(rng, 5, 2)
        forward = signature.signature(c, level=3)
        backward = signature.signature(cv.reverse(c), level=3)
        product = ta.truncated_product(backward.tensor, forward.tensor)
        scale = max(1.0, forward.tensor.norm()) ** 2
        worst = max(worst, product.max_abs_difference(ta.TruncatedTensor.unit(6, 3)) / scale)
    return worst


def _shuffle(rng: np.random.Generator, trials: int) -> float:
    return max(ta.shuffle_check(signature.signature(cv.random_curve(rng, 5, 2), level=3).tensor)
               for _ in range(trials))


def _signature_invariance(rng: np.random.Generator, trials: int) -> float:
    worst = 0.0
    for _ in range(trials):
        c = cv.random_curve(rng, 6, 2)
        phi = cv.random_reparameterization(rng)
        s0 = signature.signature(c, level=3).tensor
        s1 = signature.signature(cv.reparameterize(c, phi), level=3).tensor
        worst = max(worst, s0.max_abs_difference(s1) / max(1.0, s0.norm()))
    return worst


def _srv_equivariance(rng: np.random.Generator, trials: int) -> float:
    worst = 0.0
    for _ in range(trials):
        c = cv.random_curve(rng, 6, 2)
        phi = cv.random_reparameterization(rng)
        lhs = srvt.srv_transform(cv.reparameterize(c, phi))
        rhs = srvt.warp_srv(srvt.srv_transform(c), phi)
        worst = max(worst, srvt.l2_distance(lhs, rhs))
    return worst


def _srv_translation(rng: np.random.Generator, trials: int) -> float:
    worst = 0.0
    for _ in range(trials):
        c = cv.random_curve(rng, 6, 2)
        g = lie.pose_exp(rng.uniform(-1.0, 1.0, size=6))
        moved = cv.PiecewiseGeodesicCurve(c.times, np.matmul(c.poses, g[None]))
        worst = max(worst, srvt.l2_distance(srvt.srv_transform(c), srvt.srv_transform(moved)))
    return worst


def _dp_optimality(rng: np.random.Generator, trials: int) -> float:
    worst = 0.0
    for t in range(trials):
        m = 3 + t % 4
        grid = reparam.DPGrid(m, ((1, 1), (1, 2), (2, 1)))
        q0 = srvt.srv_transform(cv.normalize_to_identity(cv.random_curve(rng, 4, 1)))
        q1 = srvt.srv_transform(cv.normalize_to_identity(cv.random_curve(rng, 4, 1)))
        dp = reparam.optimal_reparam_dp(q0, q1, grid)
        brute = reparam.brute_force_reparam(q0, q1, grid)
        worst = max(worst, abs(dp.cost - brute.cost))
    return worst


def _dp_recovery(rng: np.random.Generator, trials: int) -> float:
    worst = 0.0
    grid = reparam.default_grid(16, 4)
    for _ in range(trials):
        c = cv.random_curve(rng, 5, 2)
        nodes = [(0, 0), (2, 4), (4, 8), (8, 10), (12, 12), (16, 16)]
        phi = cv.Reparameterization(*(np.array(nodes, dtype=float).T / 16))
        worst = max(worst, reparam.shape_distance(c, cv.reparameterize(c, phi), grid))
    return worst


CHECKS: List = [
    ('signature closed form', _closed_form, 1e-12),
    ('chen identity', _chen, 1e-12),
    ('reversal inverse', _reversal, 1e-12),
    ('shuffle identities', _shuffle, 1e-10),
    ('signature reparameterization invariance', _signature_invariance, 1e-10),
    ('srv equivariance', _srv_equivariance, 1e-12),
    ('srv right-translation invariance', _srv_translation, 1e-12),
    ('dp matches exhaustive search', _dp_optimality, 1e-12),
    ('dp recovers grid warps', _dp_recovery, 1e-8),
]


def run_selftest(seed: int = 0, trials: int = 10,
                 progress: Optional[Callable[[CheckResult], None]] = None) -> List[CheckResult]:
    """Run every check with its own seeded generator."""
    results = []
    for k, (name, check, tol) in enumerate(CHECKS):
        rng = np.random.default_rng([seed, k])
        start = time.perf_counter()
        try:
            worst = float(check(rng, trials))
        except Exception as e:
            logger.error(f"Check {name!r} raised {type(e).__name__}: {e}")
            worst = float('inf')
        result = CheckResult(name, worst, tol, time.perf_counter() - start)
        logger.info(f"{name}: worst {result.worst:.3e} (tol {tol:g}) -> {'ok' if result.passed else 'FAIL'}")
        results.append(result)
        if progress is not None:
            progress(result)
    return results
