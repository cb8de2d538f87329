"""
Dynamic-programming search for the optimal reparameterization.

The interval [0, 1] is cut into M cells. A lattice edge (k, l) -> (i, j)
stands for the linear map phi from [k/M, i/M] onto [l/M, j/M]; its energy is

    int_{k/M}^{i/M} |q0(t) - q1(phi(t)) sqrt(phi')|^2 dt
        + penalty * sum_{k < m <= i} |phi(m/M) - m/M|^2

computed exactly by walking the merged breakpoints of q0 and of the pulled
back q1. The table A[i, j] holds the cheapest monotone path from (0, 0);
d_{S*} is the square root of the integral part along the path ending at (M, M).
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from sigshape.core import curve as cv
from sigshape.core import srvt
from sigshape.core.errors import DimensionMismatch, GridTooCoarse, InvalidParameter

logger = logging.getLogger('SigShape.reparam')

try:
    from numba import njit
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False
    logger.warning("numba not available - DP alignment runs in pure Python (slow)")

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]):
            return args[0]
        return lambda f: f

# nogil lets pair-parallel distance matrices run DP tables on threads
jitkw = {
    "nogil": True,
    "cache": False,
    "fastmath": False,
}

DEFAULT_GRID_SIZE = 64
DEFAULT_MAX_STEP = 4


@dataclass(frozen=True)
class DPGrid:
    size: int = DEFAULT_GRID_SIZE
    steps: Tuple[Tuple[int, int], ...] = field(default_factory=lambda: default_steps(DEFAULT_MAX_STEP))

    def __post_init__(self):
        if int(self.size) < 2:
            raise GridTooCoarse(f"grid size must be at least 2, got {self.size}")
        steps = tuple((int(a), int(b)) for a, b in self.steps)
        if not steps:
            raise InvalidParameter("step set must not be empty")
        if any(a < 1 or b < 1 for a, b in steps):
            raise InvalidParameter(f"every step must advance both coordinates: {steps}")
        object.__setattr__(self, 'size', int(self.size))
        object.__setattr__(self, 'steps', tuple(sorted(set(steps))))

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.size + 1)

    def step_array(self) -> np.ndarray:
        """Steps ordered so predecessors come in increasing lexicographic (k, l)."""
        ordered = sorted(self.steps, key=lambda st: (-st[0], -st[1]))
        return np.array(ordered, dtype=np.int64).reshape(-1, 2)


def default_steps(max_step: int) -> Tuple[Tuple[int, int], ...]:
    if max_step < 1:
        raise InvalidParameter(f"max step must be at least 1, got {max_step}")
    return tuple((a, b) for a in range(1, max_step + 1) for b in range(1, max_step + 1))


def default_grid(size: int = DEFAULT_GRID_SIZE, max_step: int = DEFAULT_MAX_STEP) -> DPGrid:
    return DPGrid(size, default_steps(max_step))


@dataclass(frozen=True, eq=False)
class AlignmentResult:
    reparam: cv.Reparameterization
    distance: float
    cost: float
    path: Tuple[Tuple[int, int], ...]


@njit(**jitkw)
def _edge_integral(t0, v0, t1, v1, a, b, c, d):
    s = (d - c) / (b - a)
    rs = np.sqrt(s)
    n0 = v0.shape[0]
    n1 = v1.shape[0]
    dim = v0.shape[1]
    i = np.searchsorted(t0, a, side='right') - 1
    j = np.searchsorted(t1, c, side='right') - 1
    i = min(max(i, 0), n0 - 1)
    j = min(max(j, 0), n1 - 1)

    total = 0.0
    t = a
    while t < b:
        nxt0 = b
        if i < n0 - 1:
            nxt0 = min(t0[i + 1], b)
        nxt1 = b
        if j < n1 - 1:
            nxt1 = min(a + (t1[j + 1] - c) / s, b)
        nxt = min(nxt0, nxt1)
        if nxt > t:
            acc = 0.0
            for p in range(dim):
                diff = v0[i, p] - rs * v1[j, p]
                acc += diff * diff
            total += (nxt - t) * acc
        if i < n0 - 1 and nxt0 <= nxt:
            i += 1
        if j < n1 - 1 and nxt1 <= nxt:
            j += 1
        if nxt >= b:
            break
        t = nxt
    return total


@njit(**jitkw)
def _edge_penalty(k, l, i, j, m):
    s = (j - l) / (i - k)
    total = 0.0
    for n in range(k + 1, i + 1):
        gap = (l + s * (n - k) - n) / m
        total += gap * gap
    return total


@njit(**jitkw)
def _edge_energy(t0, v0, t1, v1, k, l, i, j, m, penalty):
    e = _edge_integral(t0, v0, t1, v1, k / m, i / m, l / m, j / m)
    if penalty > 0.0:
        e += penalty * _edge_penalty(k, l, i, j, m)
    return e


@njit(**jitkw)
def _dp_table(t0, v0, t1, v1, m, steps, penalty):
    table = np.full((m + 1, m + 1), np.inf)
    pred = np.full((m + 1, m + 1, 2), -1, dtype=np.int64)
    table[0, 0] = 0.0
    n_steps = steps.shape[0]
    for i in range(1, m + 1):
        for j in range(1, m + 1):
            best = np.inf
            bk = -1
            bl = -1
            for p in range(n_steps):
                k = i - steps[p, 0]
                l = j - steps[p, 1]
                if k < 0 or l < 0:
                    continue
                base = table[k, l]
                if base == np.inf:
                    continue
                cost = base + _edge_energy(t0, v0, t1, v1, k, l, i, j, m, penalty)
                if cost < best:
                    best = cost
                    bk = k
                    bl = l
            table[i, j] = best
            pred[i, j, 0] = bk
            pred[i, j, 1] = bl
    return table, pred


def _arrays(q: srvt.SRVRepresentation):
    return np.ascontiguousarray(q.times), np.ascontiguousarray(q.values)


def edge_energy(q0: srvt.SRVRepresentation, q1: srvt.SRVRepresentation,
                k: int, l: int, i: int, j: int, m: int, penalty: float = 0.0) -> float:
    """Exact energy of the lattice edge (k, l) -> (i, j) on an m-cell grid."""
    t0, v0 = _arrays(q0)
    t1, v1 = _arrays(q1)
    return float(_edge_energy(t0, v0, t1, v1, k, l, i, j, float(m), float(penalty)))


def _path_to_result(q0, q1, grid: DPGrid, path: List[Tuple[int, int]], cost: float) -> AlignmentResult:
    m = grid.size
    t0, v0 = _arrays(q0)
    t1, v1 = _arrays(q1)
    integral = 0.0
    for (k, l), (i, j) in zip(path[:-1], path[1:]):
        integral += _edge_integral(t0, v0, t1, v1, k / m, i / m, l / m, j / m)
    nodes = np.array(path, dtype=float) / m
    phi = cv.Reparameterization(nodes[:, 0], nodes[:, 1])
    return AlignmentResult(phi, float(np.sqrt(max(integral, 0.0))), float(cost), tuple(path))


def optimal_reparam_dp(q0: srvt.SRVRepresentation, q1: srvt.SRVRepresentation,
                       grid: Optional[DPGrid] = None, penalty: float = 0.0) -> AlignmentResult:
    """Minimize over monotone lattice paths; phi maps q0's time onto q1's time.

    Ties keep the predecessor with the smallest (k, l).
    """
    grid = grid or DPGrid()
    if q0.dim != q1.dim:
        raise DimensionMismatch(f"representations live in R^{q0.dim} and R^{q1.dim}")
    if penalty < 0:
        raise InvalidParameter(f"penalty must be non-negative, got {penalty}")
    m = grid.size
    t0, v0 = _arrays(q0)
    t1, v1 = _arrays(q1)
    table, pred = _dp_table(t0, v0, t1, v1, m, grid.step_array(), float(penalty))
    if not np.isfinite(table[m, m]):
        raise GridTooCoarse(f"no step path reaches ({m}, {m}) with steps {grid.steps}")

    path = [(m, m)]
    i, j = m, m
    while (i, j) != (0, 0):
        i, j = int(pred[i, j, 0]), int(pred[i, j, 1])
        path.append((i, j))
    path.reverse()
    result = _path_to_result(q0, q1, grid, path, table[m, m])
    logger.debug("DP alignment on %d cells: distance %.6g over %d edges", m, result.distance, len(path) - 1)
    return result


def brute_force_reparam(q0: srvt.SRVRepresentation, q1: srvt.SRVRepresentation,
                        grid: DPGrid, penalty: float = 0.0) -> AlignmentResult:
    """Exhaustive search over every monotone step path; only for tiny grids."""
    m = grid.size
    if m > 8:
        raise InvalidParameter(f"brute force is limited to grids with at most 8 cells, got {m}")
    t0, v0 = _arrays(q0)
    t1, v1 = _arrays(q1)
    steps = [tuple(int(x) for x in st) for st in grid.step_array()]
    best_cost = np.inf
    best_path: Optional[List[Tuple[int, int]]] = None

    def walk(node, acc, path):
        nonlocal best_cost, best_path
        if node == (m, m):
            if acc < best_cost:
                best_cost, best_path = acc, list(path)
            return
        k, l = node
        for di, dj in steps:
            i, j = k + di, l + dj
            if i > m or j > m:
                continue
            e = float(_edge_energy(t0, v0, t1, v1, k, l, i, j, float(m), float(penalty)))
            path.append((i, j))
            walk((i, j), acc + e, path)
            path.pop()

    walk((0, 0), 0.0, [(0, 0)])
    if best_path is None:
        raise GridTooCoarse(f"no step path reaches ({m}, {m}) with steps {grid.steps}")
    return _path_to_result(q0, q1, grid, best_path, best_cost)


def shape_distance(c0: cv.PiecewiseGeodesicCurve, c1: cv.PiecewiseGeodesicCurve,
                   grid: Optional[DPGrid] = None, penalty: float = 0.0, symmetric: bool = True,
                   joint_weights: Optional[Sequence[float]] = None) -> float:
    """d_{S*}: normalize to P*, transform, align; min over both argument orders when symmetric."""
    q0 = srvt.srv_transform(cv.normalize_to_identity(c0), joint_weights)
    q1 = srvt.srv_transform(cv.normalize_to_identity(c1), joint_weights)
    return srv_shape_distance(q0, q1, grid, penalty, symmetric)


def srv_shape_distance(q0: srvt.SRVRepresentation, q1: srvt.SRVRepresentation,
                       grid: Optional[DPGrid] = None, penalty: float = 0.0,
                       symmetric: bool = True) -> float:
    forward = optimal_reparam_dp(q0, q1, grid, penalty).distance
    if not symmetric:
        return forward
    return min(forward, optimal_reparam_dp(q1, q0, grid, penalty).distance)
