"""
Distance matrices over curve collections, classical MDS, leave-one-out
nearest-neighbour accuracy, silhouette scores and method timing.
"""

import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
from sklearn.metrics import silhouette_score

from sigshape.core import curve as cv
from sigshape.core import reparam, signature, srvt
from sigshape.core.errors import (DataError, DegenerateClass, InvalidParameter, JointCountMismatch,
                                  LabelMismatch, PairComputationError, SigShapeError, TooFewPoints)
from sigshape.core.file_handler import FileHandler
from sigshape.core.tensor import DEFAULT_LEVEL, MAX_LEVEL

logger = logging.getLogger('SigShape.analysis')

SYMMETRY_TOL = 1e-12


class Method(str, Enum):
    SRVT = 'srvt'
    SRVT_DP = 'srvt_dp'
    SIGNATURE = 'signature'

    @classmethod
    def parse(cls, value) -> 'Method':
        if isinstance(value, Method):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            choices = ', '.join(m.value for m in cls)
            raise InvalidParameter(f"unknown method {value!r} (choose from {choices})") from None


@dataclass(frozen=True)
class DistanceParams:
    level: int = DEFAULT_LEVEL
    grid: int = reparam.DEFAULT_GRID_SIZE
    max_step: int = reparam.DEFAULT_MAX_STEP
    penalty: float = 0.0
    symmetric: bool = True
    per_joint: bool = False
    joint_weights: Optional[Sequence[float]] = None
    level_weights: Optional[Sequence[float]] = None

    def validate(self, method: Method) -> 'DistanceParams':
        if method is Method.SIGNATURE and not 1 <= self.level <= MAX_LEVEL:
            raise InvalidParameter(f"--level must be in 1..{MAX_LEVEL}, got {self.level}")
        if method is Method.SRVT_DP:
            if self.grid < 2:
                raise InvalidParameter(f"--grid must be at least 2, got {self.grid}")
            if self.max_step < 1:
                raise InvalidParameter(f"--max-step must be at least 1, got {self.max_step}")
            if self.penalty < 0:
                raise InvalidParameter(f"--penalty must be non-negative, got {self.penalty}")
        return self

    def dp_grid(self) -> reparam.DPGrid:
        return reparam.default_grid(self.grid, self.max_step)

    def for_method(self, method: Method) -> Dict[str, object]:
        """The parameters that influence the given method, for metadata."""
        data = asdict(self)
        keys = {
            Method.SRVT: ('joint_weights',),
            Method.SRVT_DP: ('grid', 'max_step', 'penalty', 'symmetric', 'joint_weights'),
            Method.SIGNATURE: ('level', 'per_joint', 'level_weights'),
        }[method]
        return {k: (list(data[k]) if isinstance(data[k], (list, tuple)) else data[k]) for k in keys}


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    values: np.ndarray
    ids: Sequence[str]
    method: Optional[Method] = None
    build_seconds: float = 0.0
    params: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        d = np.array(self.values, dtype=float)
        ids = tuple(str(i) for i in self.ids)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise DataError(f"distance matrix must be square, got shape {d.shape}")
        if len(ids) != d.shape[0]:
            raise LabelMismatch(f"{len(ids)} ids for a {d.shape[0]}x{d.shape[0]} matrix")
        if not np.all(np.isfinite(d)):
            raise DataError("distance matrix has non-finite entries")
        if np.any(d < 0):
            raise DataError("distance matrix has negative entries")
        if np.any(np.diag(d) != 0):
            raise DataError("distance matrix must have a zero diagonal")
        if np.max(np.abs(d - d.T), initial=0.0) > SYMMETRY_TOL:
            raise DataError("distance matrix is not symmetric")
        d.setflags(write=False)
        object.__setattr__(self, 'values', d)
        object.__setattr__(self, 'ids', ids)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def to_rows(self) -> List[List[str]]:
        rows = [[''] + list(self.ids)]
        for name, row in zip(self.ids, self.values):
            rows.append([name] + [repr(float(x)) for x in row])
        return rows

    def to_csv(self, path: str):
        FileHandler().write_csv(path, self.to_rows())

    @classmethod
    def from_csv(cls, path: str) -> 'DistanceMatrix':
        rows = FileHandler().read_csv(path)
        if not rows:
            raise DataError("empty distance file", path)
        (_, header), body = rows[0], rows[1:]
        ids = header[1:]
        values = []
        for line, row in body:
            if len(row) != len(ids) + 1:
                raise DataError(f"expected {len(ids) + 1} fields, got {len(row)}", path, line)
            try:
                values.append([float(x) for x in row[1:]])
            except ValueError:
                raise DataError("non-numeric distance", path, line) from None
            if row[0] != ids[len(values) - 1]:
                raise LabelMismatch(f"row id {row[0]!r} does not match column id {ids[len(values) - 1]!r}",
                                    path, line)
        if len(values) != len(ids):
            raise DataError(f"expected {len(ids)} rows, got {len(values)}", path)
        try:
            return cls(np.array(values).reshape(len(ids), len(ids)), ids)
        except DataError as e:
            raise e.with_location(path)

    def to_dict(self) -> Dict[str, object]:
        return {
            'ids': list(self.ids),
            'method': self.method.value if self.method else None,
            'distances': self.values.tolist(),
        }

    def to_json(self, path: str):
        FileHandler().write_json(path, self.to_dict())


@dataclass(frozen=True, eq=False)
class Embedding:
    """Low-dimensional coordinates plus the full eigenvalue spectrum (descending)."""

    coords: np.ndarray
    eigenvalues: np.ndarray
    ids: Sequence[str] = ()

    @property
    def negative_mass(self) -> float:
        """Share of the spectrum's absolute mass carried by negative eigenvalues."""
        total = float(np.sum(np.abs(self.eigenvalues)))
        if total == 0.0:
            return 0.0
        return float(np.sum(np.abs(self.eigenvalues[self.eigenvalues < 0])) / total)


# --- distance matrices ----------------------------------------------------

def _preparer(method: Method, params: DistanceParams) -> Callable[[cv.PiecewiseGeodesicCurve], object]:
    if method is Method.SIGNATURE:
        return lambda c: signature.log_signature_features(c, params.level, params.per_joint,
                                                          params.level_weights)
    return lambda c: srvt.srv_transform(cv.normalize_to_identity(c), params.joint_weights)


def _pair_distance(method: Method, params: DistanceParams) -> Callable[[object, object], float]:
    if method is Method.SIGNATURE:
        return signature.d_sig_features
    if method is Method.SRVT:
        return srvt.l2_distance
    grid = params.dp_grid()
    return lambda q0, q1: reparam.srv_shape_distance(q0, q1, grid, params.penalty, params.symmetric)


def default_workers() -> int:
    return os.cpu_count() or 1


def distance_matrix(curves: Sequence[cv.PiecewiseGeodesicCurve], method, params: Optional[DistanceParams] = None,
                    ids: Optional[Sequence[str]] = None, parallel: bool = True,
                    workers: Optional[int] = None) -> DistanceMatrix:
    """
    Pairwise distances between curves.

    Per-curve work (SRV transforms, log-signature features) happens once;
    the diagonal is never computed. With parallel the upper-triangle cells
    are spread over a thread pool.

    Args:
        curves: Curves with a common joint count
        method: srvt | srvt_dp | signature
        params (DistanceParams): Method parameters
        ids: Clip ids, defaulting to c0, c1, ...
        parallel (bool): Compute cells on a thread pool
        workers (int): Pool size, defaulting to the CPU count

    Returns:
        DistanceMatrix: Symmetric matrix with build time
    """
    method = Method.parse(method)
    params = (params or DistanceParams()).validate(method)
    n = len(curves)
    if n < 2:
        raise TooFewPoints(f"need at least 2 curves, got {n}")
    ids = [str(i) for i in ids] if ids is not None else [f'c{i}' for i in range(n)]
    if len(ids) != n:
        raise LabelMismatch(f"{len(ids)} ids for {n} curves")
    for i, c in enumerate(curves):
        if c.d != curves[0].d:
            raise JointCountMismatch(f"curve {ids[i]!r} has {c.d} joints, expected {curves[0].d}")

    start = time.perf_counter()
    prepare = _preparer(method, params)
    prepared = []
    for i, c in enumerate(curves):
        try:
            prepared.append(prepare(c))
        except SigShapeError as e:
            raise PairComputationError(i, i, ids[i], ids[i], e) from e

    distance = _pair_distance(method, params)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]

    def cell(pair):
        i, j = pair
        try:
            return distance(prepared[i], prepared[j])
        except SigShapeError as e:
            raise PairComputationError(i, j, ids[i], ids[j], e) from e

    values = np.zeros((n, n))
    if parallel and len(pairs) > 1:
        with ThreadPoolExecutor(max_workers=workers or default_workers()) as pool:
            results = list(pool.map(cell, pairs))
    else:
        results = [cell(p) for p in pairs]
    for (i, j), value in zip(pairs, results):
        values[i, j] = values[j, i] = value
    elapsed = time.perf_counter() - start

    logger.info(f"Built {n}x{n} {method.value} distance matrix in {elapsed:.3f}s")
    return DistanceMatrix(values, ids, method, elapsed, params.for_method(method))


# --- embedding and statistics ---------------------------------------------

def classical_mds(dm: DistanceMatrix, dim: int = 2) -> Embedding:
    """Torgerson MDS: top eigenpairs of -1/2 J D^2 J, negative eigenvalues clamped to zero."""
    n = dm.n
    if dim < 1:
        raise InvalidParameter(f"embedding dimension must be positive, got {dim}")
    if n < dim + 1:
        raise TooFewPoints(f"need at least {dim + 1} points for a {dim}-d embedding, got {n}")
    j = np.eye(n) - np.ones((n, n)) / n
    b = -0.5 * j @ (dm.values ** 2) @ j
    b = 0.5 * (b + b.T)
    evals, evecs = np.linalg.eigh(b)
    order = np.argsort(evals)[::-1]
    evals, evecs = evals[order], evecs[:, order]

    coords = evecs[:, :dim] * np.sqrt(np.clip(evals[:dim], 0.0, None))
    coords -= coords.mean(axis=0)
    for axis in range(dim):
        nonzero = np.flatnonzero(np.abs(coords[:, axis]) > 1e-12)
        if nonzero.size and coords[nonzero[0], axis] < 0:
            coords[:, axis] = -coords[:, axis]
    embedding = Embedding(coords, evals, dm.ids)
    if embedding.negative_mass > 0:
        logger.info(f"MDS spectrum has negative mass {embedding.negative_mass:.3g}")
    return embedding


def _check_labels(dm: DistanceMatrix, labels: Sequence) -> List:
    labels = list(labels)
    if len(labels) != dm.n:
        raise LabelMismatch(f"{len(labels)} labels for {dm.n} clips")
    return labels


def loo_knn_accuracy(dm: DistanceMatrix, labels: Sequence, k: int = 1) -> float:
    """Leave-one-out k-NN accuracy.

    Neighbours are ordered by distance then index; a tied vote goes to the
    label whose first neighbour comes earliest in that order.
    """
    labels = _check_labels(dm, labels)
    if k < 1:
        raise InvalidParameter(f"k must be at least 1, got {k}")
    n = dm.n
    if n < 2:
        raise TooFewPoints("leave-one-out needs at least 2 clips")
    k = min(k, n - 1)
    correct = 0
    for i in range(n):
        others = np.array([m for m in range(n) if m != i])
        order = others[np.argsort(dm.values[i, others], kind='stable')][:k]
        votes: Dict[object, int] = {}
        for m in order:
            votes[labels[m]] = votes.get(labels[m], 0) + 1
        best = max(votes.values())
        prediction = next(labels[m] for m in order if votes[labels[m]] == best)
        correct += prediction == labels[i]
    return correct / n


def silhouette(dm: DistanceMatrix, labels: Sequence) -> float:
    labels = _check_labels(dm, labels)
    # codes by first appearance; 1 and '1' stay distinct classes
    codes: Dict[object, int] = {}
    encoded = np.array([codes.setdefault(x, len(codes)) for x in labels])
    classes = list(codes)
    if len(classes) < 2:
        raise DegenerateClass(f"silhouette needs at least 2 classes, got {len(classes)}")
    counts = np.bincount(encoded)
    if np.any(counts < 2):
        small = ', '.join(str(classes[c]) for c in np.flatnonzero(counts < 2))
        raise DegenerateClass(f"every class needs at least 2 members ({small})")
    return float(silhouette_score(dm.values, encoded, metric='precomputed'))


# --- timing -----------------------------------------------------------------

@dataclass
class BenchResult:
    seconds: Dict[str, float]
    n_curves: int

    @property
    def ratio(self) -> Optional[float]:
        """srvt_dp time over signature time, when both ran."""
        dp = self.seconds.get(Method.SRVT_DP.value)
        sig = self.seconds.get(Method.SIGNATURE.value)
        if dp is None or not sig:
            return None
        return dp / sig


def time_methods(curves: Sequence[cv.PiecewiseGeodesicCurve], methods: Sequence,
                 params: Optional[DistanceParams] = None) -> BenchResult:
    """Wall time of a full matrix per method, single-threaded."""
    seconds = {}
    for m in methods:
        m = Method.parse(m)
        dm = distance_matrix(curves, m, params, parallel=False)
        seconds[m.value] = dm.build_seconds
        logger.info(f"Timed {m.value}: {dm.build_seconds:.3f}s for {len(curves)} curves")
    return BenchResult(seconds, len(curves))
