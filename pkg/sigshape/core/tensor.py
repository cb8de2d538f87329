"""
Truncated tensor algebra T^N(R^D).

Level n is a dense float array of D**n coefficients in row-major word order,
so the word i1..in (letters 1..D) sits at index sum (i_j - 1) D**(n - j).
The concatenation product of level p and level q is then the flattened outer
product, which keeps every operation a handful of numpy calls.
"""

import logging
from dataclasses import dataclass
from itertools import product as cartesian
from math import factorial
from typing import Iterable, Mapping, Optional, Sequence, Tuple

import numpy as np

from sigshape.core.errors import (
    BadScalarPart,
    InvalidParameter,
    NonzeroScalarPart,
    ShapeMismatch,
    TensorTooLarge,
    WordTooLong,
)

logger = logging.getLogger('SigShape.tensor')

MAX_LEVEL = 6
DEFAULT_LEVEL = 3
COEFFICIENT_CAP = 10 ** 7
_SCALAR_TOL = 1e-12

Word = Tuple[int, ...]


def total_size(dim: int, level: int) -> int:
    """Number of coefficients of levels 0..level."""
    return sum(dim ** n for n in range(level + 1))


def check_size(dim: int, level: int, cap: int = COEFFICIENT_CAP):
    if dim < 1:
        raise InvalidParameter(f"alphabet size must be positive, got {dim}")
    if not 1 <= level <= MAX_LEVEL:
        raise InvalidParameter(f"truncation level must be in 1..{MAX_LEVEL}, got {level}")
    size = total_size(dim, level)
    if size > cap:
        raise TensorTooLarge(f"T^{level}(R^{dim}) holds {size} coefficients, above the cap of {cap}")


def word_index(word: Sequence[int], dim: int) -> int:
    idx = 0
    for letter in word:
        if not 1 <= letter <= dim:
            raise InvalidParameter(f"letter {letter} outside 1..{dim}")
        idx = idx * dim + (letter - 1)
    return idx


@dataclass(frozen=True, eq=False)
class TruncatedTensor:
    dim: int
    level: int
    levels: Tuple[np.ndarray, ...]

    def __post_init__(self):
        if len(self.levels) != self.level + 1:
            raise ShapeMismatch(f"expected {self.level + 1} levels, got {len(self.levels)}")
        frozen = []
        for n, arr in enumerate(self.levels):
            arr = np.array(arr, dtype=float).reshape(-1)
            if arr.size != self.dim ** n:
                raise ShapeMismatch(f"level {n} must hold {self.dim ** n} coefficients, got {arr.size}")
            arr.setflags(write=False)
            frozen.append(arr)
        object.__setattr__(self, 'levels', tuple(frozen))

    # --- constructors ---------------------------------------------------

    @classmethod
    def zero(cls, dim: int, level: int) -> 'TruncatedTensor':
        check_size(dim, level)
        return cls(dim, level, tuple(np.zeros(dim ** n) for n in range(level + 1)))

    @classmethod
    def unit(cls, dim: int, level: int) -> 'TruncatedTensor':
        check_size(dim, level)
        levels = [np.zeros(dim ** n) for n in range(level + 1)]
        levels[0][0] = 1.0
        return cls(dim, level, tuple(levels))

    @classmethod
    def from_level1(cls, vector: Sequence[float], level: int) -> 'TruncatedTensor':
        v = np.asarray(vector, dtype=float).reshape(-1)
        check_size(v.size, level)
        levels = [np.zeros(v.size ** n) for n in range(level + 1)]
        levels[1] = v.copy()
        return cls(v.size, level, tuple(levels))

    @classmethod
    def from_words(cls, dim: int, level: int, coefficients: Mapping[Word, float]) -> 'TruncatedTensor':
        check_size(dim, level)
        levels = [np.zeros(dim ** n) for n in range(level + 1)]
        for word, value in coefficients.items():
            word = tuple(word)
            if len(word) > level:
                raise WordTooLong(f"word {word} is longer than the truncation level {level}")
            levels[len(word)][word_index(word, dim)] = float(value)
        return cls(dim, level, tuple(levels))

    @classmethod
    def from_flat(cls, dim: int, level: int, flat: np.ndarray) -> 'TruncatedTensor':
        flat = np.asarray(flat, dtype=float).reshape(-1)
        if flat.size != total_size(dim, level):
            raise ShapeMismatch(f"expected {total_size(dim, level)} coefficients, got {flat.size}")
        bounds = np.cumsum([0] + [dim ** n for n in range(level + 1)])
        return cls(dim, level, tuple(flat[a:b] for a, b in zip(bounds[:-1], bounds[1:])))

    # --- accessors ------------------------------------------------------

    @property
    def scalar(self) -> float:
        return float(self.levels[0][0])

    def flat(self, include_scalar: bool = True) -> np.ndarray:
        start = 0 if include_scalar else 1
        return np.concatenate(self.levels[start:])

    def coefficient(self, word: Sequence[int]) -> float:
        word = tuple(word)
        if len(word) > self.level:
            raise WordTooLong(f"word {word} is longer than the truncation level {self.level}")
        return float(self.levels[len(word)][word_index(word, self.dim)])

    def norm(self, include_scalar: bool = False, level_weights: Optional[Sequence[float]] = None) -> float:
        """Euclidean norm over levels 1..N (optionally level 0), with optional per-level scaling."""
        weights = _level_weights(level_weights, self.level)
        total = self.levels[0][0] ** 2 if include_scalar else 0.0
        for n in range(1, self.level + 1):
            total += (weights[n - 1] ** 2) * float(self.levels[n] @ self.levels[n])
        return float(np.sqrt(total))

    # --- arithmetic -----------------------------------------------------

    def _check(self, other: 'TruncatedTensor'):
        if not isinstance(other, TruncatedTensor):
            raise ShapeMismatch(f"cannot combine a tensor with {type(other).__name__}")
        if (self.dim, self.level) != (other.dim, other.level):
            raise ShapeMismatch(
                f"tensors live in T^{self.level}(R^{self.dim}) and T^{other.level}(R^{other.dim})"
            )

    def __add__(self, other: 'TruncatedTensor') -> 'TruncatedTensor':
        self._check(other)
        return TruncatedTensor(self.dim, self.level, tuple(a + b for a, b in zip(self.levels, other.levels)))

    def __sub__(self, other: 'TruncatedTensor') -> 'TruncatedTensor':
        self._check(other)
        return TruncatedTensor(self.dim, self.level, tuple(a - b for a, b in zip(self.levels, other.levels)))

    def __neg__(self) -> 'TruncatedTensor':
        return self.scale(-1.0)

    def __mul__(self, factor: float) -> 'TruncatedTensor':
        return self.scale(factor)

    __rmul__ = __mul__

    def __matmul__(self, other: 'TruncatedTensor') -> 'TruncatedTensor':
        return truncated_product(self, other)

    def scale(self, factor: float) -> 'TruncatedTensor':
        return TruncatedTensor(self.dim, self.level, tuple(float(factor) * a for a in self.levels))

    def with_scalar(self, value: float) -> 'TruncatedTensor':
        levels = list(self.levels)
        levels[0] = np.array([float(value)])
        return TruncatedTensor(self.dim, self.level, tuple(levels))

    def antipode(self) -> 'TruncatedTensor':
        """Coefficient at w becomes (-1)^|w| times the one at reversed w; inverts group-like elements."""
        levels = []
        for n, arr in enumerate(self.levels):
            if n < 2:
                levels.append(arr * (-1.0) ** n)
                continue
            cube = arr.reshape((self.dim,) * n)
            levels.append(((-1.0) ** n) * cube.transpose(tuple(range(n - 1, -1, -1))).reshape(-1))
        return TruncatedTensor(self.dim, self.level, tuple(levels))

    def max_abs_difference(self, other: 'TruncatedTensor') -> float:
        self._check(other)
        return float(np.max(np.abs(self.flat() - other.flat())))


def _level_weights(weights: Optional[Sequence[float]], level: int) -> np.ndarray:
    if weights is None:
        return np.ones(level)
    w = np.asarray(weights, dtype=float).reshape(-1)
    if w.size < level or np.any(w < 0) or not np.all(np.isfinite(w)):
        raise InvalidParameter(f"need {level} non-negative level weights, got {list(w)}")
    return w[:level]


def truncated_product(a: TruncatedTensor, b: TruncatedTensor) -> TruncatedTensor:
    """(a b)_w = sum over splits w = uv of a_u b_v, truncated at level N."""
    a._check(b)
    levels = []
    for n in range(a.level + 1):
        acc = np.zeros(a.dim ** n)
        for p in range(n + 1):
            left = a.levels[p]
            right = b.levels[n - p]
            if not left.any() or not right.any():
                continue
            acc += np.outer(left, right).ravel()
        levels.append(acc)
    return TruncatedTensor(a.dim, a.level, tuple(levels))


def lie_bracket(a: TruncatedTensor, b: TruncatedTensor) -> TruncatedTensor:
    return truncated_product(a, b) - truncated_product(b, a)


def _check_primitive(x: TruncatedTensor):
    if abs(x.scalar) > _SCALAR_TOL:
        raise NonzeroScalarPart(f"exponential needs a zero scalar part, got {x.scalar!r}")


def tensor_exp(x: TruncatedTensor) -> TruncatedTensor:
    """sum_{n<=N} x^n / n!, evaluated by Horner's scheme."""
    _check_primitive(x)
    if not any(arr.any() for arr in x.levels[2:]):
        return _exp_level1(x.levels[1], x.level)
    unit = TruncatedTensor.unit(x.dim, x.level)
    result = unit
    for n in range(x.level, 0, -1):
        result = unit + truncated_product(x, result).scale(1.0 / n)
    return result


def _exp_level1(v: np.ndarray, level: int) -> TruncatedTensor:
    """exp of a level-one element: level n is v^(kron n) / n!."""
    dim = v.size
    levels = [np.ones(1)]
    power = np.ones(1)
    for n in range(1, level + 1):
        power = np.kron(power, v)
        levels.append(power / factorial(n))
    return TruncatedTensor(dim, level, tuple(levels))


def tensor_log(g: TruncatedTensor) -> TruncatedTensor:
    """sum_{n=1}^{N} (-1)^(n+1) (g - 1)^n / n."""
    if abs(g.scalar - 1.0) > _SCALAR_TOL:
        raise BadScalarPart(f"logarithm needs scalar part 1, got {g.scalar!r}")
    x = g.with_scalar(0.0)
    # Horner on x (c_1 + x (c_2 + ... )) with c_n = (-1)^(n+1)/n
    result = TruncatedTensor.zero(g.dim, g.level)
    unit = TruncatedTensor.unit(g.dim, g.level)
    for n in range(g.level, 0, -1):
        coeff = ((-1.0) ** (n + 1)) / n
        result = truncated_product(x, unit.scale(coeff) + result)
    return result


def shuffle_check(g: TruncatedTensor) -> float:
    """Largest violation of the letter-letter and (for N >= 3) letter-word shuffle identities."""
    if g.level < 2:
        return 0.0
    d = g.dim
    lvl1 = g.levels[1]
    lvl2 = g.levels[2].reshape(d, d)
    # <g,i><g,j> = <g,ij> + <g,ji>
    worst = float(np.max(np.abs(np.outer(lvl1, lvl1) - lvl2 - lvl2.T)))
    if g.level >= 3:
        lvl3 = g.levels[3].reshape(d, d, d)
        # e_i shuffle e_jk = e_ijk + e_jik + e_jki
        lhs = lvl1[:, None, None] * lvl2[None, :, :]
        rhs = lvl3 + lvl3.transpose(1, 0, 2) + lvl3.transpose(2, 0, 1)
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst


def words(dim: int, length: int) -> Iterable[Word]:
    """All words of a given length in index order."""
    return cartesian(range(1, dim + 1), repeat=length)
