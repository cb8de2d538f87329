# Exception hierarchy for SigShape
from typing import Optional


class SigShapeError(Exception):
    """Base class for every error raised by the package."""

    exit_code = 2


class UsageError(SigShapeError, ValueError):
    """Bad arguments, options or configuration."""

    exit_code = 1


class DataError(SigShapeError, ValueError):
    """Malformed or inconsistent input data."""

    exit_code = 2

    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None):
        self.message = message
        self.path = path
        self.line = line
        super().__init__(message)

    def with_location(self, path: Optional[str] = None, line: Optional[int] = None) -> 'DataError':
        """Attach a file/line location unless one is already set."""
        if self.path is None:
            self.path = path
        if self.line is None:
            self.line = line
        return self

    def __str__(self) -> str:
        if self.path and self.line is not None:
            return f"{self.path}:{self.line}: {self.message}"
        if self.path:
            return f"{self.path}: {self.message}"
        if self.line is not None:
            return f"line {self.line}: {self.message}"
        return self.message


class NumericalError(SigShapeError, ArithmeticError):
    """A computation left its numerically valid domain."""

    exit_code = 3


# lie / curve
class AngleAtPi(NumericalError):
    pass


class JointCountMismatch(DataError):
    pass


class TooFewFrames(DataError):
    pass


class NonMonotoneTimes(DataError):
    pass


class OutOfDomain(UsageError):
    pass


class NonMonotone(DataError):
    pass


# srvt / reparam
class NotImmersed(NumericalError):
    pass


class DimensionMismatch(DataError):
    pass


class GridTooCoarse(UsageError):
    pass


# tensor / signature
class ShapeMismatch(DataError):
    pass


class NonzeroScalarPart(NumericalError):
    pass


class BadScalarPart(NumericalError):
    pass


class WordTooLong(UsageError):
    pass


class TensorTooLarge(UsageError):
    pass


class BadInterval(UsageError):
    pass


class NonAdjacentIntervals(DataError):
    pass


class ZeroLogSignature(NumericalError):
    pass


# mocap
class MissingSection(DataError):
    pass


class UnknownDof(DataError):
    pass


class DanglingParent(DataError):
    pass


class DofCountMismatch(DataError):
    pass


class UnknownJoint(DataError):
    pass


class NonContiguousFrames(DataError):
    pass


class MissingJointData(DataError):
    pass


class JointWithoutDof(DataError):
    pass


# analysis
class TooFewPoints(DataError):
    pass


class LabelMismatch(DataError):
    pass


class DegenerateClass(DataError):
    pass


class InvalidParameter(UsageError):
    pass


class PairComputationError(SigShapeError):
    """A single distance-matrix cell failed; wraps the original error."""

    def __init__(self, i: int, j: int, id_i: str, id_j: str, cause: Exception):
        self.i = i
        self.j = j
        self.cause = cause
        self.exit_code = getattr(cause, 'exit_code', 2)
        super().__init__(f"pair ({i}, {j}) [{id_i} vs {id_j}]: {cause}")
