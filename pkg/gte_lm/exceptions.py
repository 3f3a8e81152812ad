"""Exception hierarchy for gte-lm."""

from typing import Optional


class GteError(Exception):
    """Base class for all gte-lm errors."""


class DimensionMismatchError(GteError, ValueError):
    """A vector or tensor does not have the expected dimension."""


class InvalidTensorError(GteError, ValueError):
    """A tensor violates its construction invariants."""


class InvalidProblemError(GteError, ValueError):
    """A generalized tensor equation violates its construction invariants."""


class DegenerateProblemError(GteError, ValueError):
    """The problem has no nonzero entry to scale by."""


class UnsupportedDimensionError(GteError, ValueError):
    """The requested check is only available for a specific dimension."""


class FileFormatError(GteError):
    """A tensor, vector or manifest file could not be parsed."""

    def __init__(self, path, line: Optional[int], reason: str):
        self.path = str(path)
        self.line = line
        self.reason = reason
        where = self.path if line is None else f"{self.path}:{line}"
        super().__init__(f"{where}: {reason}")
