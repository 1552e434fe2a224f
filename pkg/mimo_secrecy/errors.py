"""Exceptions raised by the toolkit.

Everything derives from ValueError so callers that only know about bad
input values keep working.
"""

from __future__ import annotations

from typing import Optional


class SecrecyToolkitError(ValueError):
    pass


class InvalidMatrix(SecrecyToolkitError):
    pass


class DimensionError(SecrecyToolkitError):
    pass


class NotPositiveDefinite(SecrecyToolkitError):
    pass


class NotPositiveSemidefinite(SecrecyToolkitError):
    pass


class PartitionError(SecrecyToolkitError):
    pass


class NotSymmetric(SecrecyToolkitError):
    pass


class InfeasibleSecondOrder(SecrecyToolkitError):
    """(K, K~) does not describe any complex random vector."""


class CountError(SecrecyToolkitError):
    pass


class NotDegraded(SecrecyToolkitError):
    pass


class InfeasibleNoiseCorrelation(SecrecyToolkitError):
    pass


class ConfigError(SecrecyToolkitError):
    """Bad channel / experiment file or CLI configuration."""

    def __init__(self, message: str, field: Optional[str] = None, line: Optional[int] = None):
        self.field = field
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
