"""Shared exception types.

Kept in one place so the CLI can map them onto exit codes without
importing half the library into every handler.
"""

from __future__ import annotations


class ParameterError(ValueError):
    """An argument is outside its documented domain."""


class GroundMismatchError(ValueError):
    """Two values built over different ground sets were combined."""


class PreconditionError(ValueError):
    """A stated precondition (typically a set containment) does not hold."""


class SchemaError(ValueError):
    """A document does not conform to the expected JSON schema."""


class CutVerificationError(ValueError):
    """A supplied arc set does not separate the source from its sink."""


class InfeasibleCutError(ValueError):
    """No finite-capacity cut exists for the requested sink."""


class UnboundedRegionError(ValueError):
    """A projected region is unbounded; carries one certifying ray."""

    def __init__(self, message: str, ray: tuple | None = None):
        super().__init__(message)
        self.ray = ray
