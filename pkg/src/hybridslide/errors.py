"""Exception types raised by the simulation engine."""

from __future__ import annotations


class HybridSlideError(Exception):
    """Base class for all engine errors."""


class InvalidArgument(HybridSlideError, ValueError):
    """A caller supplied a value outside the documented domain."""


class NumericFailure(HybridSlideError, ArithmeticError):
    """An iterative solve or evaluation failed.

    ``where`` carries a short location description (time, state, solver)
    and ``residual`` the last residual norm when one is meaningful.
    """

    def __init__(self, message: str, where: str | None = None, residual: float | None = None):
        super().__init__(message if where is None else f"{message} [{where}]")
        self.where = where
        self.residual = residual


class PreconditionViolation(HybridSlideError):
    """An operation was called in a state its contract excludes."""
