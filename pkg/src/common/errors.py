"""Exception hierarchy shared by the numerics, inequality and pipeline layers."""
from __future__ import annotations


class FracIneqError(Exception):
    """Base class for every error raised by this package."""


class DomainError(FracIneqError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class SpecfunOverflowError(DomainError, OverflowError):
    """Special-function value does not fit in a double."""


class InvalidIntervalError(DomainError):
    """Integration interval with lo > hi or a breakpoint outside it."""


class UnavailableDerivativeError(FracIneqError):
    """A custom FunctionSpec lacks the requested derivative."""


class CertificationMissingError(FracIneqError):
    """Scenario was not certified for the class a theorem requires."""


class MissingParameterError(FracIneqError, ValueError):
    """A corollary constant needs a parameter (s or p) that was not supplied."""


class ExhaustionError(FracIneqError, RuntimeError):
    """Scenario generation rejected nearly every candidate."""


class UsageError(FracIneqError):
    """Command line could not be turned into a RunPlan."""


__all__ = [
    "FracIneqError",
    "DomainError",
    "SpecfunOverflowError",
    "InvalidIntervalError",
    "UnavailableDerivativeError",
    "CertificationMissingError",
    "MissingParameterError",
    "ExhaustionError",
    "UsageError",
]
