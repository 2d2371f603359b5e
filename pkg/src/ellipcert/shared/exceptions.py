"""
Custom exceptions for ellipcert.

Provides a clear hierarchy for error handling and CLI exit codes.
Refuted certificates are analysis results, not errors: nothing here is
raised for a failed closure check or a failed proof step.
"""

from __future__ import annotations


class EllipCertError(Exception):
    """Base exception for all ellipcert errors."""

    pass


# ============================================
# Input Errors
# ============================================


class InvalidInputError(EllipCertError):
    """A value violates a documented precondition (shape, symmetry, PSD, index)."""

    def __init__(self, message: str, field: str | None = None) -> None:
        super().__init__(message)
        self.field = field


class ProgramParseError(InvalidInputError):
    """Program document is malformed or references out-of-range indices."""

    def __init__(self, message: str, location: str | None = None) -> None:
        where = f" at {location}" if location else ""
        super().__init__(f"program document{where}: {message}", field=location)
        self.location = location


class CertificateParseError(InvalidInputError):
    """Certificate document is malformed or inconsistent with its program."""

    def __init__(self, message: str, location: str | None = None) -> None:
        where = f" at {location}" if location else ""
        super().__init__(f"certificate document{where}: {message}", field=location)
        self.location = location


# ============================================
# Numerical Errors
# ============================================


class NumericalFailureError(EllipCertError):
    """An iterative routine did not converge within its cap."""

    pass


class UnstableSystemError(EllipCertError):
    """
    No positive definite Lyapunov solution exists.

    Raised when the vectorized Lyapunov system is singular or its
    solution is not positive definite.
    """

    def __init__(self, message: str, min_eigenvalue: float | None = None) -> None:
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


# ============================================
# Configuration Errors
# ============================================


class ConfigurationError(EllipCertError):
    """Invalid settings file or environment override."""

    pass
