"""
ellipcert shared kernel.

Common utilities used by every subpackage:
- Structured logging (logger)
- Custom exceptions (exceptions)

The pydantic data contracts live in ``ellipcert.shared.schema`` and are
imported from there directly, since they depend on the geometry layer.
"""

from ellipcert.shared.exceptions import (
    CertificateParseError,
    ConfigurationError,
    EllipCertError,
    InvalidInputError,
    NumericalFailureError,
    ProgramParseError,
    UnstableSystemError,
)
from ellipcert.shared.logger import (
    bind_run_context,
    clear_run_context,
    get_logger,
    logger,
)

__all__ = [
    # Exceptions
    "EllipCertError",
    "InvalidInputError",
    "ProgramParseError",
    "CertificateParseError",
    "NumericalFailureError",
    "UnstableSystemError",
    "ConfigurationError",
    # Logging
    "logger",
    "get_logger",
    "bind_run_context",
    "clear_run_context",
]
