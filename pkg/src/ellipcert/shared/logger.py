"""
Structured logging for ellipcert.

Events go to stderr as snake_case names with key/value fields, so that
reports on stdout stay machine-readable. ``ELLIPCERT_ENV=production``
switches the console renderer for one JSON object per line; ``LOG_LEVEL``
sets the threshold (WARNING unless asked otherwise). Each CLI invocation
binds a ``run_id`` and ``command`` that every event of the run carries.
"""

from __future__ import annotations

import logging
import os
import sys
from typing import TYPE_CHECKING, Any

import numpy as np
import structlog

if TYPE_CHECKING:
    from structlog.types import Processor

ROOT_LOGGER = "ellipcert"
DEFAULT_LEVEL = "WARNING"


# ============================================
# Run Context
# ============================================


def bind_run_context(run_id: str, command: str | None = None) -> None:
    """Attach run_id (and the subcommand name) to every following event."""
    fields: dict[str, str] = {"run_id": run_id}
    if command:
        fields["command"] = command
    structlog.contextvars.bind_contextvars(**fields)


def clear_run_context() -> None:
    structlog.contextvars.clear_contextvars()


# ============================================
# Rendering
# ============================================


def _numpy_default(obj: Any, default: Any) -> Any:
    # numpy scalars and arrays show up in event fields (eigenvalues, margins)
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return default(obj)


def _level() -> int:
    name = os.getenv("LOG_LEVEL", DEFAULT_LEVEL).upper()
    return logging.getLevelNamesMapping().get(name, logging.WARNING)


def _renderer(production: bool) -> list[Processor]:
    if production:
        return [
            structlog.processors.format_exc_info,
            structlog.processors.JSONRenderer(default=_numpy_default),
        ]
    return [
        structlog.dev.ConsoleRenderer(
            colors=sys.stderr.isatty(),
            exception_formatter=structlog.dev.RichTracebackFormatter(
                show_locals=False,
                max_frames=10,
            ),
        )
    ]


def configure_logging() -> structlog.BoundLogger:
    """
    Configure structlog from the environment and return the root logger.

    Environment Variables:
        - ELLIPCERT_ENV: "production" for JSON lines, anything else for console
        - LOG_LEVEL: DEBUG, INFO, WARNING, ERROR (default: WARNING)
    """
    production = os.getenv("ELLIPCERT_ENV", "development").lower() == "production"
    level = _level()
    structlog.configure(
        processors=[
            structlog.contextvars.merge_contextvars,
            structlog.processors.add_log_level,
            structlog.processors.TimeStamper(fmt="iso", utc=True),
            structlog.processors.StackInfoRenderer(),
            structlog.processors.UnicodeDecoder(),
            *_renderer(production),
        ],
        wrapper_class=structlog.make_filtering_bound_logger(level),
        context_class=dict,
        logger_factory=structlog.PrintLoggerFactory(file=sys.stderr),
        cache_logger_on_first_use=False,
    )
    # stdlib logging shares the stream and level
    logging.basicConfig(format="%(message)s", stream=sys.stderr, level=level)
    return structlog.get_logger(ROOT_LOGGER)


logger = configure_logging()


def get_logger(name: str | None = None) -> structlog.BoundLogger:
    """Logger for a subpackage, e.g. ``get_logger("ellipcert.checker")``."""
    return structlog.get_logger(name or ROOT_LOGGER)
