"""
Settings for ellipcert.

Defaults come from ``defaults.yaml`` next to this module (or a file given
with ``--config``), then a ``.env`` file, then ``ELLIPCERT_<SECTION>__<KEY>``
environment variables. The merged result is validated by pydantic.
"""

from __future__ import annotations

import os
from enum import StrEnum
from pathlib import Path
from typing import Any

import yaml
from dotenv import find_dotenv, load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from ellipcert.shared.exceptions import ConfigurationError
from ellipcert.shared.logger import get_logger

logger = get_logger("ellipcert.config")

DEFAULTS_PATH = Path(__file__).with_name("defaults.yaml")
ENV_PREFIX = "ELLIPCERT_"


class ReportFormat(StrEnum):
    """Output formats of the CLI reports."""

    TEXT = "text"
    JSON = "json"


class AnnotatorSettings(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    safety_factor: float = Field(default=2.0, ge=1.0)
    tol: float = Field(default=1e-9, gt=0.0)


class CheckerSettings(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    tol: float = Field(default=1e-9, gt=0.0)


class SimulationSettings(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    trials: int = Field(default=10_000, ge=0)
    cycles: int = Field(default=50, ge=0)
    seed: int = 0
    tol: float = Field(default=1e-7, gt=0.0)
    max_corner_dim: int = Field(default=12, ge=0)


class ReportSettings(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    format: ReportFormat = ReportFormat.TEXT
    significant_digits: int = Field(default=6, ge=1, le=17)


class Settings(BaseModel):
    """Validated settings for every subcommand."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    annotator: AnnotatorSettings = Field(default_factory=AnnotatorSettings)
    checker: CheckerSettings = Field(default_factory=CheckerSettings)
    simulation: SimulationSettings = Field(default_factory=SimulationSettings)
    report: ReportSettings = Field(default_factory=ReportSettings)


def _read_yaml(path: Path) -> dict[str, Any]:
    try:
        with path.open(encoding="utf-8") as handle:
            data = yaml.safe_load(handle) or {}
    except OSError as exc:
        raise ConfigurationError(f"cannot read settings file {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigurationError(
            f"settings file {path} is not valid YAML: {exc}"
        ) from exc
    if not isinstance(data, dict):
        raise ConfigurationError(f"settings file {path} must hold a mapping")
    return data


def _env_overrides(environ: dict[str, str]) -> dict[str, dict[str, str]]:
    overrides: dict[str, dict[str, str]] = {}
    for name, value in environ.items():
        if not name.startswith(ENV_PREFIX) or "__" not in name:
            continue
        section, _, key = name[len(ENV_PREFIX) :].lower().partition("__")
        overrides.setdefault(section, {})[key] = value
    return overrides


def load_settings(path: Path | None = None) -> Settings:
    """
    Load and validate settings.

    Args:
        path: Alternative YAML file; defaults.yaml when omitted

    Raises:
        ConfigurationError: unreadable file or invalid values
    """
    load_dotenv(find_dotenv(usecwd=True), override=False)
    data = _read_yaml(path or DEFAULTS_PATH)
    for section, values in _env_overrides(dict(os.environ)).items():
        merged = dict(data.get(section) or {})
        merged.update(values)
        data[section] = merged

    try:
        settings = Settings.model_validate(data)
    except ValidationError as exc:
        raise ConfigurationError(f"invalid settings: {exc}") from exc
    logger.debug("settings_loaded", source=str(path or DEFAULTS_PATH))
    return settings
