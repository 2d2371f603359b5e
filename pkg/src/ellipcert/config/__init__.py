"""Configuration loading for ellipcert."""

from ellipcert.config.settings import Settings, load_settings

__all__ = ["Settings", "load_settings"]
