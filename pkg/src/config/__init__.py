"""Configuration module."""

from src.config.run_config import RunConfig, load_run_config
from src.config.settings import Settings, get_settings

__all__ = ["RunConfig", "Settings", "get_settings", "load_run_config"]
