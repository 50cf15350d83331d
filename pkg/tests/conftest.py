"""Pytest configuration and shared fixtures."""

import sys

import pytest

from src.config.settings import Settings, get_settings
from src.utils.logger import configure_logging

# Configure logging for tests
configure_logging(log_level="DEBUG")


@pytest.fixture
def settings(monkeypatch):
    """Default settings, isolated from the developer's environment and .env file."""
    for key in (
        "MARKOV_R0",
        "MARKOV_K",
        "MARKOV_SEED",
        "MARKOV_STRIDE",
        "MARKOV_ALPHA_FACTOR",
        "MARKOV_ADEQUACY_THRESHOLD",
        "MARKOV_DIMENSION_PERCENTILE",
        "MARKOV_CELL_SIZE",
        "MARKOV_ATTRACTOR_TOL",
        "MARKOV_REAL_TOL",
        "LOG_LEVEL",
    ):
        monkeypatch.delenv(key, raising=False)
    return Settings(_env_file=None)


@pytest.fixture(autouse=True)
def restore_logging():
    """Send log output back to the session stream after a command reconfigures it."""
    stream = sys.stderr
    yield
    configure_logging(log_level="DEBUG", stream=stream)


@pytest.fixture(autouse=True)
def clear_settings_cache():
    """Drop the cached settings between tests."""
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()
