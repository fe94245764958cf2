"""
Shared pytest fixtures
"""

import random

import pytest

from core import example_two
from settings import get_settings, reload_settings

SETTINGS_VARIABLES = (
    "ANTISORT_BF_LIMIT",
    "ANTISORT_ROTATION_COUNT_LIMIT",
    "ANTISORT_HEAP_CEILING",
    "ANTISORT_PLAIN_CEILING",
    "ANTISORT_OPTIMAL_CEILING",
)


@pytest.fixture(autouse=True)
def default_settings(monkeypatch):
    """Every test starts from the built-in defaults"""
    for name in SETTINGS_VARIABLES:
        monkeypatch.delenv(name, raising=False)
    reload_settings()
    yield
    get_settings.cache_clear()


@pytest.fixture
def rng():
    return random.Random(20240607)


@pytest.fixture
def example():
    """(alphabet, mps) for the three-element example where c needs a or b"""
    return example_two()


@pytest.fixture
def write_file(tmp_path):
    def write(name, text):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path

    return write
