"""Pytest fixtures shared across test modules."""

import random

import pytest

from bvx.config import get_settings


@pytest.fixture
def rng():
    """Seeded random source."""
    return random.Random(20240611)


@pytest.fixture(autouse=True)
def fresh_settings():
    """Re-read BVX_* settings for every test."""
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()
