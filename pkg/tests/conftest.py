"""
Pytest configuration and shared fixtures for median-meta tests.
"""

from __future__ import annotations

import os
from pathlib import Path

import numpy as np
import pytest

from median_meta.data import PATIENT_DELAY_FIXTURE
from median_meta.simulation.config import (
    Scenario,
    ScalingStep,
    SimConfig,
)

# Enable pytest-asyncio for async tests
pytest_plugins = ["pytest_asyncio"]


@pytest.fixture
def temp_dir(tmp_path: Path) -> Path:
    """A temporary directory for test files."""
    return tmp_path


@pytest.fixture
def env_cleanup():
    """
    Restore os.environ after test. Use with monkeypatch or manually
    set/delete keys in test.
    """
    before = os.environ.copy()
    yield
    os.environ.clear()
    os.environ.update(before)


@pytest.fixture
def clean_medianmeta_env(monkeypatch):
    """Remove every MEDIANMETA_* variable for the test."""
    for key in list(os.environ):
        if key.startswith("MEDIANMETA_"):
            monkeypatch.delenv(key, raising=False)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


@pytest.fixture
def fixture_table() -> Path:
    """The shipped 50-study patient-delay table."""
    return PATIENT_DELAY_FIXTURE


@pytest.fixture
def small_config() -> SimConfig:
    return SimConfig(
        k_studies=15,
        size_median=50,
        tau2=0.25,
        sigma2=0.25,
        scaling_step=ScalingStep.MEDIAN_IS_5,
        scenario=Scenario.ALL_MEDIANS_Q1Q3,
        replications=3,
        seed=7,
    )

