import os

# no log files from test runs; must be set before app.logger configures itself
os.environ.setdefault("LOG_TO_FILE", "0")

import random

import pytest

from app.config import RunConfig
from app.metrized_lattice import IntervalSetCarrier

WORKBENCH_ENV = (
    "WORKBENCH_SEED",
    "WORKBENCH_HORIZON",
    "WORKBENCH_SAMPLES",
    "WORKBENCH_SIZE_CAP",
    "WORKBENCH_OUTPUT",
    "WORKBENCH_HISTORY_DB",
)


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for name in WORKBENCH_ENV:
        monkeypatch.delenv(name, raising=False)


@pytest.fixture
def rng():
    return random.Random(7)


@pytest.fixture
def small_config():
    """Small enough for every suite to finish in well under a second."""
    return RunConfig(samples=200, horizon=12, size_cap=3, steps=6, rows=8)


@pytest.fixture
def unit_lattice():
    return IntervalSetCarrier()


@pytest.fixture
def history_db(tmp_path):
    return str(tmp_path / "history.db")
