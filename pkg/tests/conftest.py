import os
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "repo",
    derandomize=True,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "repo"))

CONFIG_DIR = Path(__file__).resolve().parents[1] / "src" / "polariton_engine" / "configs"
GOLDEN_DIR = Path(__file__).resolve().parent / "golden"


@pytest.fixture
def config_dir():
    return CONFIG_DIR


@pytest.fixture
def golden_dir():
    return GOLDEN_DIR


@pytest.fixture
def fine_grid():
    return np.arange(1900.0, 2060.0 + 1e-9, 0.05)
