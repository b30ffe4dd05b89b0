from pathlib import Path

import numpy as np
import pytest

from data.flight_data import generate_synthetic, save_csv
from rules.bfa import BfaConfig
from rules.bfa_elm_strategy import PipelineConfig
from utils.numerics import RandomStream


@pytest.fixture
def small_bfa():
    """Tiny schedule so optimizer-driven tests stay fast"""
    return BfaConfig(
        population_size=4,
        chemotaxis_steps=3,
        reproduction_steps=2,
        elimination_steps=1,
        swim_length=2,
        step_size=0.1,
        dispersal_probability=0.25,
    )


@pytest.fixture
def fast_config(small_bfa):
    return PipelineConfig(l_candidates=(2, 4), bfa=small_bfa, seed=7)


@pytest.fixture
def synthetic_dataset():
    return generate_synthetic(40, 0.02, RandomStream(42).child("generate"))


@pytest.fixture
def dataset_csv(tmp_path, synthetic_dataset) -> Path:
    path = tmp_path / "data.csv"
    save_csv(synthetic_dataset, path)
    return path


@pytest.fixture
def write_csv(tmp_path):
    """Write raw text under tmp_path and return the path"""

    def _write(text: str, name: str = "input.csv") -> Path:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path

    return _write


@pytest.fixture
def linear_rows():
    """Features and an FPI that is an exact linear function of them"""
    rng = np.random.default_rng(3)
    X = rng.uniform(0.1, 0.9, size=(40, 5))
    t = 0.2 + X @ np.array([0.1, 0.15, -0.05, 0.1, -0.1])
    return X, t
