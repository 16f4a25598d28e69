"""
Shared fixtures for the matchregula test suite.
"""

import numpy as np
import pytest

from matchregula.core import Dataset


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def exact_pairs_dataset():
    """Three treated units, each with a control at identical covariates, plus two extras."""
    X = [[0.0, 1.0], [2.0, 0.5], [4.0, -1.0], [4.0, -1.0], [0.0, 1.0], [2.0, 0.5], [9.0, 9.0], [-3.0, 2.0]]
    y = [1.0, 2.0, 3.0, 2.5, 0.5, 1.5, 0.0, 0.0]
    z = [1, 1, 1, 0, 0, 0, 0, 0]
    return Dataset(X=X, y=y, z=z)


@pytest.fixture
def random_dataset(rng):
    """n = 60 units in d = 3 with roughly a third treated."""
    X = rng.normal(size=(60, 3))
    z = (rng.random(60) < 0.35).astype(int)
    y = X @ np.array([1.0, -0.5, 0.25]) + rng.normal(size=60)
    return Dataset(X=X, y=y, z=z)


@pytest.fixture
def write_csv(tmp_path):
    """Write a CSV file from a header line and data rows, returning its path."""

    def _write(name: str, header: str, rows: list[str]):
        path = tmp_path / name
        path.write_text("\n".join([header, *rows]) + "\n", encoding="utf-8")
        return path

    return _write
