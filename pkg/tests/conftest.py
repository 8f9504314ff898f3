import numpy as np
import pytest
from click.testing import CliRunner

from app import create_app
from app.environments import TestingConfig
from app.lab.matcore import CMatrix, MatrixKind, RandomSpec, random_in_disk


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def app():
    return create_app(TestingConfig)


@pytest.fixture
def client(app):
    return app.test_client()


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def ginibre(rng):
    def make(rows: int, cols: int | None = None) -> CMatrix:
        cols = rows if cols is None else cols
        data = rng.standard_normal((rows, cols)) + 1j * rng.standard_normal(
            (rows, cols)
        )
        return CMatrix(data / np.sqrt(2 * max(rows, cols)))

    return make


@pytest.fixture
def in_disk(rng):
    """(matrix, decomposition) with a fresh seed from the shared generator."""

    def make(dim: int, kind=MatrixKind.NORMAL_IN_DISK, radius: float = 0.9):
        seed = int(rng.integers(0, 2**32))
        return random_in_disk(RandomSpec(dim, seed, radius, kind))

    return make
