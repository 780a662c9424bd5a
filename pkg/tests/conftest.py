"""
Pytest configuration and shared fixtures.
"""
import os
import sys
import tempfile
from pathlib import Path

import numpy as np
import pytest

for name in list(os.environ):
    if name.startswith("ASPECTRA_"):
        del os.environ[name]

sys.path.insert(0, str(Path(__file__).parent.parent))

from src.config import ToleranceConfig
from src.core import weightspace
from src.core.laws import FuzzConfig
from src.repositories import MatrixRepository


@pytest.fixture
def temp_dir():
    """Create temporary directory for test files."""
    with tempfile.TemporaryDirectory() as tmpdir:
        yield tmpdir


@pytest.fixture
def tol():
    return ToleranceConfig()


@pytest.fixture
def diag_weight(tol):
    """A = diag(2, 1, 0)."""
    return weightspace.make_weight(np.diag([2.0, 1.0, 0.0]), tol)


@pytest.fixture
def full_rank_weight(tol):
    return weightspace.random_weight(11, 5, 5, tol=tol)


@pytest.fixture
def deficient_weight(tol):
    return weightspace.random_weight(12, 6, 3, tol=tol)


@pytest.fixture(params=[(5, 5), (6, 3), (4, 1)], ids=["full", "half", "rank-one"])
def random_weight(request, tol):
    n, rank = request.param
    return weightspace.random_weight(100 + n * 10 + rank, n, rank, tol=tol)


@pytest.fixture
def member(random_weight):
    return weightspace.random_in_MA(7, random_weight).T


@pytest.fixture
def small_fuzz_config():
    """Small suite configuration for fast law runs."""
    return FuzzConfig(seed=2024, trials=3, dim_range=(2, 5))


@pytest.fixture
def write_matrix(temp_dir):
    """Factory fixture writing a matrix file into temp_dir and returning its path."""
    repo = MatrixRepository()

    def _write(name: str, M) -> str:
        return repo.save(os.path.join(temp_dir, name), np.asarray(M, dtype=complex))

    return _write


@pytest.fixture
def example_one_files(write_matrix):
    """Unilateral model with N = 8: sqrt weights 2^-n, T = (2/5) S."""
    N = 8
    a = 2.0 ** -np.arange(N)
    T = np.diag(np.full(N - 1, 0.4), k=-1)
    return write_matrix("weight.json", np.diag(a ** 2)), write_matrix("operator.json", T)
