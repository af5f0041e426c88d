"""
Shared fixtures: a seeded generator, a random irreducible matrix factory,
and the small matrices most tests start from.
"""

import numpy as np
import pytest

from symbolic.sft_core import TransitionMatrix, full_shift

SEED = 20240101


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(SEED)


def make_irreducible(rng: np.random.Generator, order: int, density: float = 0.3) -> TransitionMatrix:
    """Random 0-1 matrix with a cycle through every symbol, so it is strongly connected."""
    if order == 1:
        return TransitionMatrix(np.array([[1]]))
    entries = (rng.random((order, order)) < density).astype(int)
    for i in range(order):
        entries[i, (i + 1) % order] = 1
    return TransitionMatrix(entries)


@pytest.fixture
def random_irreducible(rng):
    def factory(max_order: int, min_order: int = 1) -> TransitionMatrix:
        order = int(rng.integers(min_order, max_order + 1))
        return make_irreducible(rng, order, density=float(rng.uniform(0.1, 0.7)))

    return factory


@pytest.fixture
def two_shift() -> TransitionMatrix:
    return full_shift(2)


@pytest.fixture
def golden_mean() -> TransitionMatrix:
    return TransitionMatrix(np.array([[1, 1], [1, 0]]))


@pytest.fixture
def data_dir(tmp_path):
    path = tmp_path / "data"
    path.mkdir()
    return path
