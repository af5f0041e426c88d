import math

import numpy as np
import pytest

from symbolic.charpoly_oracle import (
    characteristic_polynomial,
    largest_real_root,
    perron_root_oracle,
    real_root_intervals,
)
from tests.conftest import make_irreducible


def test_characteristic_polynomial_of_two_shift():
    assert characteristic_polynomial([[1, 1], [1, 1]]) == [0, -2, 1]


def test_characteristic_polynomial_of_golden_mean():
    assert characteristic_polynomial([[1, 1], [1, 0]]) == [-1, -1, 1]


def test_characteristic_polynomial_of_single_strip_extension():
    a = [[1, 1, 1], [1, 1, 0], [0, 1, 0]]
    assert characteristic_polynomial(a) == [-1, 0, -2, 1]


def test_characteristic_polynomial_matches_numpy(rng):
    for _ in range(20):
        a = make_irreducible(rng, int(rng.integers(2, 7))).entries
        expected = np.poly(a.astype(float))[::-1]
        assert np.allclose(characteristic_polynomial(a), expected, atol=1e-6)


def test_root_intervals_of_x_squared_minus_two():
    intervals = real_root_intervals([-2, 0, 1])
    assert len(intervals) == 2
    (a, b), (c, d) = intervals
    assert a <= -math.sqrt(2) <= b < c <= math.sqrt(2) <= d


def test_root_intervals_merge_repeated_roots():
    # x^2 (x - 2)^2 has two distinct roots
    intervals = real_root_intervals([0, 0, 4, -4, 1])
    assert len(intervals) == 2
    assert intervals[0][0] <= 0 <= intervals[0][1]


def test_largest_real_root_of_x_squared_minus_two():
    assert largest_real_root([-2, 0, 1]) == pytest.approx(math.sqrt(2), abs=1e-12)


def test_largest_real_root_with_repeated_roots():
    # x^2 (x - 2)^2
    assert largest_real_root([0, 0, 4, -4, 1]) == pytest.approx(2.0, abs=1e-12)


def test_largest_real_root_rejects_polynomials_without_real_roots():
    with pytest.raises(ValueError):
        largest_real_root([1, 0, 1])
    with pytest.raises(ValueError):
        largest_real_root([5])


def test_oracle_matches_eigenvalues(rng):
    for _ in range(30):
        a = make_irreducible(rng, int(rng.integers(1, 9))).entries
        expected = max(abs(np.linalg.eigvals(a.astype(float))))
        assert perron_root_oracle(a) == pytest.approx(expected, abs=1e-9)


def test_oracle_on_cycle_hits_root_exactly():
    # x^3 - 1 has the rational root 1, isolated as a point
    cycle = [[0, 1, 0], [0, 0, 1], [1, 0, 0]]
    assert perron_root_oracle(cycle) == pytest.approx(1.0, abs=1e-12)


def test_oracle_of_nilpotent_matrix_is_zero():
    assert perron_root_oracle([[0, 1, 0], [0, 0, 1], [0, 0, 0]]) == 0.0
    assert perron_root_oracle([[0]]) == 0.0


def test_characteristic_polynomial_rejects_non_square():
    with pytest.raises(ValueError):
        characteristic_polynomial([[1, 0]])
