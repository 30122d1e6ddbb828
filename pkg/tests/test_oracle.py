from fractions import Fraction

import pytest

from nam.errors import EnumerationCapError
from nam.oracle import enumerate_oracle, lattice_cells, oracle_size
from nam.padic import Sadic

HALF = Fraction(1, 2)


def test_counting_example():
    grid = [0, HALF, 1]
    assert oracle_size(2, 1, 1, grid) == 9
    assert len(list(enumerate_oracle(2, 1, 1, grid))) == 9


def test_cap_rejects():
    with pytest.raises(EnumerationCapError):
        list(enumerate_oracle(2, 2, 2, [0, 1], cap=100))


def test_duplicate_free_and_deterministic():
    a = list(enumerate_oracle(3, 1, 1, [0, HALF, 1]))
    b = list(enumerate_oracle(3, 1, 1, [1, HALF, 0, 1]))
    assert a == b
    assert len(set(a)) == len(a) == 27


def test_probability_filter():
    probs = list(enumerate_oracle(2, 1, 1, [0, HALF, 1], probability=True))
    assert len(probs) == 3 and all(mu.total_mass() == 1 for mu in probs)
    sadic = list(enumerate_oracle(2, 1, 1, [0, 3, -2, 1], probability=True, mode=Sadic(3)))
    assert all(mu.is_probability() for mu in sadic) and len(sadic) == 4


def test_sparse_enumeration_matches_dense_filter():
    dense = [mu for mu in enumerate_oracle(2, 1, 2, [0, HALF, 1]) if len(mu.cells) <= 2]
    sparse = list(enumerate_oracle(2, 1, 2, [0, HALF, 1], max_support=2))
    assert set(dense) == set(sparse) and len(sparse) == oracle_size(2, 1, 2, [0, HALF, 1], 2)
    with pytest.raises(ValueError):
        list(enumerate_oracle(2, 1, 1, [HALF, 1], max_support=1))


def test_lattice_cells():
    assert len(lattice_cells(3, 2, 1)) == 9
    with pytest.raises(ValueError):
        lattice_cells(2, 1, -1)
