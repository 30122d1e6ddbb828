import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import bareiss_det, laplace_det, random_matrix

from nam.errors import SingularMatrixError
from nam.linalg import (
    NoIsometrySplit,
    PerturbationOperator,
    det,
    diag_form_norm,
    form_norm_bound,
    gauss_decompose,
    identity,
    matmul,
    quadratic_form,
    split_isometry,
)
from nam.padic import pnorm

F = Fraction


def test_det_examples():
    assert PerturbationOperator(3, identity(4)).det() == 1
    assert det([[2, 0], [0, F(1, 2)]]) == 1


def test_identity_decomposes_trivially():
    dec = gauss_decompose(identity(3))
    I = tuple(map(tuple, identity(3)))
    assert dec.S == dec.C == dec.E == I and dec.D == (1, 1, 1)


def test_symmetric_hand_example():
    p = 3
    dec = gauss_decompose([[1, 1], [1, 1 + p]])
    assert dec.D == (1, p)
    assert dec.C == ((1, 0), (1, 1)) and dec.E == ((1, 1), (0, 1))
    assert dec.S == ((1, 0), (0, 1))


def test_zero_corner_needs_a_permutation():
    A = [[0, 1, 2], [1, 0, 1], [2, 1, F(1, 3)]]
    dec = gauss_decompose(A)
    assert dec.reconstruct() == [[F(x) for x in r] for r in A]
    assert dec.S != tuple(map(tuple, identity(3)))
    assert dec.det_D == det(A) and dec.cycles() == [[0, 1]]


def test_even_permutation_keeps_signs():
    A = [[0, 1, 0], [0, 0, 1], [1, 0, 0]]
    dec = gauss_decompose(A)
    assert dec.parity == 1 and all(s == 1 for s in dec.signs)
    assert dec.reconstruct() == [[F(x) for x in r] for r in A]


def test_singular_rejected():
    with pytest.raises(SingularMatrixError):
        gauss_decompose([[1, 2], [2, 4]])


def test_operator_from_perturbation():
    op = PerturbationOperator.from_perturbation(2, [[F(1, 2), 0], [0, 0]])
    assert op.matrix() == [[F(3, 2), 0], [0, 1]]
    assert op.is_invertible() and op.det().norm() == 2


def test_split_small_perturbation():
    p = 3
    A = [[1 + F(3), F(9)], [F(3, 2), 1]]
    sp = split_isometry(A, p=p)
    assert sp.n == 0 and sp.A1 == tuple(map(tuple, identity(2)))
    assert [list(r) for r in sp.A2] == A and sp.bound <= F(1, p)


def test_split_large_corner():
    p = 2
    A = [[F(1, 4), F(2)], [F(4), 1]]
    sp = split_isometry(PerturbationOperator(p, A))
    assert sp.n >= 1
    assert matmul([list(r) for r in sp.A1], [list(r) for r in sp.A2]) == A
    assert pnorm(sp.det_A2, p) == 1 and sp.bound <= F(1, p)


def test_split_with_cap_can_fail():
    with pytest.raises(NoIsometrySplit):
        split_isometry([[F(1, 4), 0], [0, 1]], p=2, max_n=0)
    with pytest.raises(ValueError):
        split_isometry(identity(2), c=1, p=2)


def test_forms():
    z = [F(1, 2), 3, -1]
    assert quadratic_form(identity(3), z) == sum(x * x for x in z)
    assert diag_form_norm([3], [1], 3) == F(1, 3)
    A = [[2, 1, 0], [1, 4, 0], [0, 0, 8]]
    assert pnorm(quadratic_form(A, z), 2) <= form_norm_bound(A, z, 2)


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 5), st.sampled_from([2, 3, 5]), st.integers(0, 10**6))
def test_det_against_laplace(d, p, seed):
    A = random_matrix(random.Random(seed), d, p)
    assert det(A) == laplace_det(A) == bareiss_det(A)


@settings(max_examples=120, deadline=None)
@given(st.integers(1, 6), st.sampled_from([2, 3, 5]), st.booleans(), st.integers(0, 10**6))
def test_decomposition_properties(d, p, corner, seed):
    A = random_matrix(random.Random(seed), d, p, zero_corner=corner and d > 1)
    if bareiss_det(A) == 0:
        return
    dec = gauss_decompose(A)
    assert dec.reconstruct() == A
    assert dec.det_D == bareiss_det(A)
    for i in range(d):
        assert dec.C[i][i] == dec.E[i][i] == 1
        for j in range(i + 1, d):
            assert dec.C[i][j] == 0 and dec.E[j][i] == 0
    sp = split_isometry(A, p=p)
    assert pnorm(sp.det_A2, p) == 1
    assert sp.det_A1 * sp.det_A2 == bareiss_det(A)
