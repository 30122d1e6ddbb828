import cmath
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import cyclo_to_group_ring, group_ring_is_zero

from nam.characters import CyclotomicElement, RootOfUnity, character
from nam.padic import PadicScalar

Z = CyclotomicElement


def test_character_examples():
    assert character(Fraction(3, 8), 0, p=2).angle == 0
    assert character(1, Fraction(6, 5), p=2).angle == 0
    chi = character(PadicScalar(2, 1), PadicScalar(2, Fraction(1, 2)))
    assert chi.angle == Fraction(1, 2)
    assert abs(chi.complex_approx() - (-1)) < 1e-15


def test_root_of_unity_rejects_foreign_denominator():
    with pytest.raises(ValueError):
        RootOfUnity(2, Fraction(1, 3))


def test_sum_of_pth_roots_vanishes():
    for p in (2, 3, 5, 7):
        total = sum((Z.zeta(p, 1, j) for j in range(p)), Z.zero(p))
        assert total == 0 and total.is_zero()


def test_conjugate_of_zeta4():
    z = Z.zeta(2, 2)
    assert z.conjugate() == -z


def test_zeta_plus_inverse_is_real():
    for p, k in ((2, 3), (3, 2), (5, 1)):
        z = Z.zeta(p, k)
        w = z + z.conjugate()
        assert w.is_real()
        assert not z.is_real()


def test_complex_approx_examples():
    assert Z.one(2).complex_approx() == complex(1.0, 0.0)
    assert abs(Z.zeta(2, 1).complex_approx() - (-1)) < 1e-15
    z3 = Z.zeta(3, 1).complex_approx()
    assert abs(z3.real + 0.5) < 1e-15 and abs(z3.imag - 0.8660254037844386) < 1e-15


def test_level_is_not_part_of_identity():
    z = Z.zeta(3, 1)
    assert z.lift_level(3) == z
    assert hash(z.lift_level(3)) == hash(z)
    assert z.lift_level(3).minimal().level == 1


def test_as_rational():
    assert (Z.zeta(2, 2) * Z.zeta(2, 2)).as_rational() == -1
    with pytest.raises(ValueError):
        Z.zeta(2, 2).as_rational()


elements = st.builds(
    lambda p, k, data: (p, k, data),
    st.sampled_from([2, 3, 5]),
    st.integers(0, 3),
    st.lists(st.tuples(st.integers(0, 200), st.fractions(max_denominator=20)), max_size=6),
)


def build(p, k, data):
    N = p**k
    exps = {}
    for e, c in data:
        exps[e % N] = exps.get(e % N, Fraction(0)) + c
    return Z.from_exponents(p, k, exps), exps


@given(elements)
def test_reduction_agrees_with_group_ring(el):
    p, k, data = el
    c, exps = build(p, k, data)
    N = p**k
    naive = [Fraction(0)] * N
    for e, x in exps.items():
        naive[e] += x
    diff = [a - b for a, b in zip(naive, cyclo_to_group_ring(c, N))]
    assert group_ring_is_zero(diff, p)


@given(elements, elements)
def test_multiplication_is_convolution_in_group_ring(e1, e2):
    p = e1[0]
    k = max(e1[1], e2[1])
    a, ea = build(p, e1[1], e1[2])
    b, eb = build(p, e2[1], e2[2])
    N = p**k
    naive = [Fraction(0)] * N
    sa, sb = N // p ** e1[1], N // p ** e2[1]
    for i, x in ea.items():
        for j, y in eb.items():
            naive[(i * sa + j * sb) % N] += x * y
    diff = [u - v for u, v in zip(naive, cyclo_to_group_ring(a * b, N))]
    assert group_ring_is_zero(diff, p)


@given(elements, elements)
def test_ring_laws(e1, e2):
    p = e1[0]
    a, _ = build(*e1)
    b, _ = build(p, *e2[1:])
    assert a * b == b * a
    assert (a + b) - b == a
    assert (a * b).conjugate() == a.conjugate() * b.conjugate()
    approx = (a * b).complex_approx()
    assert cmath.isclose(approx, a.complex_approx() * b.complex_approx(), abs_tol=1e-9)
