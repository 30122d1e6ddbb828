import math
from fractions import Fraction

import pytest

from nam.errors import ModeMismatchError, ResolutionError
from nam.measures import BallMeasure, ClopenSet, LocallyConstantFn, dirac, haar, product_measure
from nam.padic import PI_SQUARED_ENCLOSURE, Sadic, pnorm, round_up_to_value_group
from nam.weak_dist import (
    CylinderSet,
    WeakDistribution,
    check_consistency,
    check_tightness,
    cylinder_evaluate,
    integrate_cylinder,
    lift_cylinder,
    minlos_sazonov_witness,
    plane_concentration,
    sazonov_witness,
)

coin = BallMeasure(3, 1, 1, {(0,): Fraction(1, 3), (2,): Fraction(2, 3)})


def test_products_are_consistent():
    wd = WeakDistribution.from_factors([coin, haar(3, 1, 1), coin])
    assert wd.dims == (1, 2, 3)
    assert check_consistency(wd).ok


def test_perturbed_level_is_caught():
    wd = WeakDistribution.from_factors([coin, coin, coin])
    lvl = wd.levels[1]
    c = next(iter(lvl.cells))
    bumped = dict(lvl.cells)
    bumped[c] += Fraction(1, 27)
    bad = WeakDistribution(3, wd.mode, wd.dims, (wd.levels[0], lvl.replace(cells=bumped), wd.levels[2]))
    rep = check_consistency(bad)
    assert not rep.ok and rep.pair == (0, 1)
    # the bumped level is the one being projected, so the excess shows up positive
    assert sum(rep.discrepancy.values()) == Fraction(1, 27)


def test_marginals_of_one_measure_are_consistent():
    big = product_measure(product_measure(coin, haar(3, 1, 1)), dirac(3, 1, 1, at=(1,)))
    assert check_consistency(WeakDistribution.from_marginals(big, [1, 3])).ok


def test_tightness_examples():
    wd = WeakDistribution.from_factors([haar(2, 1, 2)] * 3)
    for entry in check_tightness(wd, [(0, 1), (Fraction(1, 2), 4)]):
        assert entry.passed and entry.witness_level is None


def test_sadic_escaping_family_fails():
    p, mode = 2, Sadic(3)
    far = (Fraction(1, 2), Fraction(1, 4), Fraction(1, 8))
    big = BallMeasure(p, 3, 0, {far: -2, (0, 0, 0): 3}, mode=mode)
    wd = WeakDistribution.from_marginals(big, [1, 2, 3])
    assert check_consistency(wd).ok
    entries = check_tightness(wd, [(Fraction(1, 2), 1), (Fraction(1, 2), 4), (Fraction(1, 2), 8)])
    assert [e.passed for e in entries] == [False, False, True]
    assert entries[1].witness_level == 2
    assert entries[0].outside == (1, 1, 1)


def test_tightness_radius_below_resolution():
    with pytest.raises(ResolutionError):
        check_tightness(WeakDistribution.from_factors([haar(2, 1, 1)]), [(0, Fraction(1, 4))])


def test_cylinders():
    wd = WeakDistribution.from_factors([coin, coin, coin])
    whole = CylinderSet(0, ClopenSet.whole(1))
    assert cylinder_evaluate(wd, whole).value == 1
    C = CylinderSet(0, ClopenSet.ball((2,), 1))
    lifted = lift_cylinder(wd, C, 2)
    assert cylinder_evaluate(wd, C).value == cylinder_evaluate(wd, lifted).value == Fraction(2, 3)
    phi = LocallyConstantFn.from_table(3, 2, 1, {(2, 2): Fraction(9)})
    assert integrate_cylinder(wd, 1, phi) == 4


def test_plane_concentration_examples():
    h = haar(3, 2, 2)
    assert plane_concentration(h, 2, Fraction(1, 9)) == 1
    assert plane_concentration(dirac(3, 2, 2), 1, Fraction(1, 9)) == 1
    assert plane_concentration(h, 1, Fraction(1, 3)) == Fraction(1, 3)
    assert plane_concentration(h, 1, Fraction(1, 2)) == Fraction(1, 3)


def test_minlos_examples():
    zero = ((0, 0), (0, 0))
    assert minlos_sazonov_witness(dirac(2, 2, 1), 1).g == zero
    assert minlos_sazonov_witness(haar(3, 2, 1), 1).g == zero
    w = Fraction(2, 5)
    mu = BallMeasure(3, 2, 1, {(Fraction(1, 3), 0): w, (0, 0): 1 - w})
    wit = minlos_sazonov_witness(mu, 3)
    assert wit.j_coeff[0][0] == 2 * w / 9
    assert wit.j_coeff[0][1] == wit.j_coeff[1][1] == 0
    expected = round_up_to_value_group(2 * w / 9 * math.pi**2, 3)
    assert wit.g[0][0] == expected
    assert pnorm(wit.xi[0][0].value, 3) == expected
    lo, hi = PI_SQUARED_ENCLOSURE
    assert wit.j_coeff[0][0] * lo <= wit.g[0][0] <= 3 * wit.j_coeff[0][0] * hi


def test_minlos_only_counts_the_ball():
    mu = BallMeasure(2, 1, 1, {(Fraction(1, 2),): Fraction(1, 2), (Fraction(1, 8),): Fraction(1, 2)})
    assert minlos_sazonov_witness(mu, 2).j_coeff[0][0] == Fraction(1, 4)
    with pytest.raises(ModeMismatchError):
        minlos_sazonov_witness(mu.replace(mode=Sadic(3)), 2)


def test_sazonov_examples():
    assert sazonov_witness(dirac(2, 3, 2), Fraction(1, 10)).radii == (Fraction(1, 4),) * 3
    assert sazonov_witness(haar(3, 2, 1), 0).radii == (1, 1)
    eps = Fraction(1, 5)
    mu = BallMeasure(2, 2, 0, {(Fraction(1, 2), 0): eps / 2, (0, 0): 1 - eps / 2})
    sw = sazonov_witness(mu, eps)
    assert sw.radii == (1, 1) and sw.captured == 1 - eps / 2
    assert sazonov_witness(mu, 0).radii == (2, 1)
    with pytest.raises(ValueError):
        sazonov_witness(mu, -1)


def test_sazonov_box_is_minimal():
    mu = BallMeasure(
        2, 2, 1, {(0, 0): Fraction(1, 2), (Fraction(1, 2), 0): Fraction(1, 4), (0, Fraction(1, 4)): Fraction(1, 4)}
    )
    sw = sazonov_witness(mu, Fraction(1, 3))
    assert sw.captured >= Fraction(2, 3)
    # shrinking any single coordinate loses too much
    from nam.weak_dist import _box_value

    for i, r in enumerate(sw.radii):
        if r > sw.pad:
            smaller = list(sw.radii)
            smaller[i] = r / 2
            assert _box_value(mu, smaller) < Fraction(2, 3)
