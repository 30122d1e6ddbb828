"""Densities between ball measures and the product-measure dichotomy.

For factor pairs mu_j << nu_j the decision whether the infinite products
are equivalent or singular rests on beta_j = max_x |rho_j(x)| N_{nu_j}(x),
rho_j = dmu_j/dnu_j. An infinite product is described by a finite prefix
of factor pairs plus a tail rule, which makes the decision exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from nam.errors import AbsoluteContinuityViolation, ModeMismatchError, NamError
from nam.measures import BallMeasure, LocallyConstantFn, integrate, product_measure
from nam.padic import as_fraction


def _check_same_space(mu: BallMeasure, nu: BallMeasure):
    if (mu.p, mu.n, mu.m) != (nu.p, nu.n, nu.m):
        raise ValueError(
            f"measures differ in (p, n, m): {(mu.p, mu.n, mu.m)} vs {(nu.p, nu.n, nu.m)}"
        )
    if mu.mode != nu.mode:
        raise ModeMismatchError(f"{mu.mode} vs {nu.mode}")


class DensityFn(LocallyConstantFn):
    """Cellwise ratio dmu/dnu, zero off the support of nu."""

    def __init__(self, p: int, n: int, m: int, table: dict):
        self.table = dict(sorted(table.items()))
        super().__init__(p, n, m, lambda c: self.table.get(c, Fraction(0)))


def density(mu: BallMeasure, nu: BallMeasure) -> DensityFn:
    _check_same_space(mu, nu)
    stray = [c for c in mu.cells if c not in nu.cells]
    if stray:
        raise AbsoluteContinuityViolation(
            f"mu charges cell {tuple(map(str, stray[0]))} where nu vanishes"
        )
    table = {c: mu.cells.get(c, Fraction(0)) / w for c, w in nu.cells.items()}
    return DensityFn(mu.p, mu.n, mu.m, table)


def beta(mu: BallMeasure, nu: BallMeasure) -> Fraction:
    """max over cells of |rho(cell)| * N_nu(cell), in the mode's absolute value."""
    rho = density(mu, nu)
    mode = nu.mode
    return max(
        (mode.abs(rho.table[c]) * mode.abs(w) for c, w in nu.cells.items()),
        default=Fraction(0),
    )


def change_of_measure_holds(
    mu: BallMeasure, nu: BallMeasure, rho: LocallyConstantFn, h: LocallyConstantFn
) -> bool:
    """integral h dmu == integral h rho dnu, exactly."""
    return integrate(h, mu) == integrate(h * rho, nu)


@dataclass(frozen=True)
class TrivialTail:
    """beta_j = 1 and rho_j = 1 for every factor past the prefix."""


@dataclass(frozen=True)
class GeometricTail:
    """beta_j <= ratio < 1 for every factor past the prefix."""

    ratio: Fraction

    def __post_init__(self):
        r = as_fraction(self.ratio)
        if not 0 <= r < 1:
            raise ValueError("geometric tail ratio must lie in [0, 1)")
        object.__setattr__(self, "ratio", r)


TailRule = Union[TrivialTail, GeometricTail]


@dataclass(frozen=True)
class ProductPair:
    factors: tuple  # ((mu_j, nu_j), ...)
    tail: TailRule = TrivialTail()

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(tuple(f) for f in self.factors))

    def truncated(self, length: int) -> tuple[BallMeasure, BallMeasure]:
        """The products mu_1 x ... x mu_length and likewise for nu."""
        mus = [f[0] for f in self.factors[:length]]
        nus = [f[1] for f in self.factors[:length]]
        mu, nu = mus[0], nus[0]
        for a, b in zip(mus[1:], nus[1:]):
            mu, nu = product_measure(mu, a), product_measure(nu, b)
        return mu, nu


class ProductPairInvariantError(NamError):
    """A prefix factor pair is not a pair of probability measures with mu << nu."""


@dataclass(frozen=True)
class Equivalent:
    betas: tuple
    product: Fraction
    densities: tuple

    def partial_density(self, n: int) -> DensityFn:
        """q_n(x) = rho_1(x_1) ... rho_n(x_n) on the truncated product."""
        q = self.densities[0]
        for d in self.densities[1:n]:
            q = _product_of_densities(q, d)
        return q


@dataclass(frozen=True)
class Singular:
    betas: tuple
    prefix_product: Fraction
    ratio: Fraction


def _validate_pair(j: int, mu: BallMeasure, nu: BallMeasure):
    if mu.p != nu.p or mu.mode != nu.mode:
        raise ProductPairInvariantError(f"factor {j}: prime or mode mismatch")
    if not (mu.is_probability() and nu.is_probability()):
        raise ProductPairInvariantError(f"factor {j}: factors must be probability measures")


def kakutani_decide(pp: ProductPair) -> Equivalent | Singular:
    """Decide mu ~ nu or mu _|_ nu for the infinite products described by pp."""
    if not pp.factors:
        raise ProductPairInvariantError("a product pair needs at least one factor")
    p, mode = pp.factors[0][0].p, pp.factors[0][0].mode
    betas, dens = [], []
    for j, (mu, nu) in enumerate(pp.factors):
        _validate_pair(j, mu, nu)
        if (mu.p, mu.mode) != (p, mode):
            raise ProductPairInvariantError(f"factor {j}: prime or mode differs from factor 0")
        try:
            rho = density(mu, nu)
        except AbsoluteContinuityViolation as exc:
            raise ProductPairInvariantError(f"factor {j}: {exc}") from exc
        b = beta(mu, nu)
        if b > 1:
            raise ProductPairInvariantError(f"factor {j}: beta = {b} exceeds 1")
        betas.append(b)
        dens.append(rho)
    prefix = Fraction(1)
    for b in betas:
        prefix *= b
    if isinstance(pp.tail, GeometricTail):
        # prod beta <= prefix * ratio^k -> 0
        return Singular(tuple(betas), prefix, pp.tail.ratio)
    if prefix == 0:
        return Singular(tuple(betas), prefix, Fraction(0))
    return Equivalent(tuple(betas), prefix, tuple(dens))


@dataclass(frozen=True)
class Orthogonal:
    pass


@dataclass(frozen=True)
class Overlapping:
    witness: tuple


def orthogonality_check(mu1: BallMeasure, mu2: BallMeasure) -> Orthogonal | Overlapping:
    """mu1 _|_ mu2 iff N_mu1(x) N_mu2(x) = 0 at every x.

    For finitely supported cell measures the pointwise norms vanish exactly
    off the supports, so this is support disjointness in both modes.
    """
    if (mu1.p, mu1.n, mu1.m) != (mu2.p, mu2.n, mu2.m):
        raise ValueError("orthogonality needs measures on the same cells")
    for c, w in mu1.cells.items():
        if mu1.mode.abs(w) * mu2.mode.abs(mu2.cells.get(c, 0)):
            return Overlapping(c)
    return Orthogonal()


def _product_of_densities(d1: DensityFn, d2: DensityFn) -> DensityFn:
    table = {c1 + c2: v1 * v2 for c1, v1 in d1.table.items() for c2, v2 in d2.table.items()}
    return DensityFn(d1.p, d1.n + d2.n, d1.m, table)


def product_density(
    mu1: BallMeasure, nu1: BallMeasure, mu2: BallMeasure, nu2: BallMeasure
) -> DensityFn:
    """d(mu1 x mu2)/d(nu1 x nu2) as the product of the factor densities."""
    d1, d2 = density(mu1, nu1), density(mu2, nu2)
    if d1.m != d2.m:
        raise ValueError("factor densities must share a resolution")
    return _product_of_densities(d1, d2)
