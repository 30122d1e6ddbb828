"""Weak distributions: consistent towers of finite-dimensional projections.

A :class:`WeakDistribution` stores finitely many levels mu_1, mu_2, ... on
Q_p^{k_1} c Q_p^{k_2} c ..., where each subspace is spanned by the leading
coordinates of c_0. Every "for all n" condition is checked over the stored
levels only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from nam.errors import ModeMismatchError, PrimeMismatchError, ResolutionError
from nam.measures import (
    BallMeasure,
    Box,
    ClopenSet,
    LocallyConstantFn,
    at_resolution,
    integrate,
    marginal,
    measure_of,
    restricted_norm,
    vec_norm,
)
from nam.padic import (
    Mode,
    PadicScalar,
    ValueScalar,
    as_fraction,
    frac_part,
    round_up_pi_squared_multiple,
    vp,
)


@dataclass(frozen=True)
class WeakDistribution:
    p: int
    mode: Mode
    dims: tuple
    levels: tuple

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(self.dims))
        object.__setattr__(self, "levels", tuple(self.levels))
        if len(self.dims) != len(self.levels):
            raise ValueError("one dimension per level is required")
        if any(a >= b for a, b in zip(self.dims, self.dims[1:])):
            raise ValueError(f"dimensions must increase strictly: {self.dims}")
        for k, mu in zip(self.dims, self.levels):
            if mu.p != self.p:
                raise PrimeMismatchError(f"level over Q_{mu.p} in a Q_{self.p} family")
            if mu.mode != self.mode:
                raise ModeMismatchError(f"level in mode {mu.mode}, family in {self.mode}")
            if mu.n != k:
                raise ValueError(f"level declared dimension {k} but measure has {mu.n}")

    @classmethod
    def from_marginals(cls, mu: BallMeasure, dims: Sequence[int]) -> WeakDistribution:
        """Levels obtained by dropping trailing coordinates of one measure."""
        levels = [marginal(mu, range(k)) for k in dims]
        return cls(mu.p, mu.mode, tuple(dims), tuple(levels))

    @classmethod
    def from_factors(cls, factors: Sequence[BallMeasure]) -> WeakDistribution:
        """Levels mu_1 x ... x mu_j of successive product measures."""
        from nam.measures import product_measure

        levels = [factors[0]]
        for f in factors[1:]:
            levels.append(product_measure(levels[-1], f))
        return cls(factors[0].p, factors[0].mode, tuple(l.n for l in levels), tuple(levels))


@dataclass(frozen=True)
class ConsistencyReport:
    ok: bool
    pair: tuple | None = None
    discrepancy: dict = field(default_factory=dict)


def _projected(wd: WeakDistribution, upper: int, lower: int) -> BallMeasure:
    mu = marginal(wd.levels[upper], range(wd.dims[lower]))
    return at_resolution(mu, wd.levels[lower].m)


def check_consistency(wd: WeakDistribution, upto: int | None = None) -> ConsistencyReport:
    """Verify mu_j = (mu_{j+1}) pushed to the first k_j coordinates, exactly."""
    last = len(wd.levels) - 1 if upto is None else upto
    for j in range(last):
        lower = wd.levels[j]
        proj = _projected(wd, j + 1, j)
        if proj != lower:
            keys = set(proj.cells) | set(lower.cells)
            diff = {
                c: proj.cells.get(c, Fraction(0)) - lower.cells.get(c, Fraction(0))
                for c in sorted(keys)
            }
            return ConsistencyReport(False, (j, j + 1), {c: d for c, d in diff.items() if d})
    return ConsistencyReport(True)


@dataclass(frozen=True)
class TightnessEntry:
    c: Fraction
    r: Fraction
    passed: bool
    witness_level: int | None
    outside: tuple
    sup_norm: Fraction


def _outside_ball(mu: BallMeasure, r: Fraction) -> Fraction:
    if r < Fraction(mu.p) ** -mu.m:
        raise ResolutionError(f"radius {r} is below the cell radius p^-{mu.m}")
    out = [w for c, w in mu.cells.items() if vec_norm(c, mu.p) > r]
    if mu.mode.is_real:
        return sum((abs(w) for w in out), Fraction(0))
    return max((mu.mode.abs(w) for w in out), default=Fraction(0))


def check_tightness(wd: WeakDistribution, schedule: Sequence[tuple]) -> list[TightnessEntry]:
    """Tightness test at each (c, r) of ``schedule``.

    Real mode measures |mu_n|(L_n) - |mu_n|(B(0, r)), the variation outside
    the ball; s-adic mode measures ||L_n minus B(0, r)||. A pair passes when
    that quantity is <= c at every stored level. The witness is the first
    failing level.
    """
    from nam.measures import norm

    sup = max((norm(mu) for mu in wd.levels), default=Fraction(0))
    report = []
    for c, r in schedule:
        c, r = as_fraction(c), as_fraction(r)
        outside = tuple(_outside_ball(mu, r) for mu in wd.levels)
        bad = [j for j, v in enumerate(outside) if v > c]
        report.append(
            TightnessEntry(c, r, not bad, bad[0] if bad else None, outside, sup)
        )
    return report


@dataclass(frozen=True)
class CylinderSet:
    """P^-1(base) for the projection onto level ``level``."""

    level: int
    base: ClopenSet


def lift_cylinder(wd: WeakDistribution, C: CylinderSet, level: int) -> CylinderSet:
    """The same cylinder expressed through a higher level."""
    if level < C.level:
        raise ValueError("a cylinder can only be re-expressed at a higher level")
    extra = wd.dims[level] - wd.dims[C.level]
    return CylinderSet(level, C.base.extend(extra))


def _require_consistent(wd: WeakDistribution, level: int):
    rep = check_consistency(wd, upto=level)
    if not rep.ok:
        raise ValueError(f"weak distribution is inconsistent at levels {rep.pair}")


def cylinder_evaluate(wd: WeakDistribution, C: CylinderSet) -> ValueScalar:
    _require_consistent(wd, C.level)
    return measure_of(wd.levels[C.level], C.base)


def integrate_cylinder(wd: WeakDistribution, level: int, phi: LocallyConstantFn):
    _require_consistent(wd, level)
    return integrate(phi, wd.levels[level])


def plane_concentration(mu: BallMeasure, k: int, c) -> Fraction:
    """Mass (real) or norm (s-adic) of {x : |x_j| <= c for all j > k}."""
    if not 0 <= k <= mu.n:
        raise ValueError(f"k must lie in [0, {mu.n}]")
    c = as_fraction(c)
    if c <= 0:
        raise ValueError("c must be positive")
    # largest power of p not exceeding c
    j = -vp(c, mu.p)
    while Fraction(mu.p) ** -j > c:
        j += 1
    while Fraction(mu.p) ** -(j - 1) <= c:
        j -= 1
    box = Box((Fraction(0),) * mu.n, (None,) * k + (j,) * (mu.n - k))
    A = ClopenSet(mu.n, (box,))
    if mu.mode.is_real:
        return measure_of(mu, A).value
    return restricted_norm(mu, A)


@dataclass(frozen=True)
class MinlosWitness:
    """J(j,l) = pi^2 * j_coeff[j][l]; g is |J| rounded up into p^Z; xi has |xi| = g."""

    j_coeff: tuple
    g: tuple
    xi: tuple


def minlos_sazonov_witness(mu: BallMeasure, r) -> MinlosWitness:
    """Second moments of the fractional parts over B(0, r), rounded into p^Z.

    J(j,l) = 2 pi^2 sum_{cells in B(0,r)} {c_j}_p {c_l}_p w carries pi^2
    symbolically; rounding |J| up to a power of p uses a certified rational
    enclosure of pi^2.
    """
    if not mu.mode.is_real:
        raise ModeMismatchError("the Minlos-Sazonov witness needs a real measure")
    if mu.m < 0:
        raise ResolutionError("fractional parts are not constant on cells with m < 0")
    r = as_fraction(r)
    if r < Fraction(mu.p) ** -mu.m:
        raise ResolutionError(f"radius {r} is below the cell radius p^-{mu.m}")
    p, n = mu.p, mu.n
    acc = [[Fraction(0)] * n for _ in range(n)]
    for c, w in mu.cells.items():
        if vec_norm(c, p) > r:
            continue
        eta = [frac_part(x, p) for x in c]
        for a in range(n):
            if eta[a]:
                for b in range(n):
                    acc[a][b] += 2 * eta[a] * eta[b] * w
    g = [[round_up_pi_squared_multiple(v, p) for v in row] for row in acc]
    xi = [[PadicScalar(p, 1 / v if v else 0) for v in row] for row in g]
    return MinlosWitness(
        tuple(map(tuple, acc)), tuple(map(tuple, g)), tuple(map(tuple, xi))
    )


@dataclass(frozen=True)
class SazonovWitness:
    radii: tuple
    captured: Fraction
    pad: Fraction


def _box_value(mu: BallMeasure, radii) -> Fraction:
    inside = [
        w
        for c, w in mu.cells.items()
        if all(vec_norm((x,), mu.p) <= rad for x, rad in zip(c, radii))
    ]
    if mu.mode.is_real:
        return sum(inside, Fraction(0))
    return max((mu.mode.abs(w) for w in inside), default=Fraction(0))


def sazonov_witness(mu: BallMeasure, eps) -> SazonovWitness:
    """A minimal resolution-aligned box L(0, z) holding at least 1 - eps.

    Real measures are judged by mass, s-adic ones by the norm of the
    restriction. Coordinates beyond ``mu.n`` are padded by the cell radius
    ``pad``. Minimality is with respect to the coordinatewise order: the
    result is a fixed point of shrinking single coordinates, and no
    coordinate can be lowered on its own.
    """
    eps = as_fraction(eps)
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    p = mu.p
    pad = Fraction(p) ** -mu.m
    target = 1 - eps
    candidates = []
    for i in range(mu.n):
        vals = {max(vec_norm((c[i],), p), pad) for c in mu.cells}
        candidates.append(sorted(vals | {pad}))
    radii = [cand[-1] for cand in candidates]
    if _box_value(mu, radii) < target:
        raise ValueError("the whole support does not reach 1 - eps; is mu a probability?")
    changed = True
    while changed:
        changed = False
        for i, cand in enumerate(candidates):
            for v in cand:
                if v >= radii[i]:
                    break
                trial = radii[:i] + [v] + radii[i + 1 :]
                if _box_value(mu, trial) >= target:
                    radii = trial
                    changed = True
                    break
    return SazonovWitness(tuple(radii), _box_value(mu, radii), pad)
