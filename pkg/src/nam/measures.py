"""Locally constant measures on Q_p^n.

A :class:`BallMeasure` at resolution ``m`` assigns rational weights to
finitely many balls of radius p^-m (cells). Everything it can answer is
answered exactly on the algebra those cells generate; finer questions raise
:class:`~nam.errors.ResolutionError` unless the measure is flagged
``refinable``, in which case a cell is split into p^n equal parts.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from nam.characters import CyclotomicElement
from nam.errors import (
    AdmissibilityError,
    ModeMismatchError,
    PrimeMismatchError,
    ResolutionError,
)
from nam.padic import (
    REAL,
    Mode,
    ValueScalar,
    _vp_int,
    as_fraction,
    canon,
    frac_part,
    pnorm,
    vp,
)

Center = tuple  # tuple[Fraction, ...]


def canon_vec(x: Iterable, p: int, m: int) -> Center:
    return tuple(canon(c, p, m) for c in x)


def vec_norm(x: Iterable, p: int) -> Fraction:
    """Max-norm of a vector in Q_p^n."""
    return max((pnorm(c, p) for c in x), default=Fraction(0))


def dot(z: Sequence, x: Sequence) -> Fraction:
    return sum((as_fraction(a) * as_fraction(b) for a, b in zip(z, x)), Fraction(0))


# -- clopen sets -------------------------------------------------------------


@dataclass(frozen=True)
class Box:
    """Product of coordinate balls {x : |x_i - center_i| <= p^-radii[i]}.

    A radius exponent of ``None`` leaves that coordinate unconstrained, which
    is how cylinder sets and plane neighbourhoods are expressed.
    """

    center: Center
    radii: tuple

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(as_fraction(c) for c in self.center))
        object.__setattr__(self, "radii", tuple(self.radii))
        if len(self.center) != len(self.radii):
            raise ValueError("box center and radii differ in dimension")

    @classmethod
    def ball(cls, center: Sequence, j: int) -> Box:
        """The max-norm ball B(center, p^-j)."""
        return cls(tuple(center), (j,) * len(center))

    @property
    def finest(self) -> int | None:
        finite = [j for j in self.radii if j is not None]
        return max(finite) if finite else None

    def contains_cell(self, cell: Center, p: int) -> bool:
        """Membership of a cell whose resolution is at least every radius."""
        for c, x, j in zip(self.center, cell, self.radii):
            if j is not None and canon(x, p, j) != canon(c, p, j):
                return False
        return True

    def extend(self, extra: int) -> Box:
        """The cylinder over this box after appending ``extra`` free coordinates."""
        return Box(self.center + (Fraction(0),) * extra, self.radii + (None,) * extra)


@dataclass(frozen=True)
class ClopenSet:
    """Finite union of boxes in Q_p^n."""

    n: int
    boxes: tuple = ()

    @classmethod
    def empty(cls, n: int) -> ClopenSet:
        return cls(n, ())

    @classmethod
    def whole(cls, n: int) -> ClopenSet:
        return cls(n, (Box((Fraction(0),) * n, (None,) * n),))

    @classmethod
    def ball(cls, center: Sequence, j: int) -> ClopenSet:
        return cls(len(center), (Box.ball(center, j),))

    @classmethod
    def of(cls, *boxes: Box) -> ClopenSet:
        return cls(len(boxes[0].center), tuple(boxes))

    @property
    def finest(self) -> int | None:
        finite = [b.finest for b in self.boxes if b.finest is not None]
        return max(finite) if finite else None

    def contains_cell(self, cell: Center, p: int) -> bool:
        return any(b.contains_cell(cell, p) for b in self.boxes)

    def union(self, other: ClopenSet) -> ClopenSet:
        return ClopenSet(self.n, self.boxes + other.boxes)

    def extend(self, extra: int) -> ClopenSet:
        return ClopenSet(self.n + extra, tuple(b.extend(extra) for b in self.boxes))


# -- measures ----------------------------------------------------------------


class BallMeasure:
    """Finitely supported weights on the radius-p^-m cells of Q_p^n."""

    __slots__ = ("p", "n", "m", "mode", "refinable", "_cells")

    def __init__(
        self,
        p: int,
        n: int,
        m: int,
        cells: Mapping | Iterable = (),
        mode: Mode = REAL,
        refinable: bool = False,
    ):
        if n < 1:
            raise ValueError("dimension must be >= 1")
        items = cells.items() if isinstance(cells, Mapping) else cells
        acc: dict[Center, Fraction] = {}
        for center, w in items:
            key = canon_vec(center, p, m)
            if len(key) != n:
                raise ValueError(f"center {center} is not in Q_{p}^{n}")
            acc[key] = acc.get(key, Fraction(0)) + as_fraction(w)
        self.p = p
        self.n = n
        self.m = m
        self.mode = mode
        self.refinable = refinable
        self._cells = {c: acc[c] for c in sorted(acc) if acc[c] != 0}

    @property
    def cells(self) -> Mapping[Center, Fraction]:
        return MappingProxyType(self._cells)

    def __len__(self):
        return len(self._cells)

    def __iter__(self) -> Iterator[tuple[Center, Fraction]]:
        return iter(self._cells.items())

    def __eq__(self, other):
        if not isinstance(other, BallMeasure):
            return NotImplemented
        return (
            (self.p, self.n, self.m, self.mode) == (other.p, other.n, other.m, other.mode)
            and self._cells == other._cells
        )

    def __hash__(self):
        return hash((self.p, self.n, self.m, self.mode, tuple(self._cells.items())))

    def __repr__(self):
        body = ", ".join(
            f"({', '.join(map(str, c))}): {w}" for c, w in self._cells.items()
        )
        return f"BallMeasure(p={self.p}, n={self.n}, m={self.m}, {self.mode}, {{{body}}})"

    def replace(self, cells=None, **kw) -> BallMeasure:
        args = dict(p=self.p, n=self.n, m=self.m, mode=self.mode, refinable=self.refinable)
        args.update(kw)
        return BallMeasure(cells=self._cells if cells is None else cells, **args)

    def cell_of(self, x: Sequence) -> Center:
        return canon_vec(x, self.p, self.m)

    def weight(self, x: Sequence) -> Fraction:
        return self._cells.get(self.cell_of(x), Fraction(0))

    def total_mass(self) -> Fraction:
        return sum(self._cells.values(), Fraction(0))

    def is_probability(self) -> bool:
        if self.total_mass() != 1:
            return False
        if self.mode.is_real:
            return all(w > 0 for w in self._cells.values())
        return norm(self) == 1


def dirac(p: int, n: int, m: int, at: Sequence | None = None, mode: Mode = REAL) -> BallMeasure:
    at = tuple(at) if at is not None else (0,) * n
    return BallMeasure(p, n, m, {tuple(at): 1}, mode=mode)


def haar(p: int, n: int, m: int, mode: Mode = REAL) -> BallMeasure:
    """Normalized Haar measure on Z_p^n seen at resolution m >= 0."""
    return haar_ball(p, n, m, (0,) * n, 0, mode)


def haar_ball(
    p: int, n: int, m: int, center: Sequence, j: int, mode: Mode = REAL
) -> BallMeasure:
    """Normalized Haar measure on B(center, p^-j), resolution m >= j."""
    if m < j:
        raise ResolutionError("haar_ball needs m >= j")
    base = canon_vec(center, p, j)
    w = Fraction(1, p ** (n * (m - j)))
    step = Fraction(p) ** j
    offsets = [step * k for k in range(p ** (m - j))]
    cells = {
        tuple(b + o for b, o in zip(base, off)): w
        for off in itertools.product(offsets, repeat=n)
    }
    return BallMeasure(p, n, m, cells, mode=mode, refinable=True)


# -- resolution changes --------------------------------------------------------


def coarsen(mu: BallMeasure, m: int) -> BallMeasure:
    """Pushforward of mu onto the coarser cell algebra at resolution m."""
    if m > mu.m:
        raise ResolutionError(f"cannot coarsen from m={mu.m} to finer m={m}")
    if m == mu.m:
        return mu
    return mu.replace(cells=list(mu._cells.items()), m=m)


def refine(mu: BallMeasure, m: int) -> BallMeasure:
    """Split every cell uniformly into resolution-m subcells."""
    if m < mu.m:
        raise ResolutionError("refine cannot lower the resolution; use coarsen")
    if m == mu.m:
        return mu
    if not mu.refinable:
        raise ResolutionError(
            f"measure at resolution {mu.m} is not refinable to {m}"
        )
    p, n = mu.p, mu.n
    scale = Fraction(1, p ** (n * (m - mu.m)))
    step = Fraction(p) ** mu.m
    offsets = [step * k for k in range(p ** (m - mu.m))]
    cells = {}
    for c, w in mu._cells.items():
        for off in itertools.product(offsets, repeat=n):
            cells[tuple(a + o for a, o in zip(c, off))] = w * scale
    return mu.replace(cells=cells, m=m)


def at_resolution(mu: BallMeasure, m: int) -> BallMeasure:
    return coarsen(mu, m) if m <= mu.m else refine(mu, m)


def _unify(mu1: BallMeasure, mu2: BallMeasure, same_n: bool = True):
    if mu1.p != mu2.p:
        raise PrimeMismatchError("measures over different primes")
    if mu1.mode != mu2.mode:
        raise ModeMismatchError(f"{mu1.mode} vs {mu2.mode}")
    if same_n and mu1.n != mu2.n:
        raise ValueError(f"dimensions differ: {mu1.n} vs {mu2.n}")
    m = max(mu1.m, mu2.m)
    return refine(mu1, m), refine(mu2, m)


def _aligned(mu: BallMeasure, finest: int | None) -> BallMeasure:
    if finest is None or finest <= mu.m:
        return mu
    if not mu.refinable:
        raise ResolutionError(
            f"query at resolution {finest} is finer than the measure's {mu.m}"
        )
    return refine(mu, finest)


# -- evaluation --------------------------------------------------------------


def measure_of(mu: BallMeasure, A: ClopenSet) -> ValueScalar:
    """mu(A) for a clopen set A built from boxes."""
    mu = _aligned(mu, A.finest)
    total = sum(
        (w for c, w in mu._cells.items() if A.contains_cell(c, mu.p)), Fraction(0)
    )
    return ValueScalar(total, mu.mode)


def norm(mu: BallMeasure) -> Fraction:
    """||X||_mu: total variation (real) or max |w|_s (s-adic)."""
    return restricted_norm(mu, None)


def restricted_norm(mu: BallMeasure, A: ClopenSet | None) -> Fraction:
    """||A||_mu, the norm of mu restricted to A."""
    if A is not None:
        mu = _aligned(mu, A.finest)
    ws = [w for c, w in mu._cells.items() if A is None or A.contains_cell(c, mu.p)]
    if mu.mode.is_real:
        return sum((abs(w) for w in ws), Fraction(0))
    return max((mu.mode.abs(w) for w in ws), default=Fraction(0))


def pointwise_norm(mu: BallMeasure, x: Sequence) -> Fraction:
    """N_mu(x): the mode's absolute value of the weight of x's cell."""
    return mu.mode.abs(mu.weight(x))


class LocallyConstantFn:
    """A function on Q_p^n that is constant on radius-p^-m cells.

    Values may be rationals, :class:`~nam.padic.PadicScalar` or
    :class:`~nam.characters.CyclotomicElement`; anything closed under
    multiplication by rationals and addition works.
    """

    def __init__(self, p: int, n: int, m: int | None, rule: Callable[[Center], object]):
        # m is None for functions constant on all of Q_p^n
        self.p, self.n, self.m = p, n, m
        self._rule = rule

    @classmethod
    def from_table(cls, p: int, n: int, m: int, table: Mapping, default=Fraction(0)):
        t = {canon_vec(c, p, m): v for c, v in table.items()}
        return cls(p, n, m, lambda c: t.get(c, default))

    @classmethod
    def constant(cls, p: int, n: int, value) -> LocallyConstantFn:
        return cls(p, n, None, lambda c: value)

    @classmethod
    def indicator(cls, A: ClopenSet, p: int, m: int | None = None) -> LocallyConstantFn:
        m = A.finest if m is None else m
        if m is None:
            return cls.constant(p, A.n, Fraction(1))
        return cls(p, A.n, m, lambda c: Fraction(1) if A.contains_cell(c, p) else Fraction(0))

    def __call__(self, x: Sequence):
        if self.m is None:
            return self._rule(tuple(x))
        return self._rule(canon_vec(x, self.p, self.m))

    def __mul__(self, other: LocallyConstantFn) -> LocallyConstantFn:
        if not isinstance(other, LocallyConstantFn):
            c = other
            return LocallyConstantFn(self.p, self.n, self.m, lambda x: self._rule(x) * c)
        ms = [k for k in (self.m, other.m) if k is not None]
        m = max(ms) if ms else None
        return LocallyConstantFn(self.p, self.n, m, lambda x: self(x) * other(x))


def integrate(f: LocallyConstantFn, mu: BallMeasure):
    """sum_i f(c_i) w_i over the cells of mu."""
    if f.p != mu.p or f.n != mu.n:
        raise ValueError("integrand and measure live on different spaces")
    mu = _aligned(mu, f.m)
    total = Fraction(0)
    for c, w in mu._cells.items():
        total = f(c) * w + total
    return total


# -- Fourier-Stieltjes transform ---------------------------------------------


def admissible(mu: BallMeasure, z: Sequence) -> bool:
    return all(vp(zj, mu.p) >= -mu.m for zj in z)


def fourier_stieltjes(mu: BallMeasure, z: Sequence) -> CyclotomicElement:
    """theta_mu(z) = sum_i w_i chi(z . c_i), exact in Q(zeta_{p^k})."""
    p = mu.p
    z = tuple(as_fraction(v) for v in z)
    if len(z) != mu.n:
        raise ValueError(f"transform argument has dimension {len(z)}, expected {mu.n}")
    if not admissible(mu, z):
        raise AdmissibilityError(
            f"|z| exceeds p^{mu.m}; the character is not constant on cells"
        )
    angles: dict[Fraction, Fraction] = {}
    for c, w in mu._cells.items():
        a = frac_part(dot(z, c), p)
        angles[a] = angles.get(a, Fraction(0)) + w
    level = max((_vp_int(a.denominator, p) for a in angles), default=0)
    N = p**level
    exps = {int(a * N): w for a, w in angles.items()}
    return CyclotomicElement.from_exponents(p, level, exps).minimal()


def admissible_lattice(p: int, n: int, m: int, span: int = 0) -> Iterator[tuple]:
    """Representatives of p^-m Z_p^n modulo p^span Z_p^n.

    With ``span = 0`` this is a complete set of distinct characters for
    measures supported in Z_p^n.
    """
    base = Fraction(1, p**m) if m >= 0 else Fraction(p ** (-m))
    ks = range(p ** (m + span))
    for k in itertools.product(ks, repeat=n):
        yield tuple(base * kk for kk in k)


def lattice_span(*measures: BallMeasure) -> int:
    """Smallest span making :func:`admissible_lattice` complete for these measures."""
    worst = 0
    for mu in measures:
        for c in mu.cells:
            for x in c:
                if x:
                    worst = max(worst, -vp(x, mu.p))
    return worst


def transform_lattice(*measures: BallMeasure) -> list[tuple]:
    """Admissible arguments for every measure given, one per distinct character.

    Complete (every character seen by the measures appears once) when all
    measures share a resolution.
    """
    mu = measures[0]
    m = min(nu.m for nu in measures)
    return list(admissible_lattice(mu.p, mu.n, m, lattice_span(*measures)))


# -- algebra of measures -----------------------------------------------------


def convolve(mu1: BallMeasure, mu2: BallMeasure) -> BallMeasure:
    """mu1 * mu2; cells add because B(x, r) + B(y, r) = B(x + y, r)."""
    a, b = _unify(mu1, mu2)
    cells: dict[Center, Fraction] = {}
    p, m = a.p, a.m
    for c1, w1 in a._cells.items():
        for c2, w2 in b._cells.items():
            key = tuple(canon(x + y, p, m) for x, y in zip(c1, c2))
            cells[key] = cells.get(key, Fraction(0)) + w1 * w2
    return a.replace(cells=cells, refinable=a.refinable and b.refinable)


def product_measure(mu1: BallMeasure, mu2: BallMeasure) -> BallMeasure:
    a, b = _unify(mu1, mu2, same_n=False)
    cells = {
        c1 + c2: w1 * w2 for c1, w1 in a._cells.items() for c2, w2 in b._cells.items()
    }
    return a.replace(cells=cells, n=a.n + b.n, refinable=a.refinable and b.refinable)


def projection_matrix(n: int, keep: Sequence[int]) -> list[list[Fraction]]:
    return [[Fraction(int(j == i)) for j in range(n)] for i in keep]


def pushforward_resolution(mu: BallMeasure, T: Sequence[Sequence]) -> int:
    """Finest resolution at which every cell of mu maps into a single cell."""
    vals = [vp(t, mu.p) for row in T for t in row if as_fraction(t) != 0]
    return mu.m + min(vals) if vals else mu.m


def pushforward(mu: BallMeasure, T: Sequence[Sequence], m: int | None = None) -> BallMeasure:
    """Image of mu under x -> T x, T given as rows over the input coordinates."""
    T = [[as_fraction(t) for t in row] for row in T]
    if any(len(row) != mu.n for row in T) or not T:
        raise ValueError(f"matrix must have {mu.n} columns")
    finest = pushforward_resolution(mu, T)
    if m is None:
        m = finest
    elif m > finest:
        raise ResolutionError(
            f"image cells are only coherent up to resolution {finest}, not {m}"
        )
    cells = [(tuple(dot(row, c) for row in T), w) for c, w in mu._cells.items()]
    return BallMeasure(mu.p, len(T), m, cells, mode=mu.mode)


def marginal(mu: BallMeasure, keep: Sequence[int]) -> BallMeasure:
    """Pushforward onto the listed coordinates (0-based)."""
    cells = [(tuple(c[i] for i in keep), w) for c, w in mu._cells.items()]
    return BallMeasure(mu.p, len(keep), mu.m, cells, mode=mu.mode, refinable=mu.refinable)


def negate(mu: BallMeasure) -> BallMeasure:
    return mu.replace(cells=[(tuple(-x for x in c), w) for c, w in mu._cells.items()])


def is_symmetric(mu: BallMeasure) -> bool:
    return negate(mu) == mu


# -- moments and tail estimates ---------------------------------------------


def weak_q_moment(mu: BallMeasure, z: Sequence, q) -> tuple:
    """psi_{q,mu}(z) = integral of |z . x|_p^q, with a truncation bound.

    On cells where |z . x|_p is not constant (those with
    |z . c| <= |z| p^-m, the cell of the kernel of z) the integrand is
    taken as 0 and the worst case (|z| p^-m)^q |w| is added to the bound.
    Integer q gives exact rationals; other q gives floats.
    """
    if not mu.mode.is_real:
        raise ModeMismatchError("weak q-moments are defined for real measures only")
    if q <= 0:
        raise ValueError("q must be positive")
    exact = isinstance(q, int) or (isinstance(q, Fraction) and q.denominator == 1)
    power = (lambda r: r ** int(q)) if exact else (lambda r: float(r) ** float(q))
    p = mu.p
    zn = vec_norm(z, p)
    fuzz = zn * Fraction(p) ** -mu.m
    value = Fraction(0) if exact else 0.0
    bound = Fraction(0) if exact else 0.0
    for c, w in mu._cells.items():
        r = pnorm(dot(z, c), p)
        if r > fuzz:
            value += power(r) * (w if exact else float(w))
        elif fuzz:
            bound += power(fuzz) * (abs(w) if exact else float(abs(w)))
    return value, bound


def symmetric_tail_inequality_check(
    mu: BallMeasure, nu: BallMeasure, l, slack: float = 1e-9
) -> bool:
    """Check mu({x : nu^(x) <= l}) <= integral (1 - mu^) dnu / (1 - l).

    ``nu`` must be a symmetric real probability measure so that nu^ is real.
    Both transforms are evaluated on the other measure's cells, which
    requires every center of one measure to be admissible for the other.
    Cells whose nu^ value is within ``slack`` of ``l`` are counted on the
    left-hand side.
    """
    if not (mu.mode.is_real and nu.mode.is_real):
        raise ModeMismatchError("the tail inequality is stated for real measures")
    if not is_symmetric(nu):
        raise ValueError("nu must be symmetric")
    l = float(l)
    if not 0 < l < 1:
        raise ValueError("l must lie in (0, 1)")
    if not all(admissible(nu, c) for c in mu.cells) or not all(
        admissible(mu, c) for c in nu.cells
    ):
        raise AdmissibilityError("supports are too spread for the cell resolutions")
    lhs = 0.0
    for c, w in mu.cells.items():
        if fourier_stieltjes(nu, c).complex_approx().real <= l + slack:
            lhs += float(w)
    rhs_exact = sum(
        ((1 - fourier_stieltjes(mu, c)) * w for c, w in nu.cells.items()),
        CyclotomicElement.zero(mu.p),
    )
    rhs = rhs_exact.complex_approx().real / (1 - l)
    return lhs <= rhs + slack
