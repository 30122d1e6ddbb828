"""Exact arithmetic in Q_p carried by rationals.

Every p-adic number handled here is a rational, so valuations, norms and
digit expansions are computed exactly. Functions taking a bare ``p`` work
on plain :class:`fractions.Fraction` values; :class:`PadicScalar` bundles a
rational with its prime for callers that prefer a value type.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Union

from nam.errors import PrimeMismatchError

INF = math.inf

RationalLike = Union[int, Fraction, str, "PadicScalar"]


def as_fraction(x) -> Fraction:
    if isinstance(x, PadicScalar):
        return x.value
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, str, Rational)):
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % d for d in range(2, math.isqrt(p) + 1))


def _vp_int(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def vp(x, p: int):
    """Return v_p(x), or ``math.inf`` for zero."""
    x = as_fraction(x)
    if x == 0:
        return INF
    return _vp_int(abs(x.numerator), p) - _vp_int(x.denominator, p)


def pnorm(x, p: int) -> Fraction:
    """|x|_p as an exact rational power of p (0 for x = 0)."""
    v = vp(x, p)
    if v == INF:
        return Fraction(0)
    return Fraction(p) ** -v


def frac_part(y, p: int) -> Fraction:
    """The p-adic fractional part {y}_p.

    Sum of the negative-index digits of ``y``; the result lies in [0, 1),
    has a power of p as denominator and differs from ``y`` by an element
    of Z_p.
    """
    y = as_fraction(y)
    k = _vp_int(y.denominator, p)
    if k == 0:
        return Fraction(0)
    pk = p**k
    unit = y.denominator // pk
    digits = (y.numerator * pow(unit, -1, pk)) % pk
    return Fraction(digits, pk)


def canon(x, p: int, m: int) -> Fraction:
    """Canonical representative of x modulo p^m Z_p.

    The result is a rational in [0, p^m) with a p-power denominator; two
    rationals share a radius-p^-m ball iff their representatives agree.
    """
    scale = Fraction(p) ** m
    return scale * frac_part(as_fraction(x) / scale, p)


def round_up_to_value_group(r, p: int) -> Fraction:
    """Smallest power of p that is >= r (0 maps to 0).

    Accepts a nonnegative rational or float. For positive r the result is
    at most p*r.
    """
    if r < 0:
        raise ValueError("round_up_to_value_group needs r >= 0")
    if r == 0:
        return Fraction(0)
    if isinstance(r, float):
        r = Fraction(r)
    r = as_fraction(r)
    # integer estimate of log_p r, corrected by at most a couple of steps
    j = math.floor(
        (math.log(r.numerator) - math.log(r.denominator)) / math.log(p)
    )
    g = Fraction(p) ** j
    while g < r:
        g *= p
    while g / p >= r:
        g /= p
    return g


# certified enclosure of pi^2; refined on demand via interval arithmetic
PI_SQUARED_ENCLOSURE = (Fraction(9869604401, 10**9), Fraction(9869604404, 10**9))


def pi_squared_enclosure(dps: int | None = None) -> tuple[Fraction, Fraction]:
    """Rational bounds lo < pi^2 < hi.

    With ``dps`` unset the fixed nine-digit enclosure is returned; otherwise
    mpmath interval arithmetic produces outward-rounded bounds at ``dps``
    decimal digits.
    """
    if dps is None:
        return PI_SQUARED_ENCLOSURE
    return _pi_squared_bounds(dps)


def round_up_pi_squared_multiple(coeff, p: int) -> Fraction:
    """round_up_to_value_group(|coeff| * pi^2, p) without floating point.

    Starts from the fixed enclosure and tightens it with interval arithmetic
    only when a power of p falls inside the enclosure of the product.
    """
    c = abs(as_fraction(coeff))
    if c == 0:
        return Fraction(0)
    lo, hi = PI_SQUARED_ENCLOSURE
    dps = 20
    while True:
        g_lo = round_up_to_value_group(c * lo, p)
        g_hi = round_up_to_value_group(c * hi, p)
        if g_lo == g_hi:
            return g_hi
        lo, hi = _pi_squared_bounds(dps)
        dps *= 2


def _pi_squared_bounds(dps: int) -> tuple[Fraction, Fraction]:
    from mpmath import iv
    from mpmath.libmp import to_rational

    old = iv.dps
    try:
        iv.dps = dps
        lo, hi = (iv.pi**2)._mpi_
        return Fraction(*map(int, to_rational(lo))), Fraction(*map(int, to_rational(hi)))
    finally:
        iv.dps = old


@dataclass(frozen=True)
class PadicScalar:
    """A rational viewed as an element of Q_p."""

    p: int
    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, "value", as_fraction(self.value))

    def _coerce(self, other) -> Fraction:
        if isinstance(other, PadicScalar):
            if other.p != self.p:
                raise PrimeMismatchError(f"Q_{self.p} vs Q_{other.p}")
            return other.value
        return as_fraction(other)

    def valuation(self):
        return vp(self.value, self.p)

    def norm(self) -> Fraction:
        return pnorm(self.value, self.p)

    def fractional_part(self) -> Fraction:
        return frac_part(self.value, self.p)

    def __add__(self, other):
        return PadicScalar(self.p, self.value + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return PadicScalar(self.p, self.value - self._coerce(other))

    def __rsub__(self, other):
        return PadicScalar(self.p, self._coerce(other) - self.value)

    def __mul__(self, other):
        return PadicScalar(self.p, self.value * self._coerce(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        d = self._coerce(other)
        if d == 0:
            raise ZeroDivisionError("division by zero in Q_p")
        return PadicScalar(self.p, self.value / d)

    def __rtruediv__(self, other):
        if self.value == 0:
            raise ZeroDivisionError("division by zero in Q_p")
        return PadicScalar(self.p, self._coerce(other) / self.value)

    def __neg__(self):
        return PadicScalar(self.p, -self.value)

    def __eq__(self, other):
        if isinstance(other, PadicScalar):
            return self.p == other.p and self.value == other.value
        if isinstance(other, (int, Fraction)):
            return self.value == other
        return NotImplemented

    def __hash__(self):
        return hash((self.p, self.value))

    def __repr__(self):
        return f"PadicScalar(p={self.p}, value={self.value})"


def valuation(x: PadicScalar):
    return x.valuation()


def norm(x: PadicScalar) -> Fraction:
    return x.norm()


def fractional_part(x: PadicScalar) -> Fraction:
    return x.fractional_part()


@dataclass(frozen=True)
class Mode:
    """Codomain of a measure: the reals, or Q_s for a prime s."""

    s: int | None = None

    @property
    def is_real(self) -> bool:
        return self.s is None

    def abs(self, x) -> Fraction:
        """Absolute value in this mode (archimedean or s-adic)."""
        x = as_fraction(x)
        if self.s is None:
            return abs(x)
        return pnorm(x, self.s)

    def __str__(self):
        return "real" if self.s is None else f"sadic({self.s})"


REAL = Mode()


def Sadic(s: int) -> Mode:
    if not is_prime(s):
        raise ValueError(f"s-adic mode needs a prime, got {s}")
    return Mode(s)


@dataclass(frozen=True)
class ValueScalar:
    """A measure value tagged with the mode it must be normed in."""

    value: Fraction
    mode: Mode = REAL

    def norm(self) -> Fraction:
        return self.mode.abs(self.value)
