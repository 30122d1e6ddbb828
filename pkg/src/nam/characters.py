"""p-power roots of unity, the cyclotomic ring they span, and characters of Q_p.

A character chi_xi(x) = exp(2 pi i {xi x}_p) only ever takes values that are
p^k-th roots of unity, so character sums weighted by rationals live in
Q(zeta_{p^k}). :class:`CyclotomicElement` stores such sums exactly in the
power basis 1, zeta, ..., zeta^(phi(p^k)-1).
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from nam.errors import PrimeMismatchError
from nam.padic import PadicScalar, _vp_int, as_fraction, frac_part


def totient(p: int, k: int) -> int:
    return 1 if k == 0 else p ** (k - 1) * (p - 1)


@dataclass(frozen=True)
class RootOfUnity:
    """exp(2 pi i * angle) with angle in [0, 1) having a p-power denominator."""

    p: int
    angle: Fraction

    def __post_init__(self):
        a = as_fraction(self.angle) % 1
        if a.denominator != self.p ** _vp_int(a.denominator, self.p):
            raise ValueError(f"angle {a} is not a p-power root for p={self.p}")
        object.__setattr__(self, "angle", a)

    @property
    def level(self) -> int:
        return _vp_int(self.angle.denominator, self.p)

    @property
    def order(self) -> int:
        return self.angle.denominator

    def __mul__(self, other: RootOfUnity) -> RootOfUnity:
        if other.p != self.p:
            raise PrimeMismatchError("roots of unity over different primes")
        return RootOfUnity(self.p, self.angle + other.angle)

    def inverse(self) -> RootOfUnity:
        return RootOfUnity(self.p, -self.angle)

    def to_cyclotomic(self) -> CyclotomicElement:
        k = self.level
        return CyclotomicElement.from_exponents(
            self.p, k, {self.angle.numerator: Fraction(1)}
        )

    def complex_approx(self) -> complex:
        return cmath.exp(2j * cmath.pi * float(self.angle))


def character(xi, x, p: int | None = None) -> RootOfUnity:
    """chi_xi(x) = exp(2 pi i {xi * x}_p)."""
    if p is None:
        primes = {v.p for v in (xi, x) if isinstance(v, PadicScalar)}
        if len(primes) != 1:
            raise PrimeMismatchError("character needs a single prime")
        (p,) = primes
    return RootOfUnity(p, frac_part(as_fraction(xi) * as_fraction(x), p))


def _reduce(p: int, k: int, exps: Mapping[int, Fraction]) -> tuple[Fraction, ...]:
    """Power-basis coordinates of sum c_e zeta_{p^k}^e."""
    if k == 0:
        return (sum(exps.values(), Fraction(0)),)
    N = p**k
    phi = totient(p, k)
    h = p ** (k - 1)
    out = [Fraction(0)] * phi
    for e, c in exps.items():
        if not c:
            continue
        e %= N
        if e < phi:
            out[e] += c
        else:
            # zeta^(phi + r) = -sum_{j<p-1} zeta^(r + j h)
            r = e - phi
            for j in range(p - 1):
                out[r + j * h] -= c
    return tuple(out)


class CyclotomicElement:
    """Exact element of Q(zeta_{p^k}) in the power basis.

    Arithmetic between elements of different levels lifts the lower one.
    Equality compares at a common level, so an element does not depend on
    the level it happens to be stored at.
    """

    __slots__ = ("p", "level", "coeffs", "_hash")

    def __init__(self, p: int, level: int, coeffs: Iterable):
        coeffs = tuple(as_fraction(c) for c in coeffs)
        if len(coeffs) != totient(p, level):
            raise ValueError(
                f"level {level} over p={p} needs {totient(p, level)} coefficients"
            )
        self.p = p
        self.level = level
        self.coeffs = coeffs
        self._hash = None

    @classmethod
    def from_exponents(cls, p: int, level: int, exps: Mapping[int, Fraction]):
        return cls(p, level, _reduce(p, level, exps))

    @classmethod
    def rational(cls, p: int, value) -> CyclotomicElement:
        return cls(p, 0, (as_fraction(value),))

    @classmethod
    def zero(cls, p: int) -> CyclotomicElement:
        return cls.rational(p, 0)

    @classmethod
    def one(cls, p: int) -> CyclotomicElement:
        return cls.rational(p, 1)

    @classmethod
    def zeta(cls, p: int, level: int, power: int = 1) -> CyclotomicElement:
        return cls.from_exponents(p, level, {power: Fraction(1)})

    def lift_level(self, level: int) -> CyclotomicElement:
        if level < self.level:
            raise ValueError("lift_level cannot lower the level")
        if level == self.level:
            return self
        step = self.p ** (level - self.level)
        out = [Fraction(0)] * totient(self.p, level)
        for e, c in enumerate(self.coeffs):
            out[e * step] = c
        return CyclotomicElement(self.p, level, out)

    def minimal(self) -> CyclotomicElement:
        """The same element stored at the lowest level that contains it."""
        x = self
        while x.level > 0:
            if any(c for e, c in enumerate(x.coeffs) if e % x.p):
                break
            k = x.level - 1
            out = [Fraction(0)] * totient(x.p, k)
            for e in range(0, len(x.coeffs), x.p):
                out[e // x.p] = x.coeffs[e]
            x = CyclotomicElement(x.p, k, out)
        return x

    def _common(self, other):
        if isinstance(other, CyclotomicElement):
            if other.p != self.p:
                raise PrimeMismatchError("cyclotomic elements over different primes")
            k = max(self.level, other.level)
            return self.lift_level(k), other.lift_level(k)
        return self, CyclotomicElement.rational(self.p, other).lift_level(self.level)

    def __add__(self, other):
        a, b = self._common(other)
        return CyclotomicElement(a.p, a.level, (x + y for x, y in zip(a.coeffs, b.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return CyclotomicElement(self.p, self.level, (-c for c in self.coeffs))

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, CyclotomicElement):
            c = as_fraction(other)
            return CyclotomicElement(self.p, self.level, (c * x for x in self.coeffs))
        a, b = self._common(other)
        exps: dict[int, Fraction] = {}
        for i, x in enumerate(a.coeffs):
            if not x:
                continue
            for j, y in enumerate(b.coeffs):
                if y:
                    exps[i + j] = exps.get(i + j, Fraction(0)) + x * y
        return CyclotomicElement.from_exponents(a.p, a.level, exps)

    __rmul__ = __mul__

    def conjugate(self) -> CyclotomicElement:
        """Image under zeta -> zeta^-1 (complex conjugation)."""
        exps = {-e: c for e, c in enumerate(self.coeffs) if c}
        return CyclotomicElement.from_exponents(self.p, self.level, exps)

    def is_real(self) -> bool:
        return self.conjugate() == self

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def as_rational(self) -> Fraction:
        m = self.minimal()
        if m.level:
            raise ValueError(f"{self!r} is not rational")
        return m.coeffs[0]

    def complex_approx(self) -> complex:
        """Embedding into C sending zeta to exp(2 pi i / p^k); diagnostics only."""
        if self.level == 0:
            return complex(float(self.coeffs[0]), 0.0)
        N = self.p**self.level
        return sum(
            (float(c) * cmath.exp(2j * cmath.pi * e / N) for e, c in enumerate(self.coeffs) if c),
            0j,
        )

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = CyclotomicElement.rational(self.p, other)
        if not isinstance(other, CyclotomicElement):
            return NotImplemented
        if other.p != self.p:
            return False
        a, b = self._common(other)
        return a.coeffs == b.coeffs

    def __hash__(self):
        if self._hash is None:
            m = self.minimal()
            self._hash = hash((m.p, m.level, m.coeffs))
        return self._hash

    def __repr__(self):
        terms = [f"{c}*z^{e}" for e, c in enumerate(self.coeffs) if c]
        body = " + ".join(terms) if terms else "0"
        return f"CyclotomicElement(p={self.p}, level={self.level}: {body})"
