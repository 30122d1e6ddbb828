"""Radial Gaussian-like measures nu_xi(dx) = C(xi) exp(-|x xi|^2) m(dx).

The density is not locally constant near 0, so this is the one constructor
whose weights are floating point. The weights are stored as the exact
binary values of those floats; every approximation they carry is accounted
for in the bounds attached to :class:`RadialGaussian`.

The measure is assembled sphere by sphere: the norm sphere {|x| = p^l} of
Q_p^n has Haar mass p^(l n) - p^((l-1) n) and the density is constant on it.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from nam.measures import BallMeasure, LocallyConstantFn, integrate
from nam.padic import REAL, as_fraction, pnorm

_UNDERFLOW = 1e-300


def _density(p: int, l: int, xi_norm: float) -> float:
    return math.exp(-(p ** (2 * l)) * xi_norm**2) if l < 600 else 0.0


def sphere_mass(p: int, n: int, l: int) -> float:
    """Haar mass of {x in Q_p^n : |x| = p^l}."""
    return float(p) ** (l * n) - float(p) ** ((l - 1) * n)


def normalizer_terms(p: int, n: int, xi, l_lo: int, l_hi: int) -> dict[int, float]:
    """Terms [p^(l n) - p^((l-1) n)] exp(-p^(2l) |xi|^2) of C(xi)^-1."""
    xn = float(pnorm(xi, p))
    return {l: sphere_mass(p, n, l) * _density(p, l, xn) for l in range(l_lo, l_hi + 1)}


def _significant_range(p: int, n: int, xi_norm: float) -> tuple[int, int]:
    # below l_lo the terms are < 1e-30 of the sum; above l_hi they underflow
    peak = -round(math.log(xi_norm, p)) if xi_norm else 0
    l_lo = peak - int(35 / (n * math.log10(p))) - 2
    l_hi = peak
    while _density(p, l_hi, xi_norm) > _UNDERFLOW:
        l_hi += 1
    return l_lo, l_hi


def inverse_normalizer(p: int, n: int, xi) -> float:
    """C(xi)^-1 summed over every l whose term is representable."""
    xn = float(pnorm(xi, p))
    lo, hi = _significant_range(p, n, xn)
    return math.fsum(normalizer_terms(p, n, xi, lo, hi).values())


def default_window(p: int, n: int, xi, tol: float = 1e-12) -> tuple[int, int]:
    """A window whose dropped outer mass is below ``tol``.

    The inner end sits two spheres inside the peak of the density.
    """
    xn = float(pnorm(xi, p))
    C = 1.0 / inverse_normalizer(p, n, xi)
    lo, hi = _significant_range(p, n, xn)
    peak = -round(math.log(xn, p))
    l_max = peak
    while C * math.fsum(normalizer_terms(p, n, xi, l_max + 1, hi).values()) > tol:
        l_max += 1
    return peak - 2, l_max


@dataclass(frozen=True)
class RadialGaussian:
    """A truncated nu_xi with the bookkeeping needed to bound its errors."""

    measure: BallMeasure
    xi: Fraction
    l_min: int
    l_max: int
    normalizer: float
    tail: float
    rounding: float

    @property
    def p(self) -> int:
        return self.measure.p

    @property
    def n(self) -> int:
        return self.measure.n

    def escape_mass(self, j: int) -> float:
        """nu_xi mass outside B(0, p^-j), including the dropped tail."""
        p, n = self.p, self.n
        xn = float(pnorm(self.xi, p))
        _, hi = _significant_range(p, n, xn)
        hi = max(hi, self.l_max)
        terms = normalizer_terms(p, n, self.xi, -j + 1, hi)
        return self.normalizer * math.fsum(terms.values())

    def dirac_deviation_bound(self, f: LocallyConstantFn, sup_f: float) -> float:
        """Bound on |integral f dnu - f(0)| for |f| <= sup_f.

        f agrees with f(0) on B(0, p^-f.m), so only escaping mass and the
        truncated tail can move the integral away from f(0).
        """
        j = f.m if f.m is not None else self.measure.m
        return 2 * sup_f * self.escape_mass(j) + sup_f * self.tail

    def integrate(self, f: LocallyConstantFn) -> float:
        return float(integrate(f, self.measure))


def radial_gaussian(xi, n: int, l_min: int, l_max: int, p: int | None = None) -> RadialGaussian:
    """The measure C(xi) exp(-|x xi|^2) m(dx) on Q_p^n, truncated to a window.

    Cells have radius p^l_min (resolution m = -l_min); every sphere with
    l <= l_min is folded into the cell at 0, spheres l_min < l <= l_max are
    split into cells, and the mass beyond l_max is dropped and reported as
    ``tail``. Total mass is 1 - tail up to ``rounding``.
    """
    if p is None:
        p = xi.p
    xi = as_fraction(xi)
    if xi == 0:
        raise ValueError("xi must be nonzero")
    if l_max < l_min:
        raise ValueError(f"empty window [{l_min}, {l_max}]")
    xn = float(pnorm(xi, p))
    inv_c = inverse_normalizer(p, n, xi)
    C = 1.0 / inv_c
    lo, hi = _significant_range(p, n, xn)
    inner = normalizer_terms(p, n, xi, min(lo, l_min), l_min)
    tail_terms = normalizer_terms(p, n, xi, l_max + 1, max(hi, l_max + 1))
    tail = C * math.fsum(tail_terms.values())

    m = -l_min
    cell_haar = float(p) ** (l_min * n)
    cells = {(Fraction(0),) * n: Fraction(C * math.fsum(inner.values()))}
    for l in range(l_min + 1, l_max + 1):
        w = C * _density(p, l, xn) * cell_haar
        if w == 0.0:
            continue
        w = Fraction(w)
        # cells of the sphere |x| = p^l at resolution m: points of
        # p^-l Z_p^n / p^m Z_p^n with some coordinate a unit multiple of p^-l
        step = Fraction(p) ** -l
        k = l + m
        for digits in itertools.product(range(p**k), repeat=n):
            if all(d % p == 0 for d in digits):
                continue
            cells[tuple(step * d for d in digits)] = w
    measure = BallMeasure(p, n, m, cells, mode=REAL)
    # relative float error of the normalizer and of each weight, summed
    rounding = 4 * (len(cells) + hi - lo) * 2.0**-52
    return RadialGaussian(measure, xi, l_min, l_max, C, tail, rounding)
