"""Exhaustive enumeration of small measures for brute-force checks."""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import comb
from typing import Iterable, Iterator

from nam.errors import EnumerationCapError
from nam.measures import BallMeasure
from nam.padic import REAL, Mode, as_fraction

DEFAULT_CAP = 200_000


def lattice_cells(p: int, n: int, m: int) -> list[tuple]:
    """Canonical centers of the radius-p^-m cells of Z_p^n, lexicographic."""
    if m < 0:
        raise ValueError("the oracle lattice needs m >= 0")
    return [tuple(map(Fraction, c)) for c in itertools.product(range(p**m), repeat=n)]


def oracle_size(p: int, n: int, m: int, grid: Iterable, max_support: int | None = None) -> int:
    """Number of weight vectors enumerated before any filtering."""
    g = sorted(set(map(as_fraction, grid)))
    cells = p ** (m * n)
    if max_support is None:
        return len(g) ** cells
    nonzero = len([w for w in g if w != 0])
    return sum(comb(cells, k) * nonzero**k for k in range(min(max_support, cells) + 1))


def enumerate_oracle(
    p: int,
    n: int,
    m: int,
    grid: Iterable,
    cap: int = DEFAULT_CAP,
    probability: bool = False,
    max_support: int | None = None,
    mode: Mode = REAL,
) -> Iterator[BallMeasure]:
    """All measures on the p^(mn) cells of Z_p^n with weights from ``grid``.

    Weight vectors are produced in lexicographic order of the sorted grid,
    so the stream is deterministic and duplicate-free. ``max_support`` limits
    the number of charged cells (requires 0 in the grid); ``probability``
    keeps only probability measures of the given mode.
    """
    g = sorted(set(map(as_fraction, grid)))
    if max_support is not None and Fraction(0) not in g:
        raise ValueError("max_support needs 0 in the weight grid")
    size = oracle_size(p, n, m, g, max_support)
    if size > cap:
        raise EnumerationCapError(f"enumeration of {size} weight vectors exceeds cap {cap}")
    cells = lattice_cells(p, n, m)
    if max_support is None:
        vectors = (
            [(i, w) for i, w in enumerate(ws) if w] for ws in itertools.product(g, repeat=len(cells))
        )
    else:
        vectors = _sparse_vectors(len(cells), g, max_support)
    one = Fraction(1)
    for entries in vectors:
        # cheap necessary condition before building the measure
        if probability and sum(w for _, w in entries) != one:
            continue
        mu = BallMeasure(p, n, m, [(cells[i], w) for i, w in entries], mode=mode)
        if probability and not mu.is_probability():
            continue
        yield mu


def _sparse_vectors(length: int, grid: list, max_support: int):
    """Weight vectors with at most ``max_support`` nonzero entries, as (index, weight) lists.

    The order matches the lexicographic order of the dense vectors
    restricted to each support size.
    """
    nonzero = [w for w in grid if w != 0]
    for k in range(min(max_support, length) + 1):
        for support in itertools.combinations(range(length), k):
            for ws in itertools.product(nonzero, repeat=k):
                yield list(zip(support, ws))
