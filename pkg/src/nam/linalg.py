"""Gaussian decomposition of identity-plus-finite-block operators over Q_p.

An operator A = I + F on c_0 whose perturbation F acts on the first d
coordinates is stored as its d x d block; beyond the block it is the
identity, so every factor below is also "block plus identity".

Matrices are lists of rows of :class:`fractions.Fraction`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from nam.errors import NamError, SingularMatrixError
from nam.padic import PadicScalar, as_fraction, pnorm

Matrix = list  # list[list[Fraction]]


def as_matrix(rows: Sequence[Sequence]) -> Matrix:
    A = [[as_fraction(x) for x in row] for row in rows]
    if any(len(row) != len(A) for row in A):
        raise ValueError("matrix must be square")
    return A


def identity(d: int) -> Matrix:
    return [[Fraction(int(i == j)) for j in range(d)] for i in range(d)]


def matmul(A: Matrix, B: Matrix) -> Matrix:
    Bt = list(zip(*B))
    return [[sum((a * b for a, b in zip(row, col)), Fraction(0)) for col in Bt] for row in A]


def transpose(A: Matrix) -> Matrix:
    return [list(col) for col in zip(*A)]


def det(A: Sequence[Sequence]) -> Fraction:
    """Exact determinant by fraction-preserving elimination."""
    M = [[as_fraction(x) for x in row] for row in A]
    d = len(M)
    sign = 1
    result = Fraction(1)
    for k in range(d):
        piv = next((r for r in range(k, d) if M[r][k] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != k:
            M[k], M[piv] = M[piv], M[k]
            sign = -sign
        pk = M[k][k]
        result *= pk
        for i in range(k + 1, d):
            f = M[i][k] / pk
            if f:
                M[i] = [a - f * b for a, b in zip(M[i], M[k])]
    return sign * result


def minor(A: Matrix, rows: Sequence[int], cols: Sequence[int]) -> Fraction:
    """A(rows choose cols); the empty minor is 1."""
    if not rows:
        return Fraction(1)
    return det([[A[i][j] for j in cols] for i in rows])


def solve(A: Matrix, B: Matrix) -> Matrix:
    """A^-1 B by Gauss-Jordan elimination."""
    d = len(A)
    M = [list(map(as_fraction, A[i])) + list(map(as_fraction, B[i])) for i in range(d)]
    for k in range(d):
        piv = next((r for r in range(k, d) if M[r][k] != 0), None)
        if piv is None:
            raise SingularMatrixError("matrix block is singular")
        M[k], M[piv] = M[piv], M[k]
        pk = M[k][k]
        M[k] = [x / pk for x in M[k]]
        for i in range(d):
            if i != k and M[i][k]:
                f = M[i][k]
                M[i] = [a - f * b for a, b in zip(M[i], M[k])]
    return [row[d:] for row in M]


@dataclass(frozen=True)
class PerturbationOperator:
    """A = I + F on c_0, with F nonzero only on the leading d x d block."""

    p: int
    block: tuple  # rows of A's leading block, i.e. I_d + F

    def __post_init__(self):
        object.__setattr__(self, "block", tuple(tuple(r) for r in as_matrix(self.block)))

    @classmethod
    def from_perturbation(cls, p: int, F: Sequence[Sequence]) -> PerturbationOperator:
        F = as_matrix(F)
        return cls(p, [[F[i][j] + (i == j) for j in range(len(F))] for i in range(len(F))])

    @property
    def d(self) -> int:
        return len(self.block)

    def matrix(self) -> Matrix:
        return [list(r) for r in self.block]

    def det(self) -> PadicScalar:
        return PadicScalar(self.p, det(self.block))

    def is_invertible(self) -> bool:
        return det(self.block) != 0


def _block(A) -> tuple[Matrix, int | None]:
    if isinstance(A, PerturbationOperator):
        return A.matrix(), A.p
    return as_matrix(A), None


@dataclass(frozen=True)
class Decomposition:
    """A = S C D E with S a signed permutation, C/E unitriangular, D diagonal.

    S e_i = signs[i] * e_perm[i]. When the underlying permutation is odd one
    sign is -1 so that det S = 1 and prod D = det A.
    """

    S: tuple
    C: tuple
    D: tuple  # diagonal entries
    E: tuple
    perm: tuple
    signs: tuple

    def reconstruct(self) -> Matrix:
        Dm = [[self.D[i] if i == j else Fraction(0) for j in range(len(self.D))] for i in range(len(self.D))]
        return matmul(matmul(matmul(list(self.S), list(self.C)), Dm), list(self.E))

    @property
    def det_D(self) -> Fraction:
        out = Fraction(1)
        for x in self.D:
            out *= x
        return out

    @property
    def parity(self) -> int:
        return -1 if sum(len(c) - 1 for c in self.cycles()) % 2 else 1

    def cycles(self) -> list[list[int]]:
        seen, out = set(), []
        for start in range(len(self.perm)):
            if start in seen or self.perm[start] == start:
                continue
            cyc, i = [], start
            while i not in seen:
                seen.add(i)
                cyc.append(i)
                i = self.perm[i]
            out.append(cyc)
        return out


def gauss_decompose(A) -> Decomposition:
    """Exact A = S C D E.

    Elimination runs without pivoting while the leading minors are nonzero.
    When the k-th pivot vanishes, row k is exchanged with the first later row
    whose reduced entry in column k is nonzero, i.e. the smallest index r
    making the minor A(1..k-1, r choose 1..k) nonzero. Symmetric input with
    nonvanishing leading minors therefore gives S = I and E = C^t.

    An odd permutation is compensated by negating the first moved basis
    vector in S, the matching diagonal entry of D and the off-diagonal
    entries of C in that row and column.
    """
    M, _ = _block(A)
    d = len(M)
    U = [row[:] for row in M]
    L = identity(d)
    perm = list(range(d))  # row i of U came from row perm[i] of A
    for k in range(d):
        if U[k][k] == 0:
            r = next((r for r in range(k + 1, d) if U[r][k] != 0), None)
            if r is None:
                raise SingularMatrixError(f"leading column {k} vanishes after elimination")
            U[k], U[r] = U[r], U[k]
            perm[k], perm[r] = perm[r], perm[k]
            L[k][:k], L[r][:k] = L[r][:k], L[k][:k]
        pk = U[k][k]
        for i in range(k + 1, d):
            f = U[i][k] / pk
            L[i][k] = f
            if f:
                U[i] = [a - f * b for a, b in zip(U[i], U[k])]
    D = [U[i][i] for i in range(d)]
    E = [[U[i][j] / D[i] for j in range(d)] for i in range(d)]
    signs = [1] * d
    moved = [i for i in range(d) if perm[i] != i]
    if _parity(perm) < 0:
        k = moved[0]
        signs[k] = -1
        D[k] = -D[k]
        for i in range(d):
            if i != k:
                L[i][k], L[k][i] = -L[i][k], -L[k][i]
    S = [[Fraction(signs[j] * int(perm[j] == i)) for j in range(d)] for i in range(d)]
    return Decomposition(
        tuple(map(tuple, S)),
        tuple(map(tuple, L)),
        tuple(D),
        tuple(map(tuple, E)),
        tuple(perm),
        tuple(signs),
    )


def _parity(perm: Sequence[int]) -> int:
    seen, swaps = set(), 0
    for start in range(len(perm)):
        i, length = start, 0
        while i not in seen:
            seen.add(i)
            i = perm[i]
            length += 1
        if length:
            swaps += length - 1
    return -1 if swaps % 2 else 1


def minor_formula_factors(A: Matrix) -> tuple[list, list, list]:
    """D, C, E from ratios of leading minors (no permutation).

    D_j = A(1..j)/A(1..j-1), C_{g,k} = A(1..k-1,g choose 1..k)/A(1..k),
    E_{k,g} = A(1..k choose 1..k-1,g)/A(1..k). Requires nonzero leading minors.
    """
    A = as_matrix(A)
    d = len(A)
    lead = [minor(A, range(j), range(j)) for j in range(d + 1)]
    if any(x == 0 for x in lead[1:]):
        raise SingularMatrixError("a leading minor vanishes")
    D = [lead[j + 1] / lead[j] for j in range(d)]
    C, E = identity(d), identity(d)
    for k in range(d):
        head = list(range(k))
        for g in range(k + 1, d):
            C[g][k] = minor(A, head + [g], head + [k]) / lead[k + 1]
            E[k][g] = minor(A, head + [k], head + [g]) / lead[k + 1]
    return D, C, E


def entry_deviation(A: Matrix, p: int) -> Fraction:
    """max_{i,j} |A_ij - delta_ij|_p."""
    return max(
        (pnorm(A[i][j] - (i == j), p) for i in range(len(A)) for j in range(len(A))),
        default=Fraction(0),
    )


class NoIsometrySplit(NamError):
    """No split with the requested block bound exists."""


@dataclass(frozen=True)
class IsometrySplit:
    n: int
    A1: tuple  # A', identity outside the leading n x n block
    A2: tuple  # A'' = (A')^-1 A, entrywise within c of I
    bound: Fraction  # achieved max |A''_ij - delta_ij|_p
    det_A1: Fraction
    det_A2: Fraction


def split_isometry(A, c=None, p: int | None = None, max_n: int | None = None) -> IsometrySplit:
    """A = A' A'' with A' - I supported on the leading n x n block.

    ``n`` is the smallest block size for which A'' = (A')^-1 A satisfies
    |A''_ij - delta_ij|_p <= c, which makes A'' an isometry of c_0 and forces
    |det A''|_p = 1. A' is the leading block of A itself; any admissible
    choice gives the same bound, so this one is canonical.
    """
    M, op_p = _block(A)
    p = p or op_p
    if p is None:
        raise ValueError("split_isometry needs the prime p")
    c = Fraction(1, p) if c is None else as_fraction(c)
    if c > Fraction(1, p):
        raise ValueError("the threshold must be at most 1/p")
    d = len(M)
    if det(M) == 0:
        raise SingularMatrixError("operator is not invertible")
    last = d if max_n is None else min(max_n, d)
    worst = None
    for n in range(last + 1):
        A11 = [row[:n] for row in M[:n]]
        if n and det(A11) == 0:
            continue
        top = solve(A11, [row for row in M[:n]]) if n else []
        A2 = top + [row[:] for row in M[n:]]
        dev = entry_deviation(A2, p)
        if dev <= c:
            A1 = identity(d)
            for i in range(n):
                A1[i][:n] = A11[i]
            return IsometrySplit(
                n, tuple(map(tuple, A1)), tuple(map(tuple, A2)), dev, det(A1), det(A2)
            )
        if worst is None:
            worst = next(
                (i, j, A2[i][j])
                for i in range(d)
                for j in range(d)
                if pnorm(A2[i][j] - (i == j), p) == dev
            )
    raise NoIsometrySplit(
        f"no block size <= {last} works; entry {worst[:2]} = {worst[2]} violates the bound"
    )


def quadratic_form(A: Sequence[Sequence], z: Sequence) -> Fraction:
    """z~(A z) = sum_j z_j (A z)_j."""
    z = [as_fraction(x) for x in z]
    if len(A) != len(z) or any(len(row) != len(z) for row in A):
        raise ValueError("dimension mismatch")
    return sum(
        (zj * sum((as_fraction(a) * zk for a, zk in zip(row, z)), Fraction(0)) for zj, row in zip(z, A)),
        Fraction(0),
    )


def diag_form_norm(s: Sequence, z: Sequence, p: int) -> Fraction:
    """max_j |s_j|_p |z_j|_p^2."""
    if len(s) != len(z):
        raise ValueError("dimension mismatch")
    return max((pnorm(a, p) * pnorm(b, p) ** 2 for a, b in zip(s, z)), default=Fraction(0))


def form_norm_bound(A: Sequence[Sequence], z: Sequence, p: int) -> Fraction:
    """max_{j,l} |A_jl|_p |z_j|_p |z_l|_p, an upper bound for |z~(A z)|_p."""
    return max(
        (pnorm(A[j][l], p) * pnorm(z[j], p) * pnorm(z[l], p) for j in range(len(z)) for l in range(len(z))),
        default=Fraction(0),
    )
