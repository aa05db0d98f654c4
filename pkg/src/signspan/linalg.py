"""Exact rational linear algebra.

Rationals are :class:`fractions.Fraction`. Elimination is fraction-free
(Bareiss): rows are scaled to integers and every division by the previous
pivot is exact, so intermediate entries stay minors of the input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

Number = int | Fraction


@dataclass(frozen=True)
class ExactMatrix:
    """Dense rows x cols matrix of rationals."""

    rows: tuple[tuple[Fraction, ...], ...]
    ncols: int

    @classmethod
    def from_rows(cls, rows, ncols: Optional[int] = None) -> "ExactMatrix":
        data = tuple(tuple(Fraction(x) for x in r) for r in rows)
        if ncols is None:
            ncols = len(data[0]) if data else 0
        for r in data:
            if len(r) != ncols:
                raise ValueError(f"row of length {len(r)} in matrix with {ncols} columns")
        return cls(data, ncols)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(tuple(zip(*self.rows)) if self.rows else (), self.nrows)

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch")
        cols = list(zip(*other.rows)) if other.rows else [()] * other.ncols
        return ExactMatrix(
            tuple(tuple(sum((a * b for a, b in zip(r, c)), Fraction(0)) for c in cols) for r in self.rows),
            other.ncols,
        )


def _as_matrix(M) -> ExactMatrix:
    return M if isinstance(M, ExactMatrix) else ExactMatrix.from_rows(M)


def _integer_rows(M: ExactMatrix) -> tuple[list[list[int]], list[int]]:
    """Scale each row by the lcm of its denominators; return rows and scales."""
    out, scales = [], []
    for r in M.rows:
        s = math.lcm(*(x.denominator for x in r)) if r else 1
        out.append([int(x * s) for x in r])
        scales.append(s)
    return out, scales


def fraction_free_rref(rows: Sequence[Sequence[int]], pivot_limit: Optional[int] = None):
    """Fraction-free Gauss-Jordan elimination on an integer matrix.

    Pivots are searched only in the first ``pivot_limit`` columns (all by
    default), so an identity block appended on the right records the row
    transform. Returns ``(A, pivots, D)``: ``A`` is the reduced integer
    matrix with rows physically swapped, its first ``len(pivots)`` rows
    equal ``D`` times the reduced row echelon form, and the remaining rows
    are zero on the pivot-searchable columns. ``D`` is the last pivot (1 for
    a zero matrix).
    """
    A = [list(map(int, r)) for r in rows]
    m = len(A)
    ncols = len(A[0]) if A else 0
    limit = ncols if pivot_limit is None else pivot_limit
    prev = 1
    r = 0
    pivots: list[int] = []
    for col in range(limit):
        if r == m:
            break
        piv = next((i for i in range(r, m) if A[i][col] != 0), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        pr = A[r]
        a = pr[col]
        for i in range(m):
            if i == r:
                continue
            row = A[i]
            b = row[col]
            if b == 0:
                if a != prev:
                    A[i] = [x * a // prev for x in row]
                continue
            A[i] = [(a * x - b * y) // prev for x, y in zip(row, pr)]
        prev = a
        pivots.append(col)
        r += 1
    return A, pivots, prev


def _bareiss_rank(A: list[list[int]]) -> int:
    A = [r[:] for r in A]
    m = len(A)
    ncols = len(A[0]) if A else 0
    prev = 1
    r = 0
    for col in range(ncols):
        if r == m:
            break
        piv = next((i for i in range(r, m) if A[i][col] != 0), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        pr = A[r]
        a = pr[col]
        for i in range(r + 1, m):
            row = A[i]
            b = row[col]
            A[i] = [(a * x - b * y) // prev for x, y in zip(row, pr)]
        prev = a
        r += 1
    return r


def rank(M) -> int:
    """Dimension of the row space of ``M`` over the rationals."""
    M = _as_matrix(M)
    if M.nrows == 0 or M.ncols == 0:
        return 0
    A, _ = _integer_rows(M)
    return _bareiss_rank(A)


@dataclass(frozen=True)
class RowBasis:
    """Reduced echelon basis of a row space plus the map back to the generators.

    ``transform @ generators == basis`` holds exactly.
    """

    n: int
    basis: tuple[tuple[Fraction, ...], ...]
    pivots: tuple[int, ...]
    transform: ExactMatrix
    generators: ExactMatrix

    @property
    def rank(self) -> int:
        return len(self.basis)


def build_row_basis(generators) -> RowBasis:
    G = _as_matrix(generators)
    p, n = G.nrows, G.ncols
    if p == 0:
        return RowBasis(n, (), (), ExactMatrix((), 0), G)
    A, scales = _integer_rows(G)
    aug = [row + [int(i == j) for j in range(p)] for i, row in enumerate(A)]
    R, pivots, D = fraction_free_rref(aug, pivot_limit=n)
    r = len(pivots)
    basis = tuple(tuple(Fraction(x, D) for x in R[i][:n]) for i in range(r))
    transform = tuple(
        tuple(Fraction(R[i][n + j] * scales[j], D) for j in range(p)) for i in range(r)
    )
    return RowBasis(n, basis, tuple(pivots), ExactMatrix(transform, p), G)


def express_in_span(B: RowBasis, w: Sequence[Number]) -> Optional[tuple[Fraction, ...]]:
    """Coefficients ``c`` over the original generators with ``c @ G == w``.

    Returns ``None`` when ``w`` is outside the row space. With independent
    generators the coefficients are unique.
    """
    if len(w) != B.n:
        raise ValueError(f"vector of length {len(w)} in ambient dimension {B.n}")
    w = [Fraction(x) for x in w]
    lead = [w[c] for c in B.pivots]
    residual = list(w)
    for a, row in zip(lead, B.basis):
        if a:
            for j, x in enumerate(row):
                if x:
                    residual[j] -= a * x
    if any(residual):
        return None
    p = B.generators.nrows
    coeffs = [Fraction(0)] * p
    for a, trow in zip(lead, B.transform.rows):
        if a:
            for j in range(p):
                coeffs[j] += a * trow[j]
    return tuple(coeffs)


def is_prime(q: int) -> bool:
    if q < 2:
        return False
    if q % 2 == 0:
        return q == 2
    return all(q % d for d in range(3, math.isqrt(q) + 1, 2))


def rank_mod_p(M: Sequence[Sequence[int]], prime: int) -> int:
    """Rank of an integer matrix over GF(prime)."""
    if not is_prime(prime):
        raise ValueError(f"{prime} is not prime")
    A = [[int(x) % prime for x in r] for r in M]
    m = len(A)
    ncols = len(A[0]) if A else 0
    r = 0
    for col in range(ncols):
        if r == m:
            break
        piv = next((i for i in range(r, m) if A[i][col]), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = pow(A[r][col], -1, prime)
        pr = [x * inv % prime for x in A[r]]
        A[r] = pr
        for i in range(r + 1, m):
            b = A[i][col]
            if b:
                A[i] = [(x - b * y) % prime for x, y in zip(A[i], pr)]
        r += 1
    return r
