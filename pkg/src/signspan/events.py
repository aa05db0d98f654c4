"""Span events on +-1 matrices: witnesses, support census, exact counts.

A *witness* for a matrix M is a sign vector in the real row span of M that
is not plus or minus one of the rows. The search walks the 2^(r-1) sign
patterns on the r pivot columns of the reduced row space instead of all
2^(n-1) projective candidates: a span vector is fixed by its pivot
coordinates, so both walks visit the same set of sign vectors.
"""

from __future__ import annotations

import enum
import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from . import _kernels as K
from .linalg import build_row_basis, express_in_span, fraction_free_rref, rank
from .signspace import (
    SignMatrix,
    SignVector,
    canonical_projective,
    en_points,
    enumerate_sign_vectors,
)

MAX_EXHAUSTIVE_BITS = 26
MAX_EXHAUSTIVE_BITS_SYM = 32
MAX_TUPLE_N = 5
MAX_DELTA_N = 4
MAX_TRIPLE_N = 8

_INT64_SAFE = 1 << 62


class SizeGuardError(ValueError):
    """Requested exhaustive computation exceeds the configured size guard."""


class EventKind(str, enum.Enum):
    KSO = "kso"
    SUPPORT_M = "support"
    INDEP_SUPPORT_M = "indep-support"
    RANK_DEFICIENT = "rank-deficient"
    SINGULAR_PM1 = "singular"
    SINGULAR_01 = "singular01"


_KIND_CODE = {
    EventKind.KSO: K.KSO,
    EventKind.SUPPORT_M: K.SUPPORT_M,
    EventKind.INDEP_SUPPORT_M: K.INDEP_SUPPORT_M,
    EventKind.RANK_DEFICIENT: K.RANK_DEFICIENT,
    EventKind.SINGULAR_PM1: K.SINGULAR_PM1,
    EventKind.SINGULAR_01: K.SINGULAR_01,
}


@dataclass(frozen=True)
class EventSpec:
    """Which event, on which p x n sample space.

    ``SUPPORT_M`` is the event that some m rows have a combination with all
    coefficients nonzero landing in {+-1}^n; ``INDEP_SUPPORT_M`` additionally
    requires independent rows (the R_m family).
    """

    kind: EventKind
    p: int
    n: int
    m: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", EventKind(self.kind))
        if self.p < 1 or self.n < 1:
            raise ValueError("p and n must be positive")
        if self.n > 63:
            raise ValueError("n must be at most 63")
        if self.kind in (EventKind.SUPPORT_M, EventKind.INDEP_SUPPORT_M):
            if self.m is None or not 1 <= self.m <= self.p:
                raise ValueError(f"support event needs 1 <= m <= p, got m={self.m}")
        elif self.m is not None:
            raise ValueError(f"m is only meaningful for support events, got m={self.m}")
        if self.kind in (EventKind.SINGULAR_PM1, EventKind.SINGULAR_01) and self.p != self.n:
            raise ValueError("singularity events need a square matrix (p == n)")

    @property
    def code(self) -> int:
        return _KIND_CODE[self.kind]


@dataclass(frozen=True)
class WitnessReport:
    witness: SignVector
    coefficients: tuple[Fraction, ...]
    support: int


# --- reduction + scan plumbing ------------------------------------------------


def _reduce(M: SignMatrix, with_transform: bool):
    """Fraction-free reduction of M (optionally augmented with I_p).

    Returns ``(A, r, D, piv)`` with A as an int64 array, or ``A`` as a list of
    Python ints when the values could overflow the compiled scan.
    """
    p, n = M.p, M.n
    extra = p if with_transform else 0
    if min(p, n) <= K.MAX_KERNEL_RANK:
        A = np.empty((p, n + extra), dtype=np.int64)
        piv = np.empty(p, dtype=np.int64)
        K.unpack(M.bits_array(), p, n, extra, False, A)
        r, D = K.ffgj(A, p, n, n + extra, piv)
        return A, int(r), int(D), piv
    rows = [list(v.to_signs()) + [int(i == j) for j in range(extra)] for i, v in enumerate(M.rows)]
    R, pivots, D = fraction_free_rref(rows, pivot_limit=n)
    r = len(pivots)
    piv = np.zeros(p, dtype=np.int64)
    piv[:r] = pivots
    biggest = max((abs(x) for row in R[:r] for x in row), default=0)
    if (r + 1) * biggest < _INT64_SAFE:
        return np.array(R, dtype=np.int64), r, D, piv
    return R, r, D, piv


def _scan_python(R, r, D, piv, n, mode, rc):
    """Slow exact fallback of the compiled scan for MODE_KSO / MODE_COLLECT."""
    found = []
    full = (1 << n) - 1
    pivset = set(int(x) for x in piv[:r])
    chk = [j for j in range(n) if j not in pivset]
    absd = abs(D)
    for pattern in range(1 << (r - 1)):
        s = [1] + [-1 if (pattern >> i) & 1 else 1 for i in range(r - 1)]
        w = 0
        ok = True
        for j in chk:
            v = sum(si * R[i][j] for i, si in enumerate(s))
            if abs(v) != absd:
                ok = False
                break
            if (v > 0) != (D > 0):
                w |= 1 << j
        if not ok:
            continue
        for i in range(r):
            if s[i] < 0:
                w |= 1 << int(piv[i])
        if w & 1:
            w ^= full
        if mode == K.MODE_KSO:
            if w not in rc:
                return [w]
        else:
            found.append(w)
    return found


def _scan(M: SignMatrix, mode: int, with_transform: bool = False, target: int = 0):
    A, r, D, piv = _reduce(M, with_transform)
    p, n = M.p, M.n
    rc = np.array([canonical_projective(v).bits for v in M.rows], dtype=np.int64)
    if isinstance(A, list):
        if mode not in (K.MODE_KSO, K.MODE_COLLECT):
            raise OverflowError("census of this size needs the compiled path")
        return r, _scan_python(A, r, D, piv, n, mode, set(rc.tolist()))
    counts = np.zeros(p + 1, dtype=np.int64)
    out = np.zeros(max(1, 1 << max(r - 1, 0)) if mode == K.MODE_COLLECT else 1, dtype=np.int64)
    kmask = np.zeros(p, dtype=np.bool_)
    chk = np.empty(n, dtype=np.int64)
    acc = np.empty(n, dtype=np.int64)
    s = np.empty(max(r, 1), dtype=np.int64)
    hits = K.scan(A, r, D, piv, n, p if with_transform else 0, mode, target, rc, p, kmask, counts, out, chk, acc, s)
    if mode == K.MODE_KSO:
        return r, ([int(out[0])] if hits else [])
    if mode == K.MODE_COLLECT:
        return r, [int(x) for x in out[:hits]]
    return r, counts


def _report(M: SignMatrix, wbits: int) -> WitnessReport:
    w = SignVector(M.n, wbits)
    coeffs = express_in_span(build_row_basis(M.to_signs()), w.to_signs())
    if coeffs is None:
        raise AssertionError("scan produced a vector outside the row span")
    return WitnessReport(w, coeffs, sum(1 for c in coeffs if c))


# --- public operations ---------------------------------------------------------


def kso_check(M: SignMatrix) -> Optional[WitnessReport]:
    """A sign vector in span(rows) other than +-rows, with its coefficients.

    The coefficients are unique when the rows are independent; for dependent
    rows any valid certificate is returned. ``None`` if there is no witness.
    """
    _, found = _scan(M, K.MODE_KSO)
    if not found:
        return None
    return _report(M, found[0])


def span_sign_classes(M: SignMatrix) -> list[SignVector]:
    """Canonical representatives of every sign vector in the row span."""
    _, found = _scan(M, K.MODE_COLLECT)
    return [SignVector(M.n, w) for w in sorted(found)]


def witness_support_census(M: SignMatrix) -> dict[int, int]:
    """Projective sign-vector classes in span(rows), tallied by coefficient support.

    Only defined for independent rows, where coefficients are unique.
    """
    if M.p > M.n or rank(M.to_signs()) != M.p:
        raise ValueError("witness_support_census needs linearly independent rows")
    if min(M.p, M.n) <= K.MAX_KERNEL_RANK:
        _, counts = _scan(M, K.MODE_CENSUS, with_transform=True)
        census = {m: int(c) for m, c in enumerate(counts) if c}
    else:
        basis = build_row_basis(M.to_signs())
        census = {}
        for v in span_sign_classes(M):
            coeffs = express_in_span(basis, v.to_signs())
            m = sum(1 for c in coeffs if c)
            census[m] = census.get(m, 0) + 1
    if census.get(2, 0):
        raise AssertionError(f"support-2 witness for independent rows: {M.to_text()!r}")
    if census.get(1, 0) != M.p:
        raise AssertionError("each row should be its own support-1 class")
    return census


def kso_oracle(M: SignMatrix) -> bool:
    """Naive check: rank([rows; w]) == rank(rows) for each canonical w."""
    rows = M.to_signs()
    r0 = rank(rows)
    own = {canonical_projective(v).bits for v in M.rows}
    for w in enumerate_sign_vectors(M.n):
        if w.bits & 1 or w.bits in own:
            continue
        if rank(rows + [w.to_signs()]) == r0:
            return True
    return False


def _support_event_python(M: SignMatrix, m: int, independent_only: bool) -> bool:
    rows = M.to_signs()
    if rank(rows) == M.p:
        census = witness_support_census(M)
        return census.get(m, 0) > 0
    if independent_only:
        return False
    for subset in itertools.combinations(range(M.p), m):
        sub = [rows[i] for i in subset]
        basis = build_row_basis(sub)
        # left kernel columns: any kernel vector nonzero in coordinate q
        kernel_free = _kernel_support(sub)
        for v in span_sign_classes(SignMatrix.from_signs(sub)):
            coeffs = express_in_span(basis, v.to_signs())
            if all(c or kernel_free[q] for q, c in enumerate(coeffs)):
                return True
    return False


def _kernel_support(rows) -> list[bool]:
    """For each row index q: does some left-kernel vector have a nonzero q entry?"""
    p = len(rows)
    r = rank(rows)
    out = []
    for q in range(p):
        others = [rows[i] for i in range(p) if i != q]
        # row q is in a dependency iff dropping it keeps the rank
        out.append(rank(others) == r if others else False)
    return out


def evaluate_event(spec: EventSpec, M: SignMatrix) -> bool:
    """Decide ``spec`` on one matrix (rows as +-1; SINGULAR_01 reads bit j as entry 1)."""
    if (M.p, M.n) != (spec.p, spec.n):
        raise ValueError(f"matrix is {M.p}x{M.n}, event expects {spec.p}x{spec.n}")
    if min(M.p, M.n) <= K.MAX_KERNEL_RANK:
        return bool(K.mc_block(M.bits_array()[None, :], M.p, M.n, spec.code, spec.m or 0))
    kind = spec.kind
    if kind is EventKind.KSO:
        return kso_check(M) is not None
    if kind in (EventKind.RANK_DEFICIENT, EventKind.SINGULAR_PM1):
        return rank(M.to_signs()) < M.p
    if kind is EventKind.SINGULAR_01:
        return rank([[(v.bits >> j) & 1 for j in range(M.n)] for v in M.rows]) < M.p
    return _support_event_python(M, spec.m, kind is EventKind.INDEP_SUPPORT_M)


# --- exhaustive counting -------------------------------------------------------


def _chunks(total: int, parts: int) -> list[tuple[int, int]]:
    parts = max(1, min(parts, total))
    step = -(-total // parts)
    return [(lo, min(lo + step, total)) for lo in range(0, total, step)]


def _run_chunks(fn, total: int, workers: int, nchunks: int = 64) -> list:
    ranges = _chunks(total, max(nchunks, workers))
    if workers <= 1:
        return [fn(lo, hi) for lo, hi in ranges]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda lh: fn(*lh), ranges))


def _check_guard(p: int, n: int, symmetry: bool, force: bool):
    bits = p * n
    limit = MAX_EXHAUSTIVE_BITS_SYM if symmetry else MAX_EXHAUSTIVE_BITS
    if not force and bits > limit:
        raise SizeGuardError(f"p*n = {bits} exceeds the exhaustive guard {limit}")
    if min(p, n) > K.MAX_KERNEL_RANK:
        raise SizeGuardError("exhaustive counts need min(p, n) <= 16")


def exact_event_count(spec: EventSpec, *, symmetry: bool = True, workers: int = 1, force: bool = False) -> tuple[int, int]:
    """(event count, 2^(p n)) over all equiprobable matrices.

    With ``symmetry`` the first row is pinned to all-ones and the count is
    multiplied by 2^n: negating columns maps the event to itself and is a
    bijection on matrices. Ignored for 0/1 matrices, where it is not a
    symmetry.
    """
    p, n = spec.p, spec.n
    sym = symmetry and spec.kind is not EventKind.SINGULAR_01
    _check_guard(p, n, sym, force)
    free = (p - 1) * n if sym else p * n
    code, m = spec.code, spec.m or 0
    parts = _run_chunks(lambda lo, hi: int(K.tally_range(p, n, code, m, sym, lo, hi)), 1 << free, workers)
    count = sum(parts)
    if sym:
        count <<= n
    return count, 1 << (p * n)


def exact_event_probability(spec: EventSpec, *, symmetry: bool = True, workers: int = 1, force: bool = False) -> Fraction:
    count, total = exact_event_count(spec, symmetry=symmetry, workers=workers, force=force)
    return Fraction(count, total)


@dataclass(frozen=True)
class DecompositionCounts:
    """Exact counts over all p x n matrices.

    ``indep_support[m]`` counts matrices in the R_m family, ``support[m]`` the
    P_m family, for m = 1..p.
    """

    p: int
    n: int
    total: int
    kso: int
    rank_deficient: int
    indep_support: dict[int, int]
    support: dict[int, int]


def decomposition_counts(p: int, n: int, *, workers: int = 1, force: bool = False) -> DecompositionCounts:
    _check_guard(p, n, True, force)
    free = (p - 1) * n

    def run(lo, hi):
        res = np.zeros(3 + 2 * p, dtype=np.int64)
        K.tally_decomposition_range(p, n, True, lo, hi, res)
        return res

    res = sum(_run_chunks(run, 1 << free, workers), np.zeros(3 + 2 * p, dtype=np.int64))
    res = [int(x) << n for x in res]
    return DecompositionCounts(
        p=p,
        n=n,
        total=res[0],
        kso=res[1],
        rank_deficient=res[2],
        indep_support={m: res[2 + m] for m in range(1, p + 1)},
        support={m: res[2 + p + m] for m in range(1, p + 1)},
    )


def count_kso_independent_tuples(n: int, *, force: bool = False) -> int:
    """Ordered n-tuples of distinct, independent E_n points satisfying KSO.

    Both conditions ignore the order of the tuple, so unordered subsets are
    enumerated and the count is multiplied by n!.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if n > MAX_TUPLE_N and not force:
        raise SizeGuardError(f"n={n} exceeds tuple guard {MAX_TUPLE_N}")
    pts = np.array([v.bits for v in en_points(n)], dtype=np.int64)
    combos = np.array(list(itertools.combinations(range(len(pts)), n)), dtype=np.int64)
    if combos.size == 0:
        return 0
    hits = K.count_independent_kso(pts[combos], n, n + 1)
    return int(hits) * math.factorial(n)


def delta(n: int, k: int, *, force: bool = False) -> Fraction:
    """Fraction of ordered k-tuples of distinct E_n points that are linearly dependent."""
    if not 1 <= k <= n + 1:
        raise ValueError(f"k must lie in 1..{n + 1}")
    if n > MAX_DELTA_N and not force:
        raise SizeGuardError(f"n={n} exceeds delta guard {MAX_DELTA_N}")
    pts = [v.to_signs() for v in en_points(n)]
    dependent = total = 0
    # dependence is order-free: each unordered subset stands for k! tuples
    for subset in itertools.combinations(pts, k):
        total += 1
        if rank(list(subset)) < k:
            dependent += 1
    return Fraction(dependent, total)


def triple_pattern_count(n: int, third_sign: int = 1) -> int:
    """Triples (v1, v2, v3) of sign vectors with v1 + v2 + third_sign*v3 in {+-1}^n."""
    if third_sign not in (1, -1):
        raise ValueError("third_sign must be +1 or -1")
    if not 1 <= n <= MAX_TRIPLE_N:
        raise ValueError(f"n must lie in 1..{MAX_TRIPLE_N}")
    V = np.array([v.to_signs() for v in enumerate_sign_vectors(n)], dtype=np.int8)
    count = 0
    for v1 in V:
        partial = v1[None, :] + V  # all v2
        for v3 in V:
            total = partial + third_sign * v3[None, :]
            count += int(np.all(np.abs(total) == 1, axis=1).sum())
    return count
