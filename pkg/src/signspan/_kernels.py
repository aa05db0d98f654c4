"""Compiled inner loops: fraction-free elimination, witness scans, tallies.

Everything here works on int64. Entries produced by fraction-free
elimination are minors of the input, so for a +-1 (or 0/1) matrix with
rank r the largest intermediate is about 2 * r**r (Hadamard), which stays
below 2**63 for r <= 16. Callers route larger ranks to the Python path.
"""

from __future__ import annotations

import numpy as np
from numba import njit

KSO = 0
SUPPORT_M = 1
INDEP_SUPPORT_M = 2
RANK_DEFICIENT = 3
SINGULAR_PM1 = 4
SINGULAR_01 = 5

MODE_KSO = 0
MODE_COLLECT = 1
MODE_CENSUS = 2
MODE_SUPPORT_ANY = 3
MODE_HAS_SUPPORT = 4

MAX_KERNEL_RANK = 16
MODP = 2147483647


@njit(cache=True, nogil=True)
def unpack(bits, p, n, extra, zero_one, A):
    for i in range(p):
        b = bits[i]
        for j in range(n):
            bit = (b >> j) & 1
            if zero_one:
                A[i, j] = bit
            else:
                A[i, j] = 1 - 2 * bit
        for k in range(extra):
            A[i, n + k] = 1 if k == i else 0


@njit(cache=True, nogil=True)
def ffgj(A, m, limit, ncols, piv):
    """In-place fraction-free Gauss-Jordan on A[:m, :ncols]; returns (rank, D)."""
    prev = 1
    r = 0
    for col in range(limit):
        if r == m:
            break
        pr = -1
        for i in range(r, m):
            if A[i, col] != 0:
                pr = i
                break
        if pr < 0:
            continue
        if pr != r:
            for j in range(ncols):
                t = A[r, j]
                A[r, j] = A[pr, j]
                A[pr, j] = t
        a = A[r, col]
        for i in range(m):
            if i == r:
                continue
            b = A[i, col]
            if b == 0:
                if a != prev:
                    for j in range(ncols):
                        A[i, j] = (A[i, j] * a) // prev
            else:
                for j in range(ncols):
                    A[i, j] = (a * A[i, j] - b * A[r, j]) // prev
        prev = a
        piv[r] = col
        r += 1
    return r, prev


@njit(cache=True, nogil=True)
def _inv_mod(a, q):
    t, newt, r, newr = 0, 1, q, a
    while newr != 0:
        k = r // newr
        t, newt = newt, t - k * newt
        r, newr = newr, r - k * newr
    if t < 0:
        t += q
    return t


@njit(cache=True, nogil=True)
def rank_modp(A, m, ncols, q):
    """Rank over GF(q), q < 2**31; A is overwritten."""
    for i in range(m):
        for j in range(ncols):
            A[i, j] %= q
    r = 0
    for col in range(ncols):
        if r == m:
            break
        pr = -1
        for i in range(r, m):
            if A[i, col] != 0:
                pr = i
                break
        if pr < 0:
            continue
        if pr != r:
            for j in range(ncols):
                t = A[r, j]
                A[r, j] = A[pr, j]
                A[pr, j] = t
        inv = _inv_mod(A[r, col], q)
        for j in range(ncols):
            A[r, j] = (A[r, j] * inv) % q
        for i in range(r + 1, m):
            b = A[i, col]
            if b != 0:
                for j in range(ncols):
                    A[i, j] = (A[i, j] - b * A[r, j]) % q
        r += 1
    return r


@njit(cache=True, nogil=True)
def scan(A, r, D, piv, n, mrows, mode, target, rc, nrc, kmask, counts, out, chk, acc, s):
    """Gray-code walk over sign patterns on the pivot columns.

    Rows A[:r, :n] are D times a reduced echelon basis, so a pattern
    s in {+-1}^r determines the unique span vector w = s @ A[:r, :n] / D
    with w[piv[i]] = s[i]; w is a sign vector iff every non-pivot entry of
    s @ A has absolute value |D|. s[0] is pinned to +1 (one pattern per
    projective class). Columns n..n+mrows-1 hold D times the row transform.

    Returns the number of hits for MODE_COLLECT / MODE_CENSUS and 0/1
    otherwise; MODE_KSO stores the canonical witness bits in out[0].
    """
    if r == 0:
        return 0
    absd = D if D > 0 else -D
    full = (1 << n) - 1
    nchk = 0
    k = 0
    for j in range(n):
        if k < r and piv[k] == j:
            k += 1
        else:
            chk[nchk] = j
            nchk += 1
    for c in range(nchk):
        tot = 0
        for i in range(r):
            tot += A[i, chk[c]]
        acc[c] = tot
    for i in range(r):
        s[i] = 1
    hits = 0
    total = 1 << (r - 1)
    for t in range(total):
        if t > 0:
            i = 1
            tt = t
            while (tt & 1) == 0:
                tt >>= 1
                i += 1
            if s[i] == 1:
                s[i] = -1
                for c in range(nchk):
                    acc[c] -= 2 * A[i, chk[c]]
            else:
                s[i] = 1
                for c in range(nchk):
                    acc[c] += 2 * A[i, chk[c]]
        ok = True
        for c in range(nchk):
            v = acc[c]
            if v != absd and v != -absd:
                ok = False
                break
        if not ok:
            continue
        w = 0
        for i in range(r):
            if s[i] < 0:
                w |= 1 << piv[i]
        for c in range(nchk):
            if (acc[c] > 0) != (D > 0):
                w |= 1 << chk[c]
        if w & 1:
            w ^= full
        if mode == MODE_KSO:
            isrow = False
            for q in range(nrc):
                if rc[q] == w:
                    isrow = True
                    break
            if not isrow:
                out[0] = w
                return 1
        elif mode == MODE_COLLECT:
            out[hits] = w
            hits += 1
        else:
            support = 0
            allnz = True
            for q in range(mrows):
                a = 0
                for i in range(r):
                    a += s[i] * A[i, n + q]
                if a != 0:
                    support += 1
                elif not kmask[q]:
                    allnz = False
            if mode == MODE_CENSUS:
                counts[support] += 1
                hits += 1
            elif mode == MODE_HAS_SUPPORT:
                if support == target:
                    return 1
            elif allnz:
                return 1
    return hits


@njit(cache=True, nogil=True)
def _canon_rows(bits, p, n, rc):
    full = (1 << n) - 1
    for i in range(p):
        b = bits[i]
        rc[i] = b ^ full if b & 1 else b


@njit(cache=True, nogil=True)
def _next_subset(x):
    # Gosper's hack: next integer with the same popcount
    c = x & -x
    r = x + c
    return (((r ^ x) >> 2) // c) | r


@njit(cache=True, nogil=True)
def evaluate(bits, p, n, kind, m, A, B, piv, chk, acc, s, rc, kmask, counts, out):
    """Decide one event on the matrix whose rows are ``bits``."""
    if kind == RANK_DEFICIENT or kind == SINGULAR_PM1 or kind == SINGULAR_01:
        unpack(bits, p, n, 0, kind == SINGULAR_01, A)
        r, D = ffgj(A, p, n, n, piv)
        return r < p
    if kind == KSO:
        unpack(bits, p, n, 0, False, A)
        r, D = ffgj(A, p, n, n, piv)
        _canon_rows(bits, p, n, rc)
        for q in range(p):
            kmask[q] = False
        return scan(A, r, D, piv, n, 0, MODE_KSO, 0, rc, p, kmask, counts, out, chk, acc, s) > 0
    # support events
    unpack(bits, p, n, p, False, A)
    r, D = ffgj(A, p, n, n + p, piv)
    if r == p:
        for q in range(p):
            kmask[q] = False
        return scan(A, r, D, piv, n, p, MODE_HAS_SUPPORT, m, rc, 0, kmask, counts, out, chk, acc, s) > 0
    if kind == INDEP_SUPPORT_M:
        return False
    sub = np.empty(m, dtype=np.int64)
    mask = (1 << m) - 1
    limit = 1 << p
    while mask < limit:
        k = 0
        for i in range(p):
            if (mask >> i) & 1:
                sub[k] = bits[i]
                k += 1
        unpack(sub, m, n, m, False, B)
        r2, D2 = ffgj(B, m, n, n + m, piv)
        for q in range(m):
            nz = False
            for i in range(r2, m):
                if B[i, n + q] != 0:
                    nz = True
                    break
            kmask[q] = nz
        if scan(B, r2, D2, piv, n, m, MODE_SUPPORT_ANY, m, rc, 0, kmask, counts, out, chk, acc, s) > 0:
            return True
        mask = _next_subset(mask)
    return False


@njit(cache=True, nogil=True)
def mc_block(bits2d, p, n, kind, m):
    """Number of rows of ``bits2d`` (one matrix per row) where the event holds."""
    A = np.empty((p, n + p), dtype=np.int64)
    B = np.empty((p, n + p), dtype=np.int64)
    piv = np.empty(p, dtype=np.int64)
    chk = np.empty(n, dtype=np.int64)
    acc = np.empty(n, dtype=np.int64)
    s = np.empty(p, dtype=np.int64)
    rc = np.empty(p, dtype=np.int64)
    kmask = np.zeros(p, dtype=np.bool_)
    counts = np.zeros(p + 1, dtype=np.int64)
    out = np.zeros(1, dtype=np.int64)
    hits = 0
    for t in range(bits2d.shape[0]):
        if evaluate(bits2d[t], p, n, kind, m, A, B, piv, chk, acc, s, rc, kmask, counts, out):
            hits += 1
    return hits


@njit(cache=True, nogil=True)
def singular_modp_block(bits2d, p, n, zero_one, flags):
    """Mark matrices whose rank mod a large prime is below p (candidates only)."""
    A = np.empty((p, n), dtype=np.int64)
    cnt = 0
    for t in range(bits2d.shape[0]):
        unpack(bits2d[t], p, n, 0, zero_one, A)
        r = rank_modp(A, p, n, MODP)
        flags[t] = r < p
        if r < p:
            cnt += 1
    return cnt


@njit(cache=True, nogil=True)
def _decode(idx, p, n, sym, bits):
    mask = (1 << n) - 1
    if sym:
        bits[0] = 0
        for i in range(1, p):
            bits[i] = (idx >> ((i - 1) * n)) & mask
    else:
        for i in range(p):
            bits[i] = (idx >> (i * n)) & mask


@njit(cache=True, nogil=True)
def tally_range(p, n, kind, m, sym, lo, hi):
    """Count event matrices among indices lo..hi-1 of the enumeration."""
    A = np.empty((p, n + p), dtype=np.int64)
    B = np.empty((p, n + p), dtype=np.int64)
    piv = np.empty(p, dtype=np.int64)
    chk = np.empty(n, dtype=np.int64)
    acc = np.empty(n, dtype=np.int64)
    s = np.empty(p, dtype=np.int64)
    rc = np.empty(p, dtype=np.int64)
    kmask = np.zeros(p, dtype=np.bool_)
    counts = np.zeros(p + 1, dtype=np.int64)
    out = np.zeros(1, dtype=np.int64)
    bits = np.empty(p, dtype=np.int64)
    hits = 0
    for idx in range(lo, hi):
        _decode(idx, p, n, sym, bits)
        if evaluate(bits, p, n, kind, m, A, B, piv, chk, acc, s, rc, kmask, counts, out):
            hits += 1
    return hits


@njit(cache=True, nogil=True)
def tally_decomposition_range(p, n, sym, lo, hi, res):
    """Accumulate all decomposition counts for one (p, n) over an index range.

    res layout: [total, kso, rank_deficient, R_1..R_p, P_1..P_p].
    """
    A = np.empty((p, n + p), dtype=np.int64)
    B = np.empty((p, n + p), dtype=np.int64)
    piv = np.empty(p, dtype=np.int64)
    chk = np.empty(n, dtype=np.int64)
    acc = np.empty(n, dtype=np.int64)
    s = np.empty(p, dtype=np.int64)
    rc = np.empty(p, dtype=np.int64)
    kmask = np.zeros(p, dtype=np.bool_)
    counts = np.zeros(p + 1, dtype=np.int64)
    out = np.zeros(1, dtype=np.int64)
    bits = np.empty(p, dtype=np.int64)
    for idx in range(lo, hi):
        _decode(idx, p, n, sym, bits)
        res[0] += 1
        unpack(bits, p, n, p, False, A)
        r, D = ffgj(A, p, n, n + p, piv)
        if r == p:
            for q in range(p + 1):
                counts[q] = 0
            for q in range(p):
                kmask[q] = False
            scan(A, r, D, piv, n, p, MODE_CENSUS, 0, rc, 0, kmask, counts, out, chk, acc, s)
            kso = False
            for mm in range(1, p + 1):
                if counts[mm] > 0:
                    res[2 + mm] += 1
                    res[2 + p + mm] += 1
                    if mm >= 2:
                        kso = True
            if kso:
                res[1] += 1
        else:
            res[2] += 1
            if evaluate(bits, p, n, KSO, 0, A, B, piv, chk, acc, s, rc, kmask, counts, out):
                res[1] += 1
            for mm in range(1, p + 1):
                if evaluate(bits, p, n, SUPPORT_M, mm, A, B, piv, chk, acc, s, rc, kmask, counts, out):
                    res[2 + p + mm] += 1


@njit(cache=True, nogil=True)
def count_independent_kso(bits2d, p, n):
    """Rows of ``bits2d`` (one p-row matrix each) with rank p and a witness."""
    A = np.empty((p, n), dtype=np.int64)
    piv = np.empty(p, dtype=np.int64)
    chk = np.empty(n, dtype=np.int64)
    acc = np.empty(n, dtype=np.int64)
    s = np.empty(p, dtype=np.int64)
    rc = np.empty(p, dtype=np.int64)
    kmask = np.zeros(p, dtype=np.bool_)
    counts = np.zeros(p + 1, dtype=np.int64)
    out = np.zeros(1, dtype=np.int64)
    hits = 0
    for t in range(bits2d.shape[0]):
        unpack(bits2d[t], p, n, 0, False, A)
        r, D = ffgj(A, p, n, n, piv)
        if r < p:
            continue
        _canon_rows(bits2d[t], p, n, rc)
        if scan(A, r, D, piv, n, 0, MODE_KSO, 0, rc, p, kmask, counts, out, chk, acc, s) > 0:
            hits += 1
    return hits
