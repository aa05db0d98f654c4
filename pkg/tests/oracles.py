"""Slow reference implementations used only by the tests.

Plain Fraction Gauss-Jordan and brute-force enumeration; deliberately shares
no code with the package.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction


def rref(rows):
    A = [[Fraction(x) for x in r] for r in rows]
    m = len(A)
    ncols = len(A[0]) if A else 0
    pivots = []
    r = 0
    for c in range(ncols):
        k = next((i for i in range(r, m) if A[i][c] != 0), None)
        if k is None:
            continue
        A[r], A[k] = A[k], A[r]
        inv = 1 / A[r][c]
        A[r] = [x * inv for x in A[r]]
        for i in range(m):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return A, pivots


def frank(rows) -> int:
    return len(rref(rows)[1]) if rows else 0


def det(rows) -> Fraction:
    n = len(rows)
    return sum(
        _perm_sign(perm) * _prod(rows[i][perm[i]] for i in range(n))
        for perm in itertools.permutations(range(n))
    )


def _prod(xs):
    out = 1
    for x in xs:
        out *= x
    return out


def _perm_sign(perm) -> int:
    s, seen = 1, set()
    for i in range(len(perm)):
        if i in seen:
            continue
        j, length = i, 0
        while j not in seen:
            seen.add(j)
            j = perm[j]
            length += 1
        s *= -1 if length % 2 == 0 else 1
    return s


def solve_affine(S, w):
    """All c with c @ S = w as (particular, kernel basis), or None."""
    k = len(S)
    # columns of the system are the rows of S
    aug = [[S[i][j] for i in range(k)] + [w[j]] for j in range(len(w))]
    R, piv = rref(aug)
    if k in piv:
        return None
    part = [Fraction(0)] * k
    for row, c in zip(R, piv):
        part[c] = row[k]
    free = [c for c in range(k) if c not in piv]
    kernel = []
    for f in free:
        v = [Fraction(0)] * k
        v[f] = Fraction(1)
        for row, c in zip(R, piv):
            v[c] = -row[f]
        kernel.append(v)
    return part, kernel


def has_full_support_solution(S, w, rng: random.Random, tries: int = 4) -> bool:
    sol = solve_affine(S, w)
    if sol is None:
        return False
    part, kernel = sol
    if not kernel:
        return all(part)
    # a generic point of a nonempty affine space avoids finitely many hyperplanes
    for _ in range(tries):
        t = [rng.randint(-(10**9), 10**9) for _ in kernel]
        c = [part[q] + sum(ti * v[q] for ti, v in zip(t, kernel)) for q in range(len(part))]
        if all(c):
            return True
    return False


def sign_vectors(n):
    return [list(s) for s in itertools.product([1, -1], repeat=n)]


def kso(rows) -> bool:
    n = len(rows[0])
    r0 = frank(rows)
    own = {tuple(r) for r in rows} | {tuple(-x for x in r) for r in rows}
    return any(tuple(w) not in own and frank(rows + [w]) == r0 for w in sign_vectors(n))


def support_event(rows, m: int, independent_only: bool, seed: int = 0) -> bool:
    rng = random.Random(seed)
    if independent_only and frank(rows) < len(rows):
        return False
    n = len(rows[0])
    for S in itertools.combinations(rows, m):
        S = [list(r) for r in S]
        for w in sign_vectors(n):
            if has_full_support_solution(S, w, rng):
                return True
    return False


def all_matrices(p, n):
    vecs = sign_vectors(n)
    for combo in itertools.product(range(len(vecs)), repeat=p):
        yield [vecs[i] for i in combo]


def support_census(rows) -> dict[int, int]:
    """Projective sign classes in the span of independent rows, by support size."""
    n = len(rows[0])
    out: dict[int, int] = {}
    for w in sign_vectors(n):
        if w[0] != 1:
            continue
        sol = solve_affine(rows, w)
        if sol is None:
            continue
        part, kernel = sol
        assert not kernel
        m = sum(1 for c in part if c)
        out[m] = out.get(m, 0) + 1
    return out


def rank_mod(rows, q: int) -> int:
    A = [[x % q for x in r] for r in rows]
    r = 0
    ncols = len(A[0]) if A else 0
    for c in range(ncols):
        k = next((i for i in range(r, len(A)) if A[i][c]), None)
        if k is None:
            continue
        A[r], A[k] = A[k], A[r]
        inv = pow(A[r][c], q - 2, q)
        A[r] = [x * inv % q for x in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c]:
                f = A[i][c]
                A[i] = [(a - f * b) % q for a, b in zip(A[i], A[r])]
        r += 1
    return r


def _boundary(simplices, faces):
    idx = {f: i for i, f in enumerate(faces)}
    cols = []
    for S in simplices:
        col = [0] * len(faces)
        for i in range(len(S)):
            col[idx[S[:i] + S[i + 1:]]] += (-1) ** i
        cols.append(col)
    return cols  # rank of the transpose is the same


def eta_homology(points, q=None) -> int:
    """Reduced homology rank in degree n-1 of the non-spanning-subset complex."""
    d = len(points[0])
    n = d - 1
    if frank(points) < d:
        return 0
    T = len(points)

    def simplices(size):
        return [S for S in itertools.combinations(range(T), size) if size < d or frank([points[i] for i in S]) < d]

    lower, mid, top = simplices(n - 1), simplices(n), simplices(n + 1)
    rk = (lambda M: frank(M) if q is None else rank_mod(M, q))
    r_mid = rk(_boundary(mid, lower)) if mid and lower else 0
    r_top = rk(_boundary(top, mid)) if top and mid else 0
    return len(mid) - r_mid - r_top


def eta_flagsum(points, weights) -> Fraction:
    d = len(points[0])
    n = d - 1
    if frank(points) < d:
        return Fraction(0)
    total = Fraction(0)
    for W in itertools.permutations(range(len(points)), n):
        rows = [points[i] for i in W]
        if frank(rows) < n:
            continue
        qs = []
        on_top = []
        for l in range(n, 0, -1):
            last = rows[n - l:]
            on = [i for i, pt in enumerate(points) if frank(last + [pt]) == l]
            qs.append(len(on))
            if l == n:
                on_top = on
        prod = 1
        for x in qs:
            prod *= x
        total += (1 - sum((Fraction(weights[i]) for i in on_top), Fraction(0))) / prod
    return total
