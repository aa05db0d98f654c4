"""The eta* invariant of a finite projective point configuration.

Two independent routes:

* :func:`eta_star_homology` -- rank of the top reduced homology group
  H~_{n-1} of the complex whose simplices are the non-spanning subsets;
* :func:`eta_star_flagsum` -- the weighted sum over ordered independent
  n-tuples of (1 - weight of the points in their span) / W[H], where W[H]
  is the product of the flag counts q_l.

For a spanning configuration the two agree for every weight vector summing
to one; :func:`verify_theorem3` runs that comparison.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import _kernels as K
from .linalg import build_row_basis, express_in_span, is_prime, rank
from .signspace import en_points

MAX_SKELETON_POINTS = 20
MAX_SKELETON_AMBIENT = 7
MAX_FLAG_POINTS = 16
MAX_FLAG_N = 4


class DependentTupleError(ValueError):
    pass


def canonical_point(v: Sequence[int]) -> tuple[int, ...]:
    """Primitive integer representative with first nonzero coordinate positive."""
    v = [int(x) for x in v]
    g = math.gcd(*v)
    if g == 0:
        raise ValueError("zero vector is not a projective point")
    lead = next(x for x in v if x)
    if lead < 0:
        g = -g
    return tuple(x // g for x in v)


def _parse_fraction(x) -> Fraction:
    return Fraction(x) if not isinstance(x, float) else Fraction(str(x))


@dataclass(frozen=True)
class PointConfig:
    ambient: int
    points: tuple[tuple[int, ...], ...]
    weights: tuple[Fraction, ...]

    @classmethod
    def create(cls, points, weights=None, ambient: Optional[int] = None) -> "PointConfig":
        pts = [canonical_point(p) for p in points]
        if not pts:
            raise ValueError("empty configuration")
        if ambient is None:
            ambient = len(pts[0])
        if any(len(p) != ambient for p in pts):
            raise ValueError(f"every point needs {ambient} coordinates")
        if len(set(pts)) != len(pts):
            raise ValueError("configuration repeats a projective point")
        if weights is None:
            ws = [Fraction(1)] + [Fraction(0)] * (len(pts) - 1)
        else:
            ws = [_parse_fraction(w) for w in weights]
        if len(ws) != len(pts):
            raise ValueError(f"{len(ws)} weights for {len(pts)} points")
        if sum(ws) != 1:
            raise ValueError(f"weights sum to {sum(ws)}, not 1")
        return cls(ambient, tuple(pts), tuple(ws))

    @property
    def n(self) -> int:
        """Projective dimension: ambient - 1."""
        return self.ambient - 1

    def __len__(self) -> int:
        return len(self.points)

    def with_weights(self, weights) -> "PointConfig":
        return PointConfig.create(self.points, weights, self.ambient)

    def spans(self) -> bool:
        return rank(self.points) == self.ambient

    def to_json(self) -> str:
        return json.dumps(
            {
                "ambient": self.ambient,
                "points": [list(p) for p in self.points],
                "weights": [f"{w.numerator}/{w.denominator}" for w in self.weights],
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "PointConfig":
        data = json.loads(text)
        if not isinstance(data, dict) or "points" not in data:
            raise ValueError("point configuration JSON needs a 'points' list")
        return cls.create(data["points"], data.get("weights"), data.get("ambient"))


def basis_config(ambient: int, weights=None) -> PointConfig:
    return PointConfig.create([[int(i == j) for j in range(ambient)] for i in range(ambient)], weights)


def generic_config(ambient: int, weights=None) -> PointConfig:
    """ambient + 1 points in general position: the basis plus the all-ones vector."""
    pts = [[int(i == j) for j in range(ambient)] for i in range(ambient)] + [[1] * ambient]
    return PointConfig.create(pts, weights)


def en_config(n: int, weights=None) -> PointConfig:
    """The 2^n points (1, b_1..b_n), b in {+-1}^n, in ambient dimension n + 1."""
    return PointConfig.create([v.to_signs() for v in en_points(n)], weights)


# --- homology route ------------------------------------------------------------


@dataclass(frozen=True)
class SkeletonSlice:
    """Simplices of dimensions n-2, n-1, n as sorted index tuples."""

    n: int
    simplices: dict = field(default_factory=dict)

    def __getitem__(self, k: int) -> list[tuple[int, ...]]:
        return self.simplices[k]


def _guard_skeleton(H: PointConfig, force: bool):
    if force:
        return
    if len(H) > MAX_SKELETON_POINTS or H.ambient > MAX_SKELETON_AMBIENT:
        raise ValueError(
            f"skeleton guard: T={len(H)} (max {MAX_SKELETON_POINTS}), "
            f"ambient={H.ambient} (max {MAX_SKELETON_AMBIENT})"
        )


def build_skeleton(H: PointConfig, *, force: bool = False) -> SkeletonSlice:
    _guard_skeleton(H, force)
    if H.ambient < 2:
        raise ValueError("ambient dimension must be at least 2")
    n = H.n
    T = len(H)
    out = {}
    for k in (n - 2, n - 1, n):
        size = k + 1
        subsets = itertools.combinations(range(T), size)
        if size < H.ambient:
            out[k] = list(subsets)
        else:
            out[k] = [S for S in subsets if rank([H.points[i] for i in S]) < H.ambient]
    return SkeletonSlice(n, out)


def boundary_matrix(faces: list[tuple[int, ...]], simplices: list[tuple[int, ...]]) -> list[list[int]]:
    """Oriented boundary map from ``simplices`` to ``faces`` (rows = faces)."""
    index = {f: i for i, f in enumerate(faces)}
    D = [[0] * len(simplices) for _ in faces]
    for j, S in enumerate(simplices):
        for i in range(len(S)):
            D[index[S[:i] + S[i + 1:]]][j] = -1 if i % 2 else 1
    return D


def _field_rank(D: list[list[int]], prime: Optional[int]) -> int:
    if not D or not D[0]:
        return 0
    if prime is None:
        if len(D) > len(D[0]):
            D = [list(c) for c in zip(*D)]
        return rank(D)
    if not is_prime(prime):
        raise ValueError(f"{prime} is not prime")
    A = np.array(D, dtype=np.int64)
    return int(K.rank_modp(A, A.shape[0], A.shape[1], prime))


def eta_star_homology(H: PointConfig, field: Optional[int] = None, *, force: bool = False) -> int:
    """rank H~_{n-1}(K^H) over Q (``field=None``) or GF(field); 0 if H does not span."""
    _guard_skeleton(H, force)
    if not H.spans():
        return 0
    sk = build_skeleton(H, force=force)
    n = H.n
    d_mid = boundary_matrix(sk[n - 2], sk[n - 1])
    d_top = boundary_matrix(sk[n - 1], sk[n])
    nullity = len(sk[n - 1]) - _field_rank(d_mid, field)
    return nullity - _field_rank(d_top, field)


# --- flag route -----------------------------------------------------------------


@dataclass(frozen=True)
class FlagValue:
    """Flag counts (q_n, ..., q_1), their product W[H] and the numerator weight."""

    q: tuple[int, ...]
    product: int
    top_weight: Fraction


class _SpanCache:
    """Bitmask of the configuration points lying in span(S), keyed by the set S."""

    def __init__(self, H: PointConfig):
        self.H = H
        self.masks: dict[frozenset, int] = {}

    def mask(self, S: frozenset) -> int:
        got = self.masks.get(S)
        if got is None:
            basis = build_row_basis([self.H.points[i] for i in sorted(S)])
            got = 0
            for i, pt in enumerate(self.H.points):
                if i in S or express_in_span(basis, pt) is not None:
                    got |= 1 << i
            self.masks[S] = got
        return got


def flag_of(W: Sequence[int], H: PointConfig, cache: Optional[_SpanCache] = None) -> FlagValue:
    """Combinatorial flag of the ordered tuple W (indices into H).

    L_l is the span of the LAST l entries of W and q_l counts the points of
    H on it. Raises :class:`DependentTupleError` for repeated or dependent
    entries.
    """
    W = tuple(W)
    n = H.n
    if len(W) != n:
        raise ValueError(f"tuple of length {len(W)}, expected {n}")
    if len(set(W)) != len(W):
        raise DependentTupleError(f"tuple {W} repeats a point")
    if cache is None:
        cache = _SpanCache(H)
    if not _independent(W, cache):
        raise DependentTupleError(f"tuple {W} is linearly dependent")
    q = []
    top = 0
    for l in range(n, 0, -1):
        mask = cache.mask(frozenset(W[n - l:]))
        if l == n:
            top = mask
        q.append(mask.bit_count())
    weight = Fraction(1) - sum((H.weights[i] for i in range(len(H)) if (top >> i) & 1), Fraction(0))
    return FlagValue(tuple(q), math.prod(q), weight)


def _independent(W, cache: _SpanCache) -> bool:
    # W[i] must lie outside the span of the entries after it
    for i in range(len(W) - 1):
        if (cache.mask(frozenset(W[i + 1:])) >> W[i]) & 1:
            return False
    return True


def _guard_flags(H: PointConfig, force: bool):
    if not force and (len(H) > MAX_FLAG_POINTS or H.n > MAX_FLAG_N):
        raise ValueError(f"flag-sum guard: T={len(H)} (max {MAX_FLAG_POINTS}), n={H.n} (max {MAX_FLAG_N})")


def independent_tuples(H: PointConfig, cache: Optional[_SpanCache] = None):
    """Ordered independent n-tuples, built from the last position backwards."""
    cache = cache or _SpanCache(H)
    n, T = H.n, len(H)

    def extend(suffix: tuple[int, ...], span_mask: int):
        if len(suffix) == n:
            yield suffix
            return
        for i in range(T):
            if not (span_mask >> i) & 1:
                new = (i,) + suffix
                yield from extend(new, cache.mask(frozenset(new)))

    yield from extend((), 0)


def eta_star_flagsum(H: PointConfig, *, force: bool = False) -> Fraction:
    _guard_flags(H, force)
    if not H.spans():
        return Fraction(0)
    cache = _SpanCache(H)
    total = Fraction(0)
    for W in independent_tuples(H, cache):
        f = flag_of(W, H, cache)
        total += f.top_weight / f.product
    return total


@dataclass
class FlagIdentityReport:
    homology: int
    flag_sums: list[Fraction]
    passed: bool

    def lines(self) -> list[str]:
        out = [f"homology rank: {self.homology}"]
        out += [f"flag sum [{i}]: {v}" for i, v in enumerate(self.flag_sums)]
        out.append("PASS" if self.passed else "FAIL")
        return out


def verify_theorem3(H: PointConfig, weight_sets, *, field: Optional[int] = None) -> FlagIdentityReport:
    """Homology rank once, flag sum per weight set; pass iff all are equal integers."""
    h = eta_star_homology(H, field)
    sums = [eta_star_flagsum(H.with_weights(ws)) for ws in weight_sets]
    ok = all(s.denominator == 1 and s == h for s in sums)
    return FlagIdentityReport(h, sums, ok)


def random_config(rng: np.random.Generator, *, max_ambient: int = 5, max_points: int = 8, coord: int = 2, spanning: bool = True) -> PointConfig:
    """Random configuration with small integer coordinates.

    With ``spanning`` the configuration spans the ambient space; otherwise it
    is confined to a random proper coordinate-free subspace.
    """
    while True:
        d = int(rng.integers(2, max_ambient + 1))
        T = int(rng.integers(d if spanning else 2, max_points + 1))
        if spanning:
            raw = rng.integers(-coord, coord + 1, size=(T, d))
        else:
            k = int(rng.integers(1, d))
            gens = rng.integers(-coord, coord + 1, size=(k, d))
            raw = rng.integers(-coord, coord + 1, size=(T, k)) @ gens
        pts = []
        for v in raw.tolist():
            if any(v):
                c = canonical_point(v)
                if c not in pts:
                    pts.append(c)
        if len(pts) < 2:
            continue
        H = PointConfig.create(pts)
        if H.spans() == spanning:
            return H


def random_weights(rng: np.random.Generator, T: int) -> list[Fraction]:
    """Weights summing to one with at least one negative entry."""
    ws = [Fraction(int(rng.integers(-5, 6)), int(rng.integers(1, 7))) for _ in range(T - 1)]
    if T > 1 and all(w >= 0 for w in ws):
        ws[0] = -abs(ws[0]) - 1
    return ws + [1 - sum(ws, Fraction(0))]


def standard_weight_sets(H: PointConfig, rng: np.random.Generator) -> list[list[Fraction]]:
    T = len(H)
    first = [Fraction(1)] + [Fraction(0)] * (T - 1)
    uniform = [Fraction(1, T)] * T
    return [first, uniform, random_weights(rng, T)]
