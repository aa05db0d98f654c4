"""Bit-packed {+1,-1}^n vectors and matrices.

Bit j of a word holds coordinate j, with 0 meaning +1 and 1 meaning -1, so
the all-ones vector is the zero word and projective canonicalization only
needs bit 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

MAX_N = 63
MAX_ENUM_N = 30


@dataclass(frozen=True)
class SignVector:
    n: int
    bits: int

    def __post_init__(self):
        if not 1 <= self.n <= MAX_N:
            raise ValueError(f"n={self.n} outside 1..{MAX_N}")
        if self.bits < 0 or self.bits >> self.n:
            raise ValueError(f"bits {self.bits:#x} do not fit in n={self.n}")

    @classmethod
    def from_signs(cls, signs: Sequence[int]) -> "SignVector":
        bits = 0
        for j, s in enumerate(signs):
            if s == -1:
                bits |= 1 << j
            elif s != 1:
                raise ValueError(f"entry {s!r} is not +1 or -1")
        return cls(len(signs), bits)

    def to_signs(self) -> tuple[int, ...]:
        return tuple(-1 if (self.bits >> j) & 1 else 1 for j in range(self.n))

    def __neg__(self) -> "SignVector":
        return SignVector(self.n, self.bits ^ ((1 << self.n) - 1))

    def dot(self, other: "SignVector") -> int:
        if other.n != self.n:
            raise ValueError("length mismatch")
        return self.n - 2 * (self.bits ^ other.bits).bit_count()

    def __str__(self) -> str:
        return "".join("-" if (self.bits >> j) & 1 else "+" for j in range(self.n))


@dataclass(frozen=True)
class SignMatrix:
    """Rows of equal length, stacked top to bottom."""

    rows: tuple[SignVector, ...]

    def __post_init__(self):
        if not self.rows:
            raise ValueError("a sign matrix needs at least one row")
        n = self.rows[0].n
        if any(r.n != n for r in self.rows):
            raise ValueError("rows have different lengths")

    @classmethod
    def from_signs(cls, rows: Sequence[Sequence[int]]) -> "SignMatrix":
        return cls(tuple(SignVector.from_signs(r) for r in rows))

    @classmethod
    def from_bits(cls, n: int, bits: Sequence[int]) -> "SignMatrix":
        return cls(tuple(SignVector(n, int(b)) for b in bits))

    @property
    def p(self) -> int:
        return len(self.rows)

    @property
    def n(self) -> int:
        return self.rows[0].n

    def to_signs(self) -> list[tuple[int, ...]]:
        return [r.to_signs() for r in self.rows]

    def bits_array(self) -> np.ndarray:
        return np.array([r.bits for r in self.rows], dtype=np.int64)

    def to_text(self) -> str:
        return "\n".join(str(r) for r in self.rows) + "\n"


def enumerate_sign_vectors(n: int) -> Iterator[SignVector]:
    """All 2^n vectors in increasing bit-pattern order."""
    if not 1 <= n <= MAX_ENUM_N:
        raise ValueError(f"n={n} outside 1..{MAX_ENUM_N}")
    for bits in range(1 << n):
        yield SignVector(n, bits)


def canonical_projective(v: SignVector) -> SignVector:
    """Representative of {v, -v} with first coordinate +1."""
    return -v if v.bits & 1 else v


def embed_en(b: SignVector) -> SignVector:
    """(b_1..b_n) -> (1, b_1..b_n)."""
    return SignVector(b.n + 1, b.bits << 1)


def en_points(n: int) -> list[SignVector]:
    return [embed_en(b) for b in enumerate_sign_vectors(n)]


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Counter-based Philox generator keyed by ``(seed, stream)``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, stream])))


def random_sign_bits(rng: np.random.Generator, count: int, n: int) -> np.ndarray:
    """``count`` uniform n-bit words (each bit an independent fair coin)."""
    return rng.integers(0, 1 << n, size=count, dtype=np.int64)


def random_sign_matrix(p: int, n: int, rng: np.random.Generator) -> SignMatrix:
    if p < 1 or n < 1:
        raise ValueError("p and n must be positive")
    return SignMatrix.from_bits(n, random_sign_bits(rng, p, n))


def parse_matrix_text(text: str) -> SignMatrix:
    """Parse rows of '+'/'-' characters; '#' lines and blank lines are skipped."""
    rows = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        bad = set(line) - {"+", "-"}
        if bad:
            raise ValueError(f"line {lineno}: unexpected characters {sorted(bad)}")
        if rows and len(line) != rows[0].n:
            raise ValueError(f"line {lineno}: row length {len(line)} != {rows[0].n}")
        rows.append(SignVector.from_signs([1 if c == "+" else -1 for c in line]))
    if not rows:
        raise ValueError("no matrix rows found")
    return SignMatrix(tuple(rows))
