"""Closed-form bounds and leading terms, evaluated exactly where rational.

Leading terms of asymptotic statements are evaluated without their o(1)
factors. Irrational bounds use mpmath at ``PREC`` bits.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Optional

import mpmath
import numpy as np

PREC = 160
DEFAULT_C = Fraction(736, 100)
DEFAULT_EPSILON = Fraction(1, 128)
MAX_EPSILON = Fraction(1, 100)


def _mpf(x) -> mpmath.mpf:
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


def p3_main_term(p: int, n: int) -> Fraction:
    """4 C(p,3) (3/4)^n; a main term, not a probability (exceeds 1 at small n)."""
    if p < 3:
        raise ValueError("main term needs p >= 3")
    if n < 0:
        raise ValueError("n must be non-negative")
    return 4 * comb(p, 3) * Fraction(3, 4) ** n


def elo_column_bound(m: int) -> Fraction:
    """2 * 2^-m * C(m, floor(m/2)): chance a fixed nonzero combination of m signs hits +-1."""
    if m < 1:
        raise ValueError("m must be positive")
    return Fraction(2 * comb(m, m // 2), 2**m)


def rm_case1_bound(m: int, p: int, n: int) -> Fraction:
    """2^n C(p,m) C(n,m) [2^-m C(m, floor(m/2))]^(n-m)."""
    if not 1 <= m <= p <= n:
        raise ValueError(f"need 1 <= m <= p <= n, got m={m}, p={p}, n={n}")
    return 2**n * comb(p, m) * comb(n, m) * Fraction(comb(m, m // 2), 2**m) ** (n - m)


def _check_eps_c(epsilon: Fraction, c: Fraction):
    if not 0 < epsilon <= MAX_EPSILON:
        raise ValueError(f"epsilon must lie in (0, 1/100], got {epsilon}")
    if c < DEFAULT_C:
        raise ValueError(f"c must be at least 7.36, got {c}")


def _log2_threshold(n: int, c: Fraction) -> mpmath.mpf:
    return n - _mpf(c) * n / mpmath.log(n, 2)


def case_partition(m: int, n: int, epsilon=DEFAULT_EPSILON, c=DEFAULT_C):
    """Which of the three ranges of m the proof assigns; m in {3, 4} -> "direct"."""
    epsilon, c = Fraction(epsilon), Fraction(c)
    _check_eps_c(epsilon, c)
    if not 3 <= m <= n - 1:
        raise ValueError(f"need 3 <= m <= n - 1, got m={m}, n={n}")
    if m < 5:
        return "direct"
    if m <= epsilon**2 * n:
        return 1
    if n & (n - 1) == 0:
        # log2 n is an integer: compare exactly
        upper = n - c * n / (n.bit_length() - 1)
        return 2 if m <= upper else 3
    with mpmath.workprec(PREC):
        return 2 if m <= _log2_threshold(n, c) else 3


def lemma_bounds(n: int, epsilon=DEFAULT_EPSILON, c=DEFAULT_C) -> tuple[mpmath.mpf, mpmath.mpf, mpmath.mpf]:
    """Final bounds of the three m-ranges at (n, epsilon, c).

    b1 = (5/8)^n (1+eps)^n
    b2 = 2^(3n - cn/2) (2/(pi eps^2))^(cn / (2 log2 n))
    b3 = (e log2 n / c)^(2cn / log2 n) n^2 / 2^(n - cn/log2 n)
    """
    epsilon, c = Fraction(epsilon), Fraction(c)
    _check_eps_c(epsilon, c)
    if n < 4:
        raise ValueError("lemma bounds need n >= 4")
    with mpmath.workprec(PREC):
        eps, cc = _mpf(epsilon), _mpf(c)
        L = mpmath.log(n, 2)
        b1 = _mpf(case1_bound_exact(n, epsilon))
        b2 = mpmath.power(2, 3 * n - cc * n / 2) * mpmath.power(2 / (mpmath.pi * eps**2), cc * n / (2 * L))
        b3 = mpmath.power(mpmath.e * L / cc, 2 * cc * n / L) * n**2 / mpmath.power(2, n - cc * n / L)
        return +b1, +b2, +b3


def case1_bound_exact(n: int, epsilon) -> Fraction:
    return (Fraction(5, 8) * (1 + Fraction(epsilon))) ** n


@dataclass
class BoundRow:
    name: str
    n: int
    value_real: mpmath.mpf
    value_exact: Optional[Fraction] = None
    p: Optional[int] = None
    m: Optional[int] = None
    epsilon: Optional[Fraction] = None
    c: Optional[Fraction] = None


@dataclass
class BoundTable:
    rows: list[BoundRow] = field(default_factory=list)

    def __iter__(self):
        return iter(self.rows)

    def __len__(self):
        return len(self.rows)

    def get(self, name: str, n: int) -> BoundRow:
        return next(r for r in self.rows if r.name == name and r.n == n)

    def extend(self, other: "BoundTable"):
        self.rows.extend(other.rows)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["name", "n", "p", "m", "epsilon", "c", "value_exact", "value_real"])
        for r in self.rows:
            w.writerow(
                [
                    r.name,
                    r.n,
                    "" if r.p is None else r.p,
                    "" if r.m is None else r.m,
                    "" if r.epsilon is None else str(r.epsilon),
                    "" if r.c is None else str(r.c),
                    "" if r.value_exact is None else str(r.value_exact),
                    mpmath.nstr(r.value_real, 20),
                ]
            )
        return buf.getvalue()


def _row(name, n, exact=None, real=None, **kw) -> BoundRow:
    with mpmath.workprec(PREC):
        if real is None:
            real = _mpf(exact)
    return BoundRow(name, n, real, None if exact is None else Fraction(exact), **kw)


def misc_asymptotes(n: int) -> BoundTable:
    """Leading terms and the Schlafli bound at one n (exact integers/rationals)."""
    if n < 2:
        raise ValueError("n must be at least 2")
    N = 2**n - 1
    with mpmath.workprec(PREC):
        rows = [
            _row("threshold_asymptote", n, 2 * comb(N, n), 2 * mpmath.binomial(N, n)),
            _row("singular_asymptote", n, Fraction((n - 1) ** 2, 2 ** (n - 1)), (n - 1) ** 2 * mpmath.power(2, 1 - n)),
            _row("schlafli_bound", n, 2 * sum(comb(N, i) for i in range(n + 1)), 2 * mpmath.fsum(mpmath.binomial(N, i) for i in range(n + 1))),
            _row("kso_tuple_bound", n, Fraction(n**2, 2 ** (n - 1)), mpmath.mpf(n) ** 2 / mpmath.power(2, n - 1)),
            _row("rank_deficiency_term", n, Fraction((n - 1) ** 2, 2 ** (n - 1)), mpmath.mpf(n - 1) ** 2 / mpmath.power(2, n - 1), p=n),
        ]
    return BoundTable(rows)


def lemma_table(n: int, epsilon=DEFAULT_EPSILON, c=DEFAULT_C) -> BoundTable:
    epsilon, c = Fraction(epsilon), Fraction(c)
    b1, b2, b3 = lemma_bounds(n, epsilon, c)
    with mpmath.workprec(PREC):
        ref = mpmath.power(mpmath.mpf(5) / 8, n)
        rows = [
            _row("case1_bound", n, case1_bound_exact(n, epsilon), b1, epsilon=epsilon, c=c),
            _row("case2_bound", n, None, b2, epsilon=epsilon, c=c),
            _row("case3_bound", n, None, b3, epsilon=epsilon, c=c),
            _row("case2_over_5_8_pow_n", n, None, b2 / ref, epsilon=epsilon, c=c),
        ]
    return BoundTable(rows)


def bounds_table(ns, *, p: Optional[int] = None, m: Optional[int] = None, epsilon=DEFAULT_EPSILON, c=DEFAULT_C) -> BoundTable:
    """Rows for each n: leading terms, the ELO bound at m = n, case bounds (n >= 4),
    and the main term / case-1 bound when p (and m) are given and valid."""
    table = BoundTable()
    for n in ns:
        table.extend(misc_asymptotes(n))
        table.rows.append(_row("elo_column_bound", n, elo_column_bound(n), m=n))
        if n >= 4:
            table.extend(lemma_table(n, epsilon, c))
        if p is not None and p >= 3:
            table.rows.append(_row("p3_main_term", n, p3_main_term(p, n), p=p))
        if p is not None and m is not None and 1 <= m <= p <= n:
            table.rows.append(_row("rm_case1_bound", n, rm_case1_bound(m, p, n), p=p, m=m))
    return table


def sign_combination_hits(alpha) -> int:
    """Number of x in {+-1}^m with alpha . x in {-1, +1}, by exhaustion."""
    alpha = [Fraction(a) for a in alpha]
    if not alpha or any(a == 0 for a in alpha):
        raise ValueError("alpha must be a non-empty vector of nonzero rationals")
    m = len(alpha)
    L = math.lcm(*(a.denominator for a in alpha))
    ints = [int(a * L) for a in alpha]
    X = 1 - 2 * ((np.arange(1 << m)[:, None] >> np.arange(m)[None, :]) & 1)
    if max(abs(v) for v in ints) * m < 1 << 62:
        sums = X @ np.array(ints, dtype=np.int64)
        return int(np.count_nonzero(np.abs(sums) == L))
    return sum(1 for x in X.tolist() if abs(sum(a * s for a, s in zip(ints, x))) == L)
