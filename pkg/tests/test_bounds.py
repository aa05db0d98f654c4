"""Bounds: exact examples plus a second evaluator at higher precision."""

from __future__ import annotations

import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from signspan.bounds import (
    DEFAULT_C,
    DEFAULT_EPSILON,
    bounds_table,
    case_partition,
    elo_column_bound,
    lemma_bounds,
    misc_asymptotes,
    p3_main_term,
    rm_case1_bound,
    sign_combination_hits,
)

REL = mpmath.mpf(10) ** -12


def close(a, b):
    a, b = mpmath.mpf(a), mpmath.mpf(b)
    return abs(a - b) <= REL * max(abs(a), abs(b))


def test_p3_examples():
    assert p3_main_term(3, 4) == Fraction(81, 64)
    assert p3_main_term(3, 0) == 4
    assert p3_main_term(4, 10) == Fraction(16 * 59049, 1048576)
    with pytest.raises(ValueError):
        p3_main_term(2, 5)


def test_elo_examples():
    assert elo_column_bound(1) == 1
    assert elo_column_bound(2) == 1
    assert elo_column_bound(3) == Fraction(3, 4)
    assert elo_column_bound(4) == Fraction(3, 4)
    with pytest.raises(ValueError):
        elo_column_bound(0)


@given(st.integers(1, 12), st.data())
def test_elo_dominates_exhaustive_hits(m, data):
    alpha = data.draw(
        st.lists(st.fractions(min_value=-4, max_value=4, max_denominator=4).filter(bool), min_size=m, max_size=m)
    )
    hits = sign_combination_hits(alpha)
    # independent count with plain Python loops
    import itertools

    want = sum(1 for x in itertools.product([1, -1], repeat=m) if abs(sum(a * s for a, s in zip(alpha, x))) == 1)
    assert hits == want
    assert Fraction(hits, 2**m) <= elo_column_bound(m)


def test_elo_is_attained_by_all_ones_odd():
    # alpha = (1,...,1) with m odd hits the bound exactly
    for m in (1, 3, 5, 7):
        assert Fraction(sign_combination_hits([1] * m), 2**m) == elo_column_bound(m)


def test_rm_case1_examples():
    for n in range(1, 8):
        assert rm_case1_bound(n, n, n) == 2**n
    want = 2**10 * math.comb(5, 5) * math.comb(10, 5) * Fraction(10, 32) ** 5
    assert rm_case1_bound(5, 5, 10) == want
    assert rm_case1_bound(5, 5, 20) < rm_case1_bound(5, 5, 15) * 2**5
    with pytest.raises(ValueError):
        rm_case1_bound(3, 2, 5)
    with pytest.raises(ValueError):
        rm_case1_bound(3, 6, 5)


def test_case_partition_examples():
    eps = Fraction(1, 200)
    assert case_partition(5, 10**6, eps, DEFAULT_C) == 1
    assert case_partition(3, 100) == "direct"
    assert case_partition(4, 100) == "direct"
    for n in (64, 100, 1000, 4096):
        assert case_partition(n - 1, n, eps, DEFAULT_C) == 3
    # n=1024: n - c n / log2 n = 1024 - 7.36*102.4 = 270.336, so m = 512 sits above it
    assert case_partition(512, 1024, eps, DEFAULT_C) == 3
    assert case_partition(270, 1024, eps, DEFAULT_C) == 2
    assert case_partition(271, 1024, eps, DEFAULT_C) == 3
    # a case-2 midpoint for large n
    n = 2**20
    assert case_partition(n // 2, n, eps, DEFAULT_C) == 2


def test_case_partition_validation():
    with pytest.raises(ValueError):
        case_partition(5, 100, Fraction(1, 50))
    with pytest.raises(ValueError):
        case_partition(5, 100, DEFAULT_EPSILON, Fraction(7))
    with pytest.raises(ValueError):
        case_partition(2, 100)
    with pytest.raises(ValueError):
        case_partition(100, 100)


def test_case_thresholds_non_power_of_two():
    # n = 1000: threshold 1000 - 7360/log2(1000) = 261.49...
    t = 1000 - 7.36 * 1000 / math.log2(1000)
    m = math.floor(t)
    assert case_partition(m, 1000, Fraction(1, 200)) == 2
    assert case_partition(m + 1, 1000, Fraction(1, 200)) == 3


def _b_indep(n, eps, c):
    """Second evaluator: logs, 256 bits, different grouping."""
    with mpmath.workprec(256):
        eps = mpmath.mpf(eps.numerator) / eps.denominator
        c = mpmath.mpf(c.numerator) / c.denominator
        L = mpmath.log(n) / mpmath.log(2)
        log_b1 = n * (mpmath.log(5) - 3 * mpmath.log(2) + mpmath.log1p(eps))
        log_b2 = (3 * n - c * n / 2) * mpmath.log(2) + (c * n / (2 * L)) * (mpmath.log(2) - mpmath.log(mpmath.pi) - 2 * mpmath.log(eps))
        log_b3 = (2 * c * n / L) * (1 + mpmath.log(L) - mpmath.log(c)) + 2 * mpmath.log(n) - (n - c * n / L) * mpmath.log(2)
        return [mpmath.exp(x) for x in (log_b1, log_b2, log_b3)]


@pytest.mark.parametrize("n", range(4, 65))
def test_lemma_bounds_cross_evaluation(n):
    got = lemma_bounds(n)
    want = _b_indep(n, DEFAULT_EPSILON, DEFAULT_C)
    for g, w in zip(got, want):
        assert close(g, w)


def test_b1_examples():
    b1, _, _ = lemma_bounds(8, Fraction(1, 100))
    assert close(b1, (mpmath.mpf(5) / 8) ** 8 * (mpmath.mpf(101) / 100) ** 8)
    tiny = Fraction(1, 10**30)
    assert close(lemma_bounds(16, tiny)[0], (mpmath.mpf(5) / 8) ** 16)
    with pytest.raises(ValueError):
        lemma_bounds(3)


def test_misc_examples():
    t = misc_asymptotes(2)
    assert t.get("schlafli_bound", 2).value_exact == 14
    assert t.get("threshold_asymptote", 2).value_exact == 6
    assert misc_asymptotes(5).get("kso_tuple_bound", 5).value_exact == Fraction(25, 16)
    assert misc_asymptotes(5).get("singular_asymptote", 5).value_exact == Fraction(16, 16)
    with pytest.raises(ValueError):
        misc_asymptotes(1)


def _misc_indep(n):
    """Exact integers from a different summation order and lgamma-free arithmetic."""
    N = (1 << n) - 1
    binoms = [1]
    for i in range(1, n + 1):
        binoms.append(binoms[-1] * (N - i + 1) // i)
    return {
        "threshold_asymptote": 2 * binoms[n],
        "singular_asymptote": Fraction((n - 1) ** 2 * 2, 2**n),
        "schlafli_bound": 2 * sum(reversed(binoms)),
        "kso_tuple_bound": Fraction(2 * n * n, 2**n),
        "rank_deficiency_term": Fraction(2 * (n - 1) ** 2, 2**n),
    }


@pytest.mark.parametrize("n", list(range(2, 65)))
def test_misc_cross_evaluation(n):
    t = misc_asymptotes(n)
    for name, want in _misc_indep(n).items():
        row = t.get(name, n)
        assert row.value_exact == want
        with mpmath.workprec(256):
            assert close(row.value_real, mpmath.mpf(want.numerator) / want.denominator if isinstance(want, Fraction) else mpmath.mpf(want))


def test_schlafli_dominates_threshold_term():
    for n in range(2, 65):
        t = misc_asymptotes(n)
        assert t.get("schlafli_bound", n).value_exact >= t.get("threshold_asymptote", n).value_exact


def test_bounds_table_rows():
    table = bounds_table(range(2, 11))
    for name in ("threshold_asymptote", "singular_asymptote", "schlafli_bound", "kso_tuple_bound", "rank_deficiency_term", "elo_column_bound"):
        assert sum(1 for r in table if r.name == name) == 9
    assert sum(1 for r in table if r.name == "case1_bound") == 7
    for r in table:
        assert r.value_real >= 0
        if r.value_exact is not None:
            assert close(r.value_real, mpmath.mpf(r.value_exact.numerator) / r.value_exact.denominator)
    csv_text = table.to_csv()
    assert csv_text.splitlines()[0] == "name,n,p,m,epsilon,c,value_exact,value_real"


def test_bounds_table_with_p_and_m():
    table = bounds_table([6, 8], p=5, m=4)
    assert table.get("p3_main_term", 6).value_exact == p3_main_term(5, 6)
    assert table.get("rm_case1_bound", 8).value_exact == rm_case1_bound(4, 5, 8)


def test_case2_ratio_row_visible():
    table = bounds_table([16, 64])
    r = table.get("case2_over_5_8_pow_n", 64)
    assert close(r.value_real, table.get("case2_bound", 64).value_real / (mpmath.mpf(5) / 8) ** 64)
