"""Desk-scale verification battery behind ``signspan verify``.

Each check returns a :class:`CheckResult`; the battery passes only if
every selected check does.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from . import eta
from .bounds import elo_column_bound, rm_case1_bound, sign_combination_hits
from .estimators import mc_estimate
from .events import (
    EventKind,
    EventSpec,
    count_kso_independent_tuples,
    decomposition_counts,
    exact_event_count,
    exact_event_probability,
    triple_pattern_count,
    witness_support_census,
)
from .linalg import rank
from .signspace import SignMatrix, make_rng, random_sign_bits


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail}"


def check_theorem3(samples: int = 100, seed: int = 0) -> CheckResult:
    rng = make_rng(seed, 1)
    configs = [eta.random_config(rng) for _ in range(samples)]
    configs += [eta.en_config(2), eta.en_config(3)]
    failures = 0
    for H in configs:
        rep = eta.verify_theorem3(H, eta.standard_weight_sets(H, rng))
        failures += not rep.passed
    # field independence on the structured configurations
    for H in configs[-2:]:
        q = eta.eta_star_homology(H)
        failures += any(eta.eta_star_homology(H, f) != q for f in (2, 3))
    return CheckResult("theorem3", failures == 0, f"{len(configs)} configurations, {failures} mismatches")


def check_closed_forms() -> CheckResult:
    bad = []
    for n in (2, 3, 4):
        a = n + 1
        basis, generic = eta.basis_config(a), eta.generic_config(a, [Fraction(1, a + 1)] * (a + 1))
        got = (
            eta.eta_star_homology(basis),
            eta.eta_star_flagsum(basis),
            eta.eta_star_homology(generic),
            eta.eta_star_flagsum(generic),
        )
        if got != (1, 1, n + 1, n + 1):
            bad.append((n, got))
    return CheckResult("closed-forms", not bad, "basis -> 1, generic -> n+1 for n=2,3,4" if not bad else f"{bad}")


def check_degenerate(count: int = 20, seed: int = 0) -> CheckResult:
    rng = make_rng(seed, 2)
    bad = 0
    for _ in range(count):
        H = eta.random_config(rng, spanning=False)
        bad += eta.eta_star_homology(H) != 0 or eta.eta_star_flagsum(H) != 0
    return CheckResult("degenerate-span", bad == 0, f"{count} non-spanning configurations, {bad} nonzero")


def check_small_p(workers: int = 1) -> CheckResult:
    cases = [(1, n) for n in range(1, 7)] + [(2, n) for n in range(1, 5)]
    bad = [c for c in cases if exact_event_probability(EventSpec(EventKind.KSO, *c), workers=workers) != 0]
    return CheckResult("small-p", not bad, f"{len(cases)} (p, n) cases" if not bad else f"nonzero at {bad}")


def check_triples() -> CheckResult:
    bad = [(n, s) for n in range(1, 7) for s in (1, -1) if triple_pattern_count(n, s) != 6**n]
    return CheckResult("triple-pattern", not bad, "6^n for n <= 6, both patterns" if not bad else f"{bad}")


def check_support2(random_pairs: int = 10_000, seed: int = 0) -> CheckResult:
    exhaustive = 0
    for n in range(1, 6):
        for a, b in itertools.product(range(1 << n), repeat=2):
            M = SignMatrix.from_bits(n, [a, b])
            if rank(M.to_signs()) == 2:
                exhaustive += 1
                witness_support_census(M)  # raises on a support-2 class
    rng = make_rng(seed, 3)
    sampled = 0
    while sampled < random_pairs:
        n = int(rng.integers(2, 17))
        M = SignMatrix.from_bits(n, random_sign_bits(rng, 2, n))
        if rank(M.to_signs()) == 2:
            witness_support_census(M)
            sampled += 1
    return CheckResult("support-2", True, f"{exhaustive} exhaustive + {sampled} random independent pairs")


def check_symmetry(workers: int = 1) -> CheckResult:
    bad = []
    for p, n in [(2, 3), (3, 3), (3, 4), (2, 6), (4, 4), (3, 5)]:
        specs = [EventSpec(EventKind.KSO, p, n), EventSpec(EventKind.RANK_DEFICIENT, p, n)]
        specs += [EventSpec(EventKind.SUPPORT_M, p, n, m) for m in range(1, p + 1)]
        for e in specs:
            if exact_event_count(e, symmetry=True, workers=workers) != exact_event_count(e, symmetry=False, workers=workers):
                bad.append(e)
    return CheckResult("symmetry-reduction", not bad, "reduced == unreduced for p*n <= 16" if not bad else f"{bad}")


def check_singular() -> CheckResult:
    p2 = exact_event_probability(EventSpec(EventKind.SINGULAR_PM1, 2, 2))
    p3 = exact_event_probability(EventSpec(EventKind.SINGULAR_PM1, 3, 3))
    p3u = exact_event_probability(EventSpec(EventKind.SINGULAR_PM1, 3, 3), symmetry=False)
    ok = p2 == Fraction(1, 2) and p3 == p3u
    return CheckResult("singular-exact", ok, f"P_2={p2}, P_3={p3}")


def check_tuple_inequality() -> CheckResult:
    # independent tuples vs all tuples of E_n points with the KSO property.
    # A rank-2 span of two E_n points holds no other sign vector, so dependent
    # tuples only contribute from n = 4 on: equality at n = 2, 3, strict after.
    details, ok = [], True
    for n in (2, 3, 4):
        lhs = count_kso_independent_tuples(n)
        count, _ = exact_event_count(EventSpec(EventKind.KSO, n, n + 1))
        rhs = count >> n  # 2^(n^2) P(n, n+1)
        details.append(f"n={n}: {lhs} {'<' if lhs < rhs else '=' if lhs == rhs else '>'} {rhs}")
        ok &= lhs < rhs if n >= 4 else lhs == rhs
    return CheckResult("tuple-inequality", ok, "; ".join(details))


def decomposition_violations(p_max: int = 4, n_max: int = 5, workers: int = 1) -> list[str]:
    """Failed instances of the R_m / P_m / P inequalities over exact counts."""
    tables = {(p, n): decomposition_counts(p, n, workers=workers) for p in range(1, p_max + 1) for n in range(1, n_max + 1)}
    bad = []
    for (p, n), t in tables.items():
        # inclusion of KSO in the union of support events and rank deficiency
        if t.kso > sum(t.indep_support[m] for m in range(3, p + 1)) + t.rank_deficient:
            bad.append(f"kso-cover p={p} n={n}")
        for m in range(1, p + 1):
            small = tables[(m, n)]
            if t.indep_support[m] * 2 ** (m * n) > math.comb(p, m) * small.indep_support[m] * 2 ** (p * n):
                bad.append(f"subset-union m={m} p={p} n={n}")
            if t.support[m] > t.indep_support[m] + t.rank_deficient:
                bad.append(f"support-split m={m} p={p} n={n}")
    return bad


def check_decomposition(workers: int = 1) -> CheckResult:
    bad = decomposition_violations(workers=workers)
    return CheckResult("decomposition", not bad, "all inequalities hold for p <= 4, n <= 5" if not bad else ", ".join(bad))


def check_case1_bound(workers: int = 1) -> CheckResult:
    bad = []
    for p in range(1, 5):
        for n in range(p, 6):
            t = decomposition_counts(p, n, workers=workers)
            for m in range(1, p + 1):
                if Fraction(t.indep_support[m], t.total) > rm_case1_bound(m, p, n):
                    bad.append((m, p, n))
    return CheckResult("case1-dominates", not bad, "bound >= exact R_m" if not bad else f"{bad}")


def random_nonzero_rationals(rng, m: int) -> list[Fraction]:
    out = []
    for _ in range(m):
        num = int(rng.integers(1, 4)) * (1 if rng.random() < 0.5 else -1)
        out.append(Fraction(num, int(rng.integers(1, 5))))
    return out


def check_elo(samples: int = 1000, seed: int = 0) -> CheckResult:
    rng = make_rng(seed, 4)
    worst = Fraction(0)
    bad = 0
    for _ in range(samples):
        m = int(rng.integers(1, 13))
        alpha = random_nonzero_rationals(rng, m)
        hits = sign_combination_hits(alpha)
        bad += hits > elo_column_bound(m) * 2**m
        worst = max(worst, Fraction(hits, 2**m) / elo_column_bound(m))
    return CheckResult("elo-dominance", bad == 0, f"{samples} vectors, worst ratio {float(worst):.4f}")


def check_determinism(seed: int = 0) -> CheckResult:
    e = EventSpec(EventKind.KSO, 5, 10)
    runs = {w: mc_estimate(e, 20_000, seed, workers=w) for w in (1, 2, 8)}
    same = len({(r.hits, r.p_hat, r.ci_low, r.ci_high) for r in runs.values()}) == 1
    counts = {w: exact_event_count(EventSpec(EventKind.KSO, 3, 5), workers=w) for w in (1, 2, 8)}
    same &= len(set(counts.values())) == 1
    return CheckResult("determinism", same, f"hits {runs[1].hits}/20000 at 1, 2, 8 workers")


def battery(samples: int = 100, seed: int = 0, workers: int = 1) -> dict[str, Callable[[], CheckResult]]:
    return {
        "theorem3": lambda: check_theorem3(samples, seed),
        "closed-forms": check_closed_forms,
        "degenerate": lambda: check_degenerate(seed=seed),
        "small-p": lambda: check_small_p(workers),
        "triples": check_triples,
        "support2": lambda: check_support2(seed=seed),
        "symmetry": lambda: check_symmetry(workers),
        "singular": check_singular,
        "tuple-inequality": check_tuple_inequality,
        "decomposition": lambda: check_decomposition(workers),
        "case1": lambda: check_case1_bound(workers),
        "elo": lambda: check_elo(seed=seed),
        "determinism": lambda: check_determinism(seed),
    }


def run_battery(only=None, samples: int = 100, seed: int = 0, workers: int = 1) -> list[CheckResult]:
    checks = battery(samples, seed, workers)
    names = list(checks) if not only else list(only)
    unknown = [n for n in names if n not in checks]
    if unknown:
        raise KeyError(f"unknown checks {unknown}; choose from {list(checks)}")
    return [checks[n]() for n in names]
