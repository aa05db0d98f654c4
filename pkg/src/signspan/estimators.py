"""Seeded Monte Carlo estimates with Wilson score intervals.

Trials are cut into fixed-size blocks and block b draws from the generator
keyed by (seed, b). Workers take contiguous runs of blocks, so the hit
count depends only on (event, trials, seed) and never on scheduling.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from statistics import NormalDist

import numpy as np

from . import _kernels as K
from .events import EventKind, EventSpec, evaluate_event
from .linalg import rank
from .signspace import SignMatrix, make_rng, random_sign_bits

BLOCK = 8192

CSV_FIELDS = ["event", "p", "n", "m", "trials", "hits", "p_hat", "ci_low", "ci_high", "confidence", "seed", "workers"]


def wilson_interval(hits: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    if trials < 1:
        raise ValueError("trials must be positive")
    if not 0 <= hits <= trials:
        raise ValueError("hits must lie in [0, trials]")
    if not 0.0 < confidence < 1.0:
        raise ValueError("confidence must lie in (0, 1)")
    z = NormalDist().inv_cdf(0.5 + confidence / 2.0)
    phat = hits / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (phat + z2 / (2.0 * trials)) / denom
    margin = (z / denom) * math.sqrt(phat * (1.0 - phat) / trials + z2 / (4.0 * trials * trials))
    lo = 0.0 if hits == 0 else max(0.0, min(phat, center - margin))
    hi = 1.0 if hits == trials else min(1.0, max(phat, center + margin))
    return lo, hi


@dataclass(frozen=True)
class Estimate:
    event: EventSpec
    trials: int
    hits: int
    p_hat: float
    ci_low: float
    ci_high: float
    confidence: float
    seed: int
    workers: int

    @property
    def below_resolution(self) -> bool:
        return self.hits == 0

    @property
    def upper_one_sided(self) -> float:
        """Exact one-sided upper bound on the probability (Clopper-Pearson)."""
        if self.hits == 0:
            return 1.0 - (1.0 - self.confidence) ** (1.0 / self.trials)
        return self.ci_high

    def covers(self, value) -> bool:
        return self.ci_low <= float(value) <= self.ci_high

    def csv_row(self) -> dict:
        e = self.event
        return {
            "event": e.kind.value,
            "p": e.p,
            "n": e.n,
            "m": "" if e.m is None else e.m,
            "trials": self.trials,
            "hits": self.hits,
            "p_hat": repr(self.p_hat),
            "ci_low": repr(self.ci_low),
            "ci_high": repr(self.ci_high),
            "confidence": repr(self.confidence),
            "seed": self.seed,
            "workers": self.workers,
        }


def _block_hits(e: EventSpec, seed: int, block: int, count: int) -> int:
    rng = make_rng(seed, block)
    bits = random_sign_bits(rng, count * e.p, e.n).reshape(count, e.p)
    if min(e.p, e.n) <= K.MAX_KERNEL_RANK:
        return int(K.mc_block(bits, e.p, e.n, e.code, e.m or 0))
    if e.kind in (EventKind.RANK_DEFICIENT, EventKind.SINGULAR_PM1, EventKind.SINGULAR_01):
        zero_one = e.kind is EventKind.SINGULAR_01
        flags = np.zeros(count, dtype=np.bool_)
        K.singular_modp_block(bits, e.p, e.n, zero_one, flags)
        hits = 0
        # full rank mod a prime certifies full rank over Q; recheck the rest exactly
        for t in np.flatnonzero(flags):
            rows = [[((int(b) >> j) & 1) if zero_one else 1 - 2 * ((int(b) >> j) & 1) for j in range(e.n)] for b in bits[t]]
            hits += rank(rows) < e.p
        return hits
    return sum(evaluate_event(e, SignMatrix.from_bits(e.n, row)) for row in bits)


def mc_estimate(e: EventSpec, trials: int, seed: int, confidence: float = 0.95, workers: int = 1) -> Estimate:
    if trials < 1:
        raise ValueError("trials must be positive")
    if workers < 1:
        raise ValueError("workers must be positive")
    sizes = [min(BLOCK, trials - b) for b in range(0, trials, BLOCK)]
    nb = len(sizes)

    def run(w: int) -> int:
        lo, hi = w * nb // workers, (w + 1) * nb // workers
        return sum(_block_hits(e, seed, b, sizes[b]) for b in range(lo, hi))

    if workers == 1:
        hits = run(0)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            hits = sum(pool.map(run, range(workers)))
    lo, hi = wilson_interval(hits, trials, confidence)
    return Estimate(e, trials, hits, hits / trials, lo, hi, confidence, seed, workers)


def singularity_asymptote(n: int) -> Fraction:
    """Leading term (n-1)^2 2^(1-n) of the singularity probability."""
    return Fraction((n - 1) ** 2, 2 ** (n - 1))


@dataclass(frozen=True)
class SweepRow:
    n: int
    estimate: Estimate
    asymptote: Fraction

    @property
    def ratio(self) -> float:
        return self.estimate.p_hat / float(self.asymptote)


def singularity_sweep(n_max: int, trials: int, seed: int, *, n_min: int = 2, workers: int = 1, confidence: float = 0.95) -> list[SweepRow]:
    """Singularity estimates next to the leading asymptote; nothing is asserted."""
    if n_max > 64:
        raise ValueError("n_max must be at most 64")
    n_max = min(n_max, 63)
    rows = []
    for n in range(n_min, n_max + 1):
        est = mc_estimate(EventSpec(EventKind.SINGULAR_PM1, n, n), trials, seed, confidence, workers)
        rows.append(SweepRow(n, est, singularity_asymptote(n)))
    return rows
