"""Singularity estimates for n = 2..N next to the leading term (n-1)^2 2^(1-n)."""

from __future__ import annotations

import argparse
import csv
import sys

from signspan.estimators import singularity_sweep


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-max", type=int, default=40)
    ap.add_argument("--trials", type=int, default=100_000)
    ap.add_argument("--seed", type=int, required=True)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["n", "trials", "hits", "p_hat", "ci_low", "ci_high", "leading_term", "ratio"])
    for row in singularity_sweep(args.n_max, args.trials, args.seed, workers=args.workers):
        e = row.estimate
        w.writerow([row.n, e.trials, e.hits, repr(e.p_hat), repr(e.ci_low), repr(e.ci_high), repr(float(row.asymptote)), repr(row.ratio)])
        sys.stdout.flush()


if __name__ == "__main__":
    main()
