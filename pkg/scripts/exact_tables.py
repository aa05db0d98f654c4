"""Exhaustive event counts for small p x n, plus tuple counts and delta."""

from __future__ import annotations

import argparse
import csv
import sys

from signspan.events import count_kso_independent_tuples, decomposition_counts, delta


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p-max", type=int, default=4)
    ap.add_argument("--n-max", type=int, default=5)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["p", "n", "total", "kso", "rank_deficient", "m", "indep_support", "support"])
    for p in range(1, args.p_max + 1):
        for n in range(1, args.n_max + 1):
            t = decomposition_counts(p, n, workers=args.workers)
            for m in range(1, p + 1):
                w.writerow([p, n, t.total, t.kso, t.rank_deficient, m, t.indep_support[m], t.support[m]])

    print()
    w.writerow(["n", "kso_independent_tuples"])
    for n in range(1, 5):
        w.writerow([n, count_kso_independent_tuples(n)])

    print()
    w.writerow(["n", "k", "delta"])
    for n in range(1, 5):
        for k in range(1, n + 2):
            w.writerow([n, k, delta(n, k)])


if __name__ == "__main__":
    main()
