"""Compare the homology and flag-sum routes for eta* on random configurations."""

from __future__ import annotations

import argparse
import time

from signspan import eta
from signspan.signspace import make_rng


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--max-ambient", type=int, default=5)
    ap.add_argument("--max-points", type=int, default=8)
    ap.add_argument("--field", type=int, default=None)
    args = ap.parse_args()

    rng = make_rng(args.seed, 1)
    t0 = time.perf_counter()
    failures = 0
    for i in range(args.samples):
        H = eta.random_config(rng, max_ambient=args.max_ambient, max_points=args.max_points)
        rep = eta.verify_theorem3(H, eta.standard_weight_sets(H, rng), field=args.field)
        if not rep.passed:
            failures += 1
            print(f"mismatch #{i}: {H.to_json()}")
            print("\n".join("  " + line for line in rep.lines()))
    dt = time.perf_counter() - t0
    print(f"{args.samples} configurations, {failures} mismatches, {dt:.1f}s")
    raise SystemExit(1 if failures else 0)


if __name__ == "__main__":
    main()
