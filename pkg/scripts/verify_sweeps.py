"""Exhaustive interchange-identity and LCQ/SQ/LCQ membership sweeps."""

import argparse
import time

from relaysched.harness import exhaustive_theorem1_sweep, lemma2_exhaustive_sweep

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dim-max", type=int, default=5)
    ap.add_argument("--vector-entry-max", type=int, default=6)
    ap.add_argument("--qmax", type=int, default=3, help="max L, K and queue entry")
    args = ap.parse_args()

    t0 = time.time()
    lem = lemma2_exhaustive_sweep(args.dim_max, args.vector_entry_max)
    print(f"interchange identity: {lem.cases} cases on {lem.vectors} vectors, {lem.mismatches} mismatches "
          f"({time.time() - t0:.1f}s)")
    t0 = time.time()
    thm = exhaustive_theorem1_sweep(args.qmax, args.qmax, args.qmax)
    print(f"LCQ/SQ/LCQ membership: {thm.states} states, {thm.membership_failures} failures, "
          f"{thm.empty_intersections} empty intersections ({time.time() - t0:.1f}s)")
    for ex in thm.empty_examples[:3]:
        print("  empty intersection e.g.", ex)
