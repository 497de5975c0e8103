"""Long single-path run: time-averaged total queue length over the second half."""

import argparse

import numpy as np

from relaysched.config import ExperimentConfig
from relaysched.harness import simulate

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--horizon", type=int, default=10_000)
    ap.add_argument("--p", type=float, default=0.7)
    ap.add_argument("--q", type=float, default=0.4)
    ap.add_argument("--seed", type=int, default=6)
    args = ap.parse_args()
    cfg = ExperimentConfig(L=2, K=2, p=args.p, q=args.q, horizon=args.horizon, replications=1, seed=args.seed)
    for name in ("mb", "rr", "lcq-rand-route", "anti", "random"):
        tr = simulate(cfg, name, 0, keep_records=False)
        total = np.array(tr.cost_x) + np.array(tr.cost_y)
        print(f"{name:>15}: last-half mean total {total[len(total) // 2:].mean():9.2f}")
