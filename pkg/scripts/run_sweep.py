#!/usr/bin/env python3
"""Shift counts and gain factors of systolic vs hyper-systolic products.

For every p in the sweep and every divisor K of p, multiply a seeded random
pair on the simulated ring, verify it against the naive product, and write
one CSV row with measured and predicted counts.

    python scripts/run_sweep.py --sweep 4,9,16,36,64 --cost per_hop
"""
import argparse
import csv
import sys
from fractions import Fraction

import numpy as np

from hypersystolic import (CostModel, RingMachine, complexity_counts, gain_factor_matmul, hyper_systolic_matmul,
                           systolic_matmul)
from hypersystolic.algorithms import PAPER, RAW, verify
from hypersystolic.bases import divisor_pairs


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sweep", default="4,9,16,25,36,64")
    ap.add_argument("--cost", choices=("constant", "per_hop"), default="constant")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    cost = CostModel(args.cost)
    rng = np.random.default_rng(args.seed)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["p", "K", "Ktilde", "systolic_T", "hyper_T", "hyper_raw", "systolic_cost", "hyper_cost",
                "R_measured", "R_predicted", "correct"])
    for p in (int(t) for t in args.sweep.split(",")):
        a, b = rng.integers(-9, 10, (p, p)), rng.integers(-9, 10, (p, p))
        sy = systolic_matmul(RingMachine(p, cost), a, b)
        sy_T = complexity_counts(sy, PAPER)
        for K, Kt in divisor_pairs(p):
            hy = hyper_systolic_matmul(RingMachine(p, cost), a, b, K)
            hy_T = complexity_counts(hy, PAPER)
            w.writerow([p, K, Kt, sy_T, hy_T, complexity_counts(hy, RAW), sy.total_cost, hy.total_cost,
                        Fraction(sy_T, hy_T), gain_factor_matmul(p, K, Kt).R,
                        str(verify(sy, a, b) and verify(hy, a, b)).lower()])


if __name__ == "__main__":
    main()
