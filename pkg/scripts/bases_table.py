#!/usr/bin/env python3
"""Optimal stride bases against the best regular pair for a range of n.

    python scripts/bases_table.py --max-n 30
    python scripts/bases_table.py --max-n 10 --cost per_hop
"""
import argparse
import csv
import math
import sys
import time

from hypersystolic import CostModel, optimal_basis_search, regular_two_array_bases
from hypersystolic.bases import divisor_pairs


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--min-n", type=int, default=2)
    ap.add_argument("--max-n", type=int, default=30)
    ap.add_argument("--cost", choices=("constant", "per_hop"), default="constant")
    args = ap.parse_args(argv)

    cost = CostModel(args.cost)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["n", "A", "B", "length", "cost", "regular_best_cost", "lower_bound", "seconds"])
    for n in range(args.min_n, args.max_n + 1):
        t0 = time.perf_counter()
        pair = optimal_basis_search(n, cost)
        dt = time.perf_counter() - t0
        regular = min(regular_two_array_bases(K, Kt).cost(cost) for K, Kt in divisor_pairs(n))
        w.writerow([n, str(pair.a), str(pair.b), pair.length, pair.cost(cost), regular,
                    math.ceil(2 * math.sqrt(n)) - 2, f"{dt:.3f}"])
        sys.stdout.flush()


if __name__ == "__main__":
    main()
