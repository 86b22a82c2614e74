#!/usr/bin/env python3
"""Shift counts and live intermediate arrays of the block, cyclic and
block-cyclic mappings as the matrix grows on a fixed ring.

    python scripts/mapping_memory.py --p 4 --sizes 8,16,32
"""
import argparse
import csv
import sys

import numpy as np

from hypersystolic import (RingMachine, block_cyclic_multiply, block_multiply, complexity_counts, cyclic_multiply,
                           naive_multiply)
from hypersystolic.algorithms import PAPER


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p", type=int, default=4)
    ap.add_argument("--sizes", default="8,16,32")
    ap.add_argument("--inner-block", type=int, default=2)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    p, l = args.p, args.inner_block
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["n", "mapping", "shift_count_paper", "shift_count_raw", "elements_moved", "peak_live", "correct"])
    for n in (int(t) for t in args.sizes.split(",")):
        a, b = rng.integers(-9, 10, (n, n)), rng.integers(-9, 10, (n, n))
        want = naive_multiply(a, b)
        runs = {
            "block": block_multiply(RingMachine(p), a, b),
            "cyclic": cyclic_multiply(RingMachine(p), a, b),
            "cyclic_nomem": cyclic_multiply(RingMachine(p), a, b, memory_reduction=False),
        }
        if (n // p) % l == 0:
            runs[f"block_cyclic_l{l}"] = block_cyclic_multiply(RingMachine(p), a, b, l)
        for name, r in runs.items():
            w.writerow([n, name, complexity_counts(r, PAPER), r.shift_count, sum(e.elements for e in r.entries),
                        r.extra.get("peak_live_intermediates", ""),
                        str(bool(np.array_equal(r.result, want))).lower()])


if __name__ == "__main__":
    main()
