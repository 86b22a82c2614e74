"""Batch front end.

    hypersystolic multiply --algo hyper --p 4 --random --seed 7 --verify
    hypersystolic bench --sweep 4,16
    hypersystolic bases --regular --K 2 --Ktilde 2
    hypersystolic bases --search --n 4 --cost per_hop
    hypersystolic reduce --n 16 --f sqdiff

Exit codes: 0 success, 1 usage or parse error, 2 verification mismatch,
3 infeasible configuration. All CSV goes to stdout.
"""
from __future__ import annotations

import argparse
import csv
import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .algorithms import (PAPER, HsParams, brute_force_reduce, complexity_counts, hyper_systolic_matmul,
                         pairwise_reduce, reports_to_csv, systolic_matmul, verify)
from .bases import (MAX_SEARCH_N, BasisPair, cannon_shift_count, gain_factor_matmul, h_range_complete,
                    optimal_basis_search, regular_bases, regular_two_array_bases)
from .dense import read_matrix, write_matrix
from .errors import HyperSystolicError
from .mapping import block_cyclic_multiply, block_multiply, cyclic_multiply, default_K
from .ring import CostModel, RingMachine
from .torus import cannon_matmul, semi_hyper_systolic_2d, semi_systolic_2d

EXIT_OK, EXIT_USAGE, EXIT_MISMATCH, EXIT_INFEASIBLE = 0, 1, 2, 3

ALGOS = ("systolic", "hyper", "cannon", "semi2d", "semihyper2d")
MAPPINGS = ("none", "block", "cyclic", "block_cyclic")
REDUCERS = {
    "product": (lambda x, z: x * z, lambda u, v: u + v),
    "sqdiff": (lambda x, z: (x - z) ** 2, lambda u, v: u + v),
    "maxdiff": (lambda x, z: abs(x - z), max),
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class ExperimentConfig:
    algo: str = "hyper"
    p: int = 4
    K: int | None = None
    n: int | None = None
    m: int | None = None
    mapping: str = "none"
    inner_block: int = 1
    cost_model: str = "constant"
    seed: int = 0
    trials: int = 1
    use_float: bool = False

    def __post_init__(self):
        if self.algo not in ALGOS:
            raise UsageError(f"unknown algorithm {self.algo!r}")
        if self.mapping not in MAPPINGS:
            raise UsageError(f"unknown mapping {self.mapping!r}")
        if self.p < 1 or self.trials < 1:
            raise UsageError("p and trials must be positive")
        if self.mapping != "none" and self.algo != "hyper":
            raise UsageError("block/cyclic mappings run the hyper-systolic algorithm; use --algo hyper")
        if self.K is None and self.algo in ("hyper", "semihyper2d"):
            self.K = default_K(self.p)

    @property
    def shape(self) -> tuple[int, int]:
        if self.mapping != "none":
            n = self.n or self.p
            return n, self.m or n
        if self.algo == "cannon":
            s = math.isqrt(self.p)
            if s * s != self.p:
                raise HyperSystolicError(f"Cannon needs a square processor count, got p={self.p}")
            return s, s
        return self.p, self.p

    def cost(self) -> CostModel:
        return CostModel(self.cost_model)


def _random_pair(cfg: ExperimentConfig, rng: np.random.Generator):
    n, m = cfg.shape
    if cfg.use_float:
        return rng.uniform(-1, 1, (n, m)), rng.uniform(-1, 1, (m, n))
    return rng.integers(-9, 10, (n, m)), rng.integers(-9, 10, (m, n))


def run(cfg: ExperimentConfig, a, b):
    p, cost = cfg.p, cfg.cost()
    if cfg.algo == "systolic":
        return systolic_matmul(RingMachine(p, cost), a, b)
    if cfg.algo == "hyper":
        machine = RingMachine(p, cost)
        if cfg.mapping == "block":
            return block_multiply(machine, a, b, cfg.K)
        if cfg.mapping == "cyclic":
            return cyclic_multiply(machine, a, b, cfg.K)
        if cfg.mapping == "block_cyclic":
            return block_cyclic_multiply(machine, a, b, cfg.inner_block, cfg.K)
        return hyper_systolic_matmul(machine, a, b, HsParams.for_p(p, cfg.K))
    if cfg.algo == "cannon":
        return cannon_matmul(cfg.shape[0], a, b, cost)
    if cfg.algo == "semi2d":
        return semi_systolic_2d(p, a, b, cost)
    return semi_hyper_systolic_2d(p, a, b, cfg.K, cost)


def _load(path: str):
    with open(path) as fh:
        return read_matrix(fh)


def cmd_multiply(args) -> int:
    cfg = ExperimentConfig(algo=args.algo, p=args.p, K=args.K, n=args.n, m=args.m, mapping=args.mapping,
                           inner_block=args.inner_block, cost_model=args.cost, seed=args.seed,
                           trials=args.trials, use_float=args.float)
    if args.random:
        rng = np.random.default_rng(cfg.seed)
        pairs = [_random_pair(cfg, rng) for _ in range(cfg.trials)]
    else:
        if not (args.a and args.b):
            raise UsageError("give --a and --b matrix files, or --random")
        pairs = [(_load(args.a), _load(args.b))]
    tol = 1e-12 if (cfg.use_float or any(x.dtype.kind in "fc" for pr in pairs for x in pr)) else 0.0
    reports = []
    for a, b in pairs:
        report = run(cfg, a, b)
        if args.verify:
            verify(report, a, b, tol)
        reports.append(report)
    sys.stdout.write(reports_to_csv(reports))
    if args.out:
        with open(args.out, "w") as fh:
            write_matrix(reports[-1].result, fh)
    if args.verify and not all(r.correct for r in reports):
        print("verification failed: result differs from the naive product", file=sys.stderr)
        return EXIT_MISMATCH
    return EXIT_OK


def _parse_sweep(text: str) -> list[int]:
    try:
        values = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"bad sweep list {text!r}") from None
    if not values or any(v < 1 for v in values):
        raise UsageError("sweep must list at least one positive p")
    return values


def cmd_bench(args) -> int:
    sweep = _parse_sweep(args.sweep)
    rng = np.random.default_rng(args.seed)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["p", "K", "Ktilde", "systolic_measured", "systolic_predicted", "hyper_measured",
                "hyper_predicted", "R_predicted", "R_measured", "cannon_measured", "cannon_predicted",
                "correct", "predicted_equals_measured"])
    for p in sweep:
        K = default_K(p)
        a, b = rng.integers(-9, 10, (p, p)), rng.integers(-9, 10, (p, p))
        sy = systolic_matmul(RingMachine(p), a, b)
        hy = hyper_systolic_matmul(RingMachine(p), a, b, HsParams.for_p(p, K))
        correct = verify(sy, a, b) and verify(hy, a, b)
        sy_count, hy_count = complexity_counts(sy, PAPER), complexity_counts(hy, PAPER)
        gain = gain_factor_matmul(p, K, p // K)
        row_ok = sy_count == p - 1 and hy_count == gain.T
        measured_R = Fraction(sy_count, hy_count)
        row_ok = row_ok and measured_R == gain.R
        cannon_m = cannon_p = ""
        s = math.isqrt(p)
        if s * s == p:
            ca, cb = rng.integers(-9, 10, (s, s)), rng.integers(-9, 10, (s, s))
            cr = cannon_matmul(s, ca, cb)
            correct = correct and verify(cr, ca, cb)
            cannon_m, cannon_p = complexity_counts(cr, PAPER), cannon_shift_count(p)
            row_ok = row_ok and cannon_m == cannon_p
        w.writerow([p, K, p // K, sy_count, p - 1, hy_count, gain.T, gain.R, measured_R,
                    cannon_m, cannon_p, str(correct).lower(), str(row_ok).lower()])
    return EXIT_OK


def _print_table(pair: BasisPair) -> None:
    _, table = h_range_complete(pair)
    sys.stdout.write(table.to_csv())


def cmd_bases(args) -> int:
    if not (args.regular or args.search):
        raise UsageError("choose --regular and/or --search")
    if args.regular:
        if args.K is None or args.Ktilde is None:
            raise UsageError("--regular needs --K and --Ktilde")
        A, B, C = regular_bases(args.K, args.Ktilde)
        print(f"A={A} B={B} C={C}")
        pair = regular_two_array_bases(args.K, args.Ktilde)
        print(f"two_array n={pair.n} A={pair.a} B={pair.b}")
        _print_table(pair)
    if args.search:
        if args.n is None:
            raise UsageError("--search needs --n")
        if args.n > MAX_SEARCH_N:
            print(f"refusing: n={args.n} exceeds the search cap of {MAX_SEARCH_N}", file=sys.stderr)
            return EXIT_INFEASIBLE
        cost = CostModel(args.cost)
        pair = optimal_basis_search(args.n, cost, args.max_len)
        print(f"n={pair.n} A={pair.a} B={pair.b} k={pair.a.k} kprime={pair.b.k} "
              f"length={pair.length} cost={pair.cost(cost)}")
        _print_table(pair)
    return EXIT_OK


def cmd_reduce(args) -> int:
    n = args.n
    if n < 1:
        raise UsageError("n must be positive")
    f, combine = REDUCERS[args.f]
    if args.basis == "search":
        pair = optimal_basis_search(n)
    else:
        K = default_K(n) if args.K is None else args.K
        if K < 1 or n % K:
            print(f"K={K} does not divide n={n}", file=sys.stderr)
            return EXIT_INFEASIBLE
        pair = regular_two_array_bases(K, n // K)
    if args.A is not None or args.B is not None:
        pair = BasisPair(tuple(int(t) for t in (args.A or "0").split(",")),
                         tuple(int(t) for t in (args.B or "0").split(",")), n)
    rng = np.random.default_rng(args.seed)
    x = [int(v) for v in rng.integers(-9, 10, n)]
    z = [int(v) for v in rng.integers(-9, 10, n)]
    machine = RingMachine(n)
    got = pairwise_reduce(machine, x, z, f, combine, pair)
    match = got == brute_force_reduce(x, z, f, combine)
    forward = sum(1 for e in machine.log.entries if e.phase == "forward")
    back = sum(1 for e in machine.log.entries if e.phase == "backshift")
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["n", "A", "B", "forward_shifts", "back_shifts", "total_shifts", "predicted_T", "match"])
    w.writerow([n, str(pair.a), str(pair.b), forward, back, forward + back,
                2 * pair.a.k + pair.b.k, str(match).lower()])
    return EXIT_OK if match else EXIT_MISMATCH


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hypersystolic", description="Hyper-systolic matrix multiplication on a simulated ring.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    mp = sub.add_parser("multiply", help="run one algorithm and print its RunReport CSV")
    mp.add_argument("--algo", choices=ALGOS, default="hyper")
    mp.add_argument("--p", type=int, default=4, help="ring cells (grid side for semi2d/semihyper2d)")
    mp.add_argument("--K", type=int, help="hyper-systolic stride; default: divisor of p nearest sqrt(p)")
    mp.add_argument("--a", help="left operand file")
    mp.add_argument("--b", help="right operand file")
    mp.add_argument("--random", action="store_true", help="use seeded random integer operands in [-9, 9]")
    mp.add_argument("--float", action="store_true", help="random doubles instead of integers (tol 1e-12)")
    mp.add_argument("--seed", type=int, default=0)
    mp.add_argument("--trials", type=int, default=1)
    mp.add_argument("--n", type=int)
    mp.add_argument("--m", type=int)
    mp.add_argument("--mapping", choices=MAPPINGS, default="none")
    mp.add_argument("--inner-block", type=int, default=1)
    mp.add_argument("--cost", choices=("constant", "per_hop"), default="constant")
    mp.add_argument("--verify", action="store_true")
    mp.add_argument("--out", help="write the (last) product matrix here")
    mp.set_defaults(func=cmd_multiply)

    bp = sub.add_parser("bench", help="measured vs predicted shift counts over a sweep of p")
    bp.add_argument("--sweep", required=True, help="comma-separated processor counts, e.g. 4,16")
    bp.add_argument("--seed", type=int, default=0)
    bp.set_defaults(func=cmd_bench)

    sp = sub.add_parser("bases", help="regular bases and exact optimal-basis search")
    sp.add_argument("--regular", action="store_true")
    sp.add_argument("--K", type=int)
    sp.add_argument("--Ktilde", type=int)
    sp.add_argument("--search", action="store_true")
    sp.add_argument("--n", type=int)
    sp.add_argument("--cost", choices=("constant", "per_hop"), default="constant")
    sp.add_argument("--max-len", type=int)
    sp.set_defaults(func=cmd_bases)

    rp = sub.add_parser("reduce", help="two-array hyper-systolic reduction vs the double loop")
    rp.add_argument("--n", type=int, required=True)
    rp.add_argument("--K", type=int)
    rp.add_argument("--basis", choices=("regular", "search"), default="regular")
    rp.add_argument("--A", help="explicit A strides, e.g. 0,1,1")
    rp.add_argument("--B", help="explicit B strides, e.g. 0,3,3")
    rp.add_argument("--f", choices=sorted(REDUCERS), default="product")
    rp.add_argument("--seed", type=int, default=0)
    rp.set_defaults(func=cmd_reduce)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # --help exits 0, parse errors exit 1
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except HyperSystolicError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
