"""Command line front end: ``phyorient {orient,gen,bench,basis}``."""

from __future__ import annotations

import argparse
import sys
from collections import Counter
from pathlib import Path

from phyorient import bench
from phyorient.constrained import BudgetExceededError
from phyorient.cyclebasis import minimal_cycle_basis
from phyorient.fileio import (
    ParseError,
    read_network,
    to_extended_newick,
    write_directed_file,
    write_network_file,
)
from phyorient.genny import RNG_NAME, GenConfig, generate
from phyorient.netmodel import reticulation_number
from phyorient.solvers import CLASSES, SolverTimeout, Verdict, check_orientation

EXIT_ORIENTED, EXIT_NO, EXIT_ERROR = 0, 1, 2


def cmd_orient(args) -> int:
    try:
        n = read_network(args.file)
    except (OSError, ParseError) as exc:
        print(f"error: {args.file}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    cls = CLASSES[args.cls]
    try:
        out = bench.run_solver(n, args.algo, cls, args.timeout, args.budget, args.parallel)
    except SolverTimeout:
        print("TIMEOUT")
        return EXIT_ERROR
    except (BudgetExceededError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR

    print(out.verdict.value)
    print(
        f"r={reticulation_number(n)} placements_tried={out.placements_tried} "
        f"constrained_calls={out.constrained_calls} elapsed={out.elapsed:.6f}"
    )
    if out.verdict is not Verdict.ORIENTED:
        return EXIT_NO
    problems = check_orientation(n, out.network, out.placement, cls)
    if problems:
        print("error: orientation failed verification: " + "; ".join(problems), file=sys.stderr)
        return EXIT_ERROR
    dest = Path(args.out) if args.out else Path(args.file).with_suffix(".oriented.txt")
    write_directed_file(
        dest,
        out.network,
        [f"algo {args.algo} class {args.cls}", f"root_edge {' '.join(out.root_edge)}"],
    )
    print(f"wrote {dest}")
    if args.newick:
        print(to_extended_newick(out.network))
    return EXIT_ORIENTED


def gen_filename(n: int, p: float, seed: int) -> str:
    return f"net_{n}_{p:g}_{seed}.txt"


def cmd_gen(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    hist: Counter[int] = Counter()
    for seed in range(args.seed, args.seed + args.count):
        cfg = GenConfig(args.leaves, args.pr, seed)
        g = generate(cfg)
        r = reticulation_number(g.network)
        hist[r] += 1
        write_network_file(
            out / gen_filename(args.leaves, args.pr, seed),
            g.network,
            [
                f"leaves {cfg.n_leaves} p_r {cfg.p_r:g} seed {cfg.seed}",
                f"rng {RNG_NAME} retries {g.trace.retries} seed_used {g.seed_used}",
                f"r {r}",
            ],
        )
    last = args.seed + args.count - 1
    hist_path = out / f"histogram_{args.leaves}_{args.pr:g}_{args.seed}-{last}.csv"
    lines = ["r,count"] + [f"{r},{hist[r]}" for r in sorted(hist)]
    hist_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {args.count} networks to {out}; r histogram {dict(sorted(hist.items()))}")
    return 0


def cmd_bench(args) -> int:
    algos = [a.strip() for a in args.algos.split(",") if a.strip()]
    for a in algos:
        if a not in bench.ALGOS:
            print(f"error: unknown algorithm {a!r}", file=sys.stderr)
            return EXIT_ERROR
    try:
        records = bench.run_bench(
            Path(args.corpus), algos, args.cls, args.timeout, args.budget, args.parallel
        )
    except (OSError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    out = Path(args.out)
    bench.write_records(out, records)
    rows = bench.summarize(records)
    summary = out.with_name(out.stem + ".summary.csv")
    bench.write_summary(summary, rows)
    for row in rows:
        print(
            f"r={row['r']} {row['solver']:9s} {row['truth']:7s} "
            f"{row['correct']}/{row['instances']} mean={row['mean_sec']}s"
        )
    print(f"wrote {out} and {summary}")
    return 0


def cmd_basis(args) -> int:
    try:
        n = read_network(args.file)
        b = minimal_cycle_basis(n)
    except (OSError, ParseError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    sys.stdout.write(b.dump())
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="phyorient",
        description="Orient undirected binary phylogenetic networks into a network class.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    o = sub.add_parser("orient", help="orient one network file")
    o.add_argument("file")
    o.add_argument("--algo", choices=bench.ALGOS, default="exact")
    o.add_argument("--class", dest="cls", choices=sorted(CLASSES), default="tree-child")
    o.add_argument("--timeout", type=float, default=None, help="seconds")
    o.add_argument("--parallel", type=int, default=1)
    o.add_argument("--budget", type=int, default=bench.DEFAULT_BASELINE_BUDGET,
                   help="max reticulation sets for the baseline")
    o.add_argument("--out", help="directed output file (default: <file>.oriented.txt)")
    o.add_argument("--newick", action="store_true", help="also print extended Newick")
    o.set_defaults(func=cmd_orient)

    g = sub.add_parser("gen", help="generate random networks")
    g.add_argument("--leaves", type=int, required=True)
    g.add_argument("--pr", type=float, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--count", type=int, default=1)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen)

    b = sub.add_parser("bench", help="run solvers over a corpus directory")
    b.add_argument("--corpus", required=True)
    b.add_argument("--algos", default="exact,heuristic,baseline")
    b.add_argument("--class", dest="cls", choices=sorted(CLASSES), default="tree-child")
    b.add_argument("--timeout", type=float, default=60.0)
    b.add_argument("--budget", type=int, default=bench.DEFAULT_BASELINE_BUDGET)
    b.add_argument("--parallel", type=int, default=1)
    b.add_argument("--out", required=True)
    b.set_defaults(func=cmd_bench)

    c = sub.add_parser("basis", help="print a minimal cycle basis, one cycle per line")
    c.add_argument("file")
    c.set_defaults(func=cmd_basis)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
