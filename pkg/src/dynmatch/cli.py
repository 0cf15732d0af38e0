"""Command-line driver: ``dynmatch {gen,static,dynamic,drift,bench,hardness}``."""

from __future__ import annotations

import argparse
import csv
import sys
import time
from contextlib import contextmanager
from typing import Sequence

from .core import Color, MatcherConfig
from .errors import DynMatchError
from .harness import (
    load_points_csv,
    read_points,
    read_updates,
    run_drift,
    write_points,
)
from .harness.generators import GENERATORS
from .harness.io import SeriesRecord, write_report, write_scale
from .harness.workloads import bench_speedup, matcher_class, run_hardness
from .static import static_matching


@contextmanager
def _out(path: str | None):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _config(args) -> MatcherConfig:
    return MatcherConfig(p=args.p, D=args.D, seed=args.seed)


def _load_pairs(paths: Sequence[str]):
    if len(paths) == 1:
        reds, blues = read_points(paths[0])
        if blues is None:
            raise SystemExit(f"{paths[0]}: a single input file needs a 'color' column")
        return reds, blues
    if len(paths) == 2:
        return read_points(paths[0])[0], read_points(paths[1])[0]
    raise SystemExit("give one colored point file or two files (red, blue)")


def _series_csv(series, out: str | None) -> None:
    with _out(out) as fh:
        write_report(series, fh)


def cmd_gen(args) -> int:
    pts = GENERATORS[args.dist](args.n, args.seed)
    colors = None
    if args.color is not None:
        colors = [Color.RED if args.color == "R" else Color.BLUE] * len(pts)
    with _out(args.out) as fh:
        write_points(fh, pts, colors)
    return 0


def cmd_static(args) -> int:
    A, B = _load_pairs(args.inputs)
    t0 = time.perf_counter()
    sol, cost = static_matching(A, B, _config(args))
    secs = time.perf_counter() - t0
    n = len(A)
    m = sol.matching()
    print(f"n={n}")
    print(f"cost={cost:.6f}")
    print(f"wasserstein={(cost / n if n else 0.0):.6f}")
    print(f"explicit_cost={m.cost:.6f}")
    print(f"depth={sol.tree.depth()}")
    print(f"seconds={secs:.6f}")
    return 0


def cmd_dynamic(args) -> int:
    A, B = _load_pairs(args.inputs)
    m = matcher_class(args.mode)(A, B, config=_config(args))
    ops = read_updates(args.updates) if args.updates else []
    series = []
    for step, op in enumerate(ops, 1):
        t0 = time.perf_counter_ns()
        rep = m.insert_pair(op[1], op[2]) if op[0] == "I" else m.delete_pair(op[1], op[2])
        us = (time.perf_counter_ns() - t0) / 1000.0
        cost = m.query_cost()
        series.append(SeriesRecord(step, m.n, cost, cost / m.n if m.n else 0.0, us, rep.recourse))
    _series_csv(series, args.out)
    return 0


def cmd_drift(args) -> int:
    if args.trips:
        res = load_points_csv(args.trips)
        A, B = res.pickups, res.dropoffs
        print(f"loaded {len(A)} trips, filtered {res.filtered}, skipped {res.skipped}",
              file=sys.stderr)
        if args.out and args.out != "-":
            write_scale(args.out, res.scale)
    else:
        A, B = _load_pairs(args.inputs)
    series = run_drift(A, B, args.window, _config(args), args.mode)
    _series_csv(series, args.out)
    return 0


def cmd_bench(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",") if s]
    rows = bench_speedup(sizes, p=args.p, config=_config(args), mode=args.mode,
                         updates=args.updates, seed=args.seed)
    with _out(args.out) as fh:
        w = csv.writer(fh)
        w.writerow(("n", "update_us", "static_us", "speedup", "costs_agree"))
        for r in rows:
            w.writerow((r.n, f"{r.update_us:.6f}", f"{r.static_us:.6f}", f"{r.speedup:.6f}",
                        int(r.agree)))
    return 0


def cmd_hardness(args) -> int:
    rows = run_hardness(args.n, config=_config(args))
    with _out(args.out) as fh:
        w = csv.writer(fh)
        w.writerow(("step", "recourse", "bound", "exact_recourse", "structural"))
        for r in rows:
            w.writerow((r.step, r.recourse, r.bound, r.exact_recourse, int(r.structural)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dynmatch", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def tree_opts(sp, mode: bool = False) -> None:
        sp.add_argument("--p", type=int, default=8, help="branching parameter (power of 2)")
        sp.add_argument("--D", type=int, default=1 << 20, help="universe side (power of 2)")
        sp.add_argument("--seed", type=int, default=0)
        if mode:
            sp.add_argument("--mode", choices=["basic", "advanced"], default="basic")

    sp = sub.add_parser("gen", help="write generated points as CSV")
    sp.add_argument("--dist", choices=sorted(GENERATORS), default="uniform")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--color", choices=["R", "B"], help="add a color column")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("static", help="one static matching")
    sp.add_argument("inputs", nargs="+", help="colored point CSV, or red and blue CSVs")
    tree_opts(sp)
    sp.set_defaults(func=cmd_static)

    sp = sub.add_parser("dynamic", help="initialize, then replay an update stream")
    sp.add_argument("inputs", nargs="+")
    sp.add_argument("--updates", help="rows I,ax,ay,bx,by or D,idA,idB")
    sp.add_argument("--out")
    tree_opts(sp, mode=True)
    sp.set_defaults(func=cmd_dynamic)

    sp = sub.add_parser("drift", help="sliding-window run over two point streams")
    sp.add_argument("inputs", nargs="*")
    sp.add_argument("--trips", help="trip CSV (pickups red, dropoffs blue) instead of inputs")
    sp.add_argument("--window", type=int, default=10_000)
    sp.add_argument("--out")
    tree_opts(sp, mode=True)
    sp.set_defaults(func=cmd_drift)

    sp = sub.add_parser("bench", help="dynamic update time vs static rebuild")
    sp.add_argument("--sizes", default="1000,8000")
    sp.add_argument("--updates", type=int, default=100)
    sp.add_argument("--out")
    tree_opts(sp, mode=True)
    sp.set_defaults(func=cmd_bench)

    sp = sub.add_parser("hardness", help="recourse on the alternating line instance")
    sp.add_argument("--n", type=int, default=500)
    sp.add_argument("--out")
    tree_opts(sp)
    sp.set_defaults(func=cmd_hardness)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DynMatchError, OSError, ValueError) as exc:
        print(f"dynmatch: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
