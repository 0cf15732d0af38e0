"""Time the compiled and pure-Python kernel backends side by side.

    python3 benchmarks/bench_kernels.py --repeat 5
"""

from __future__ import annotations

import argparse
import math
import time

import numpy as np

from dynmatch import kernels
from dynmatch.core import MatcherConfig
from dynmatch.harness import gen_gaussian, gen_uniform
from dynmatch.static import static_matching


def best_of(fn, repeat: int) -> float:
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def cases(rng: np.random.Generator):
    pts = rng.integers(0, 1000, size=(2, 60, 2)).astype(float)
    cost = np.hypot(pts[0][:, None, 0] - pts[1][None, :, 0], pts[0][:, None, 1] - pts[1][None, :, 1])
    supply = rng.integers(1, 30, size=32)
    demand = np.zeros(32, dtype=np.int64)
    np.add.at(demand, rng.integers(0, 32, size=int(supply.sum())), 1)
    tcost = rng.random((32, 32)) * 100
    graph = np.where(rng.random((130, 130)) < 0.5, rng.random((130, 130)) * 10, math.inf)
    np.fill_diagonal(graph, math.inf)
    A, B = gen_uniform(2000, 1), gen_gaussian(2000, 2)
    cfg = MatcherConfig(p=8, seed=0)
    return {
        "hungarian 60x60": lambda: kernels.hungarian(cost),
        "transport 32x32": lambda: kernels.transport(tcost, supply, demand),
        "bellman-ford 130": lambda: kernels.bellman_ford(graph, 0, 129),
        "static n=2000 p=8": lambda: static_matching(A, B, cfg),
    }


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    names = sorted(kernels.BACKENDS)
    if len(names) < 2:
        print("compiled backend not built; only timing the Python kernels")
    original = kernels.BACKEND
    table: dict[str, dict[str, float]] = {}
    try:
        for name in names:
            kernels.use_backend(name)
            for label, fn in cases(np.random.default_rng(args.seed)).items():
                table.setdefault(label, {})[name] = best_of(fn, args.repeat)
    finally:
        kernels.use_backend(original)

    print(f"{'case':<20}" + "".join(f"{n:>12}" for n in names) + ("     speedup" if len(names) > 1 else ""))
    for label, row in table.items():
        line = f"{label:<20}" + "".join(f"{row[n] * 1e3:>10.2f}ms" for n in names)
        if len(names) > 1:
            line += f"{row['python'] / row['cython']:>11.1f}x"
        print(line)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
