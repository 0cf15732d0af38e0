"""Drift, speedup and hardness workloads."""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from ..advanced import AdvancedMatcher
from ..core import MatcherConfig
from ..dynamic import DynamicMatcher
from ..errors import InstanceTooLargeError
from ..static import static_from_records, static_matching
from .generators import gen_gaussian, gen_uniform
from .io import SeriesRecord

MODES = {"basic": DynamicMatcher, "dynamic-basic": DynamicMatcher,
         "advanced": AdvancedMatcher, "dynamic-advanced": AdvancedMatcher}


def matcher_class(mode: str) -> type[DynamicMatcher]:
    try:
        return MODES[mode]
    except KeyError:
        raise ValueError(f"unknown mode {mode!r}; pick one of {sorted(MODES)}") from None


def run_drift(stream_a: Iterable, stream_b: Iterable, window: int,
              config: MatcherConfig | None = None, mode: str = "basic") -> list[SeriesRecord]:
    """Sliding window: each step inserts a pair and, once full, evicts the oldest."""
    if window < 1:
        raise ValueError("window must be >= 1")
    m = matcher_class(mode)(config=config)
    live: deque[tuple[int, int]] = deque()
    series: list[SeriesRecord] = []
    for step, (a, b) in enumerate(zip(stream_a, stream_b), 1):
        t0 = time.perf_counter_ns()
        rep = m.insert_pair(a, b)
        recourse = rep.recourse
        live.append(rep.ids)
        if len(live) > window:
            recourse += m.delete_pair(*live.popleft()).recourse
        us = (time.perf_counter_ns() - t0) / 1000.0
        cost = m.query_cost()
        series.append(SeriesRecord(step, m.n, cost, cost / m.n, us, recourse))
    return series


def plateau(series: Sequence[SeriesRecord], window: int) -> float:
    """Mean Wasserstein estimate over the steps after the window filled."""
    tail = [r.wasserstein for r in series if r.step > window] or [r.wasserstein for r in series]
    return sum(tail) / len(tail)


@dataclass
class BenchRow:
    n: int
    update_us: float
    static_us: float
    speedup: float
    dynamic_cost: float
    static_cost: float

    @property
    def agree(self) -> bool:
        return abs(self.dynamic_cost - self.static_cost) <= 1e-6 * max(1.0, self.static_cost)


def bench_speedup(sizes: Sequence[int], p: int = 8, config: MatcherConfig | None = None,
                  mode: str = "basic", updates: int = 100, warmup: int = 10,
                  seed: int = 0) -> list[BenchRow]:
    """Mean pair-insert time against one static rebuild, for each size."""
    config = config or MatcherConfig(p=p, seed=seed)
    cls = matcher_class(mode)
    rows = []
    for n in sizes:
        extra = updates + warmup
        A = gen_uniform(n + extra, seed)
        B = gen_gaussian(n + extra, seed + 1)
        m = cls(A[:n], B[:n], config=config, audit=False)
        t0 = time.perf_counter_ns()
        static_matching(A[:n], B[:n], config)
        static_us = (time.perf_counter_ns() - t0) / 1000.0
        for i in range(n, n + warmup):
            m.insert_pair(A[i], B[i])
        t0 = time.perf_counter_ns()
        for i in range(n + warmup, n + extra):
            m.insert_pair(A[i], B[i])
        update_us = (time.perf_counter_ns() - t0) / 1000.0 / max(updates, 1)
        check = static_from_records(list(m.points.values()), config).cost
        rows.append(BenchRow(n, update_us, static_us, static_us / update_us,
                             m.query_cost(), check))
    return rows


@dataclass
class HardnessInstance:
    A: list[tuple[int, int]]
    B: list[tuple[int, int]]
    updates: list[tuple[tuple[int, int], tuple[int, int]]] = field(default_factory=list)
    offset: int = 0


def gen_hardness_line(n: int, D: int = 1 << 20, y: int = 1) -> HardnessInstance:
    """Alternating red/blue points at unit spacing, extended at both ends.

    Initially reds sit at ``-n, -n+2, ..., n-2`` and blues at ``-n+1, ..., n-1``.
    Update ``k`` adds one point just left of the leftmost and one just right of
    the rightmost, colored so the line keeps alternating. Everything is
    translated by ``2n + 1`` to stay nonnegative.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    off = 2 * n + 1
    if 4 * n + 1 >= D // 2:
        raise InstanceTooLargeError(f"line of {4 * n + 2} cells does not fit D/2 = {D // 2}")
    A = [(x + off, y) for x in range(-n, n - 1, 2)]
    B = [(x + off, y) for x in range(-n + 1, n, 2)]
    ups = []
    for k in range(1, n + 1):
        x = n + k
        if k % 2:
            red, blue = x - 1, -x
        else:
            red, blue = -x, x - 1
        ups.append(((red + off, y), (blue + off, y)))
    return HardnessInstance(A, B, ups, off)


def line_matching(reds: Sequence[int], blues: Sequence[int]) -> set[tuple[int, int]]:
    """Optimal matching on a line: i-th red with i-th blue in sorted order."""
    return set(zip(sorted(reds), sorted(blues)))


@dataclass
class HardnessRow:
    step: int
    recourse: int
    bound: int
    exact_recourse: int
    structural: bool


def run_hardness(n: int, p: int = 8, seed: int = 0, config: MatcherConfig | None = None
                 ) -> list[HardnessRow]:
    """Advanced matcher recourse vs. the exact line optimum's edge flips."""
    inst = gen_hardness_line(n)
    config = config or MatcherConfig(p=p, seed=seed)
    m = AdvancedMatcher(inst.A, inst.B, config=config, audit=False)
    reds = [a[0] for a in inst.A]
    blues = [b[0] for b in inst.B]
    exact = line_matching(reds, blues)
    rows = []
    for step, (a, b) in enumerate(inst.updates, 1):
        rep = m.insert_pair(a, b)
        reds.append(a[0])
        blues.append(b[0])
        nxt = line_matching(reds, blues)
        rows.append(HardnessRow(step, rep.recourse, m.recourse_bound(), len(exact ^ nxt),
                                rep.structural))
        exact = nxt
    return rows
