"""Geometry primitives and the matching / transportation data model."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple

import numpy as np

from .errors import AssignmentValidationError, UnknownIdError

DEFAULT_P = 8
DEFAULT_D = 1 << 20

COST_TOL = 1e-9


class Point(NamedTuple):
    x: int
    y: int


class Color(enum.IntEnum):
    RED = 0
    BLUE = 1

    @property
    def other(self) -> "Color":
        return Color.BLUE if self is Color.RED else Color.RED

    @property
    def code(self) -> str:
        return "R" if self is Color.RED else "B"


@dataclass(frozen=True, slots=True)
class PointRecord:
    """An identified, colored lattice point.

    ``pos`` is the shifted position used by the tree, ``raw`` the caller's
    coordinates. ``zkey`` caches the point's z-order key for the tree it lives in.
    """

    id: int
    pos: Point
    raw: Point
    color: Color
    zkey: int = 0

    @property
    def order(self) -> tuple[int, int]:
        return (self.zkey, self.id)


def is_power_of_two(v: int) -> bool:
    return v > 0 and v & (v - 1) == 0


@dataclass(frozen=True)
class MatcherConfig:
    """Tree parameters plus the random shift.

    ``shift`` defaults to a uniform draw from ``{0..D/2-1}^2`` seeded by ``seed``.
    """

    p: int = DEFAULT_P
    D: int = DEFAULT_D
    seed: int = 0
    shift: tuple[int, int] | None = None

    def __post_init__(self) -> None:
        if self.p < 2 or not is_power_of_two(self.p):
            raise ValueError(f"p must be a power of two >= 2, got {self.p}")
        if not is_power_of_two(self.D) or self.D < 2 * self.p:
            raise ValueError(f"D must be a power of two >= 2p, got {self.D}")
        if self.shift is None:
            rng = np.random.default_rng(self.seed)
            sx, sy = rng.integers(0, self.D // 2, size=2)
            object.__setattr__(self, "shift", (int(sx), int(sy)))
        elif not all(0 <= s < self.D // 2 for s in self.shift):
            raise ValueError(f"shift {self.shift} outside [0, D/2)")


@dataclass(slots=True)
class Matching:
    edges: list[tuple[int, int]] = field(default_factory=list)
    cost: float = 0.0

    def __len__(self) -> int:
        return len(self.edges)

    def edge_set(self) -> set[tuple[int, int]]:
        return set(self.edges)


@dataclass(frozen=True, slots=True)
class TransportInstance:
    """Supplies are ``(location, s >= 0)``; demands are ``(location, d <= 0)``."""

    supplies: tuple[tuple[tuple[float, float], int], ...] = ()
    demands: tuple[tuple[tuple[float, float], int], ...] = ()

    @classmethod
    def build(cls, supplies: Iterable, demands: Iterable) -> "TransportInstance":
        return cls(
            tuple((tuple(loc), int(s)) for loc, s in supplies),
            tuple((tuple(loc), int(d)) for loc, d in demands),
        )

    @property
    def imbalance(self) -> int:
        return sum(s for _, s in self.supplies) + sum(d for _, d in self.demands)

    @property
    def total_supply(self) -> int:
        return sum(s for _, s in self.supplies)


@dataclass(slots=True)
class Assignment:
    weights: dict[tuple[int, int], int] = field(default_factory=dict)
    cost: float = 0.0

    def total(self) -> int:
        return sum(self.weights.values())


def distance(p, q) -> float:
    return math.hypot(p[0] - q[0], p[1] - q[1])


def matching_cost(points: Mapping[int, PointRecord], m: Matching) -> float:
    total = 0.0
    for r, b in m.edges:
        try:
            pr = points[r]
            pb = points[b]
        except KeyError as exc:
            raise UnknownIdError(f"unknown point id {exc.args[0]}") from None
        total += distance(pr.pos, pb.pos)
    return total


def check_assignment(t: TransportInstance, a: Assignment) -> None:
    """Raise if ``a`` violates the row/column sums of ``t``."""
    rows = [0] * len(t.supplies)
    cols = [0] * len(t.demands)
    for (i, j), w in a.weights.items():
        if not (0 <= i < len(rows)) or not (0 <= j < len(cols)):
            raise AssignmentValidationError(f"edge ({i}, {j}) outside the instance")
        if w < 0:
            raise AssignmentValidationError(f"negative weight on edge ({i}, {j})")
        rows[i] += w
        cols[j] += w
    for i, (_, s) in enumerate(t.supplies):
        if rows[i] != s:
            raise AssignmentValidationError(
                f"supply row {i}: assigned {rows[i]} but supply is {s}"
            )
    for j, (_, d) in enumerate(t.demands):
        if cols[j] != -d:
            raise AssignmentValidationError(
                f"demand column {j}: assigned {cols[j]} but demand is {d}"
            )


def assignment_cost(t: TransportInstance, a: Assignment) -> float:
    check_assignment(t, a)
    total = 0.0
    for (i, j), w in a.weights.items():
        if w:
            total += w * distance(t.supplies[i][0], t.demands[j][0])
    return total


@dataclass(frozen=True, slots=True)
class Violation:
    kind: str  # "duplicate endpoint" | "unmatched" | "color mismatch" | "unknown id"
    point_id: int
    detail: str = ""


@dataclass(slots=True)
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}


def validate_matching(
    points: Mapping[int, PointRecord], m: Matching, require_perfect: bool = False
) -> ValidationReport:
    report = ValidationReport()
    seen: set[int] = set()
    for r, b in m.edges:
        for pid, want in ((r, Color.RED), (b, Color.BLUE)):
            rec = points.get(pid)
            if rec is None:
                report.violations.append(Violation("unknown id", pid))
                continue
            if rec.color is not want:
                report.violations.append(
                    Violation("color mismatch", pid, f"expected {want.name}")
                )
            if pid in seen:
                report.violations.append(Violation("duplicate endpoint", pid))
            seen.add(pid)
    if require_perfect:
        for pid in points:
            if pid not in seen:
                report.violations.append(Violation("unmatched", pid))
    return report
