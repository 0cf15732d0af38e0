"""Fully dynamic maintenance of the hierarchical matching under pair updates."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Sequence

from .core import Color, Matching, MatcherConfig, PointRecord
from .errors import (
    ColorMismatchError,
    EmptyInstanceError,
    IntegrityError,
    UnknownIdError,
)
from .ptree import PTreeNode, RestrictedPTree, StructuralEvents, build_tree
from .static import extract_full_matching, match_node, match_subtree, records_for


def audit_enabled() -> bool:
    return os.environ.get("DYNMATCH_AUDIT", "") == "1"


@dataclass
class UpdateReport:
    ids: tuple[int, int]
    touched: int = 0
    structural: bool = False
    recourse: int = 0
    events: list[StructuralEvents] = field(default_factory=list, repr=False)


class DynamicMatcher:
    """Maintains per-node implicit matchings; pair updates run as two point updates.

    Ids are handed out sequentially from 0: the initial pairs get ``(2i, 2i+1)``
    and each inserted pair continues the sequence, red first.
    """

    mode = "basic"

    def __init__(self, A: Sequence = (), B: Sequence = (), config: MatcherConfig | None = None,
                 audit: bool | None = None) -> None:
        self.config = config or MatcherConfig()
        scratch = RestrictedPTree(self.config.p, self.config.D, self.config.shift)
        recs = records_for(A, B, scratch)
        self.tree = build_tree(recs, self.config.p, self.config.D, self.config.shift)
        match_subtree(self.tree, self.tree.root)
        self._next_id = len(recs)
        self.audit = audit_enabled() if audit is None else audit
        self.last_report: UpdateReport | None = None
        self.updates = 0
        self._after_init()
        if self.audit:
            self.run_audit()

    def _after_init(self) -> None:
        pass

    # bookkeeping ---------------------------------------------------------

    @property
    def n(self) -> int:
        """Number of live pairs."""
        return len(self.tree.points) // 2

    @property
    def points(self) -> dict[int, PointRecord]:
        return self.tree.points

    def run_audit(self) -> None:
        from .audit import audit_matcher

        audit_matcher(self)

    # updates -------------------------------------------------------------

    def insert_pair(self, a, b) -> UpdateReport:
        """Insert red ``a`` and blue ``b`` (raw coordinates)."""
        ra = self.tree.shifted_record(self._next_id, a, Color.RED)
        rb = self.tree.shifted_record(self._next_id + 1, b, Color.BLUE)
        self._next_id += 2
        report = UpdateReport((ra.id, rb.id))
        self._begin_update()
        for rec in (ra, rb):
            self._point_update(report, rec, None)
        return self._finish(report)

    def delete_pair(self, id_a: int, id_b: int) -> UpdateReport:
        pts = self.tree.points
        for pid, want in ((id_a, Color.RED), (id_b, Color.BLUE)):
            if pid not in pts:
                raise UnknownIdError(f"unknown or deleted point id {pid}")
            if pts[pid].color is not want:
                raise ColorMismatchError(f"point {pid} is {pts[pid].color.name}, expected {want.name}")
        report = UpdateReport((id_a, id_b))
        self._begin_update()
        for pid in (id_a, id_b):
            self._point_update(report, None, pid)
        return self._finish(report)

    def _begin_update(self) -> None:
        pass

    def _finish(self, report: UpdateReport) -> UpdateReport:
        root = self.tree.root.state
        if root.excess.total:
            raise IntegrityError(f"root excess holds {root.excess.total} points after a pair update")
        self.updates += 1
        self.last_report = report
        if self.audit:
            self.run_audit()
        return report

    def _point_update(self, report: UpdateReport, rec: PointRecord | None, pid: int | None) -> None:
        ev = self.tree.insert(rec) if rec is not None else self.tree.delete(pid)
        report.events.append(ev)
        report.structural |= ev.structural
        fresh = {id(n) for n in (*ev.new_nodes, *ev.rebuilt)}
        for node in ev.dirty():
            if id(node) in fresh:
                match_node(self.tree, node)
            else:
                self.apply_update(node)
            report.touched += 1

    def apply_update(self, node: PTreeNode) -> None:
        """Refresh an affected node whose children are already up to date."""
        match_node(self.tree, node)

    # queries -------------------------------------------------------------

    def query_cost(self) -> float:
        st = self.tree.root.state
        return st.cost if st is not None else 0.0

    def query_matching(self) -> Matching:
        return extract_full_matching(self.tree)

    def wasserstein_estimate(self) -> float:
        n = self.n
        if n == 0:
            raise EmptyInstanceError("no points: the estimate is undefined")
        return self.query_cost() / n

    def depth(self) -> int:
        return self.tree.depth()


def matching_delta(before: Matching, after: Matching) -> tuple[set, set]:
    """Edges added and removed between two reported matchings."""
    b, a = before.edge_set(), after.edge_set()
    return a - b, b - a
