"""Dynamic matcher that keeps explicit edges at every node at all times.

Each internal node stores the points it matches (per child slot), the
aggregated assignment and its explicit realization. After an update the node
works out which matched points left or joined, releases the partners of the
leavers, and re-inserts every unmatched red/blue pair with one shortest
augmenting path in the aggregated residual graph. Explicit edges change only
along those paths, which bounds the recourse.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .core import Color, Matching, PointRecord
from .dynamic import DynamicMatcher, UpdateReport
from .errors import InfeasibleError, InvariantError, NegativeCycleError
from .excess import ExcessDescriptor
from .ptree import PTreeNode, RestrictedPTree
from .static import (
    NodeMatchState,
    extract_full_matching,
    gamma_cost,
    match_node,
    select_matchable,
    y_members,
)

PATH_TOL = 1e-9
INF = math.inf


class EdgeRecorder:
    """Net edge changes since the last reset; an add and a remove cancel out."""

    def __init__(self) -> None:
        self.added: set[tuple[int, int]] = set()
        self.removed: set[tuple[int, int]] = set()

    def add(self, edge: tuple[int, int]) -> None:
        if edge in self.removed:
            self.removed.discard(edge)
        else:
            self.added.add(edge)

    def remove(self, edge: tuple[int, int]) -> None:
        if edge in self.added:
            self.added.discard(edge)
        else:
            self.removed.add(edge)

    def reset(self) -> None:
        self.added = set()
        self.removed = set()

    def __len__(self) -> int:
        return len(self.added) + len(self.removed)


@dataclass
class AugmentResult:
    path: list[int] = field(default_factory=list)  # slots: x-slot, blue, red, ..., y-slot
    length: float = 0.0

    @property
    def arcs(self) -> int:
        return max(len(self.path) - 1, 1)


def _dist(a, b) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def shortest_augmenting_path(
    centers: dict[int, tuple[float, float]],
    gamma: dict[tuple[int, int], int],
    xs: int,
    ys: int,
) -> AugmentResult:
    """Cheapest way to add one red unit at slot ``xs`` and one blue at ``ys``.

    Graph nodes are a source (the new red), a sink (the new blue) and the
    occupied slots. Red-to-blue arcs cost the center distance, blue-to-red arcs
    exist where the assignment carries weight and cost minus the distance.
    """
    reds = sorted({r for r, _ in gamma})
    blues = sorted({b for _, b in gamma} | {ys})
    nr = len(reds)
    size = 2 + nr + len(blues)
    w = np.full((size, size), INF)
    w[0, 1] = _dist(centers[xs], centers[ys])
    for j, b in enumerate(blues):
        w[0, 2 + nr + j] = _dist(centers[xs], centers[b])
    for i, r in enumerate(reds):
        w[2 + i, 1] = _dist(centers[r], centers[ys])
        for j, b in enumerate(blues):
            d = _dist(centers[r], centers[b])
            w[2 + i, 2 + nr + j] = d
            if gamma.get((r, b), 0) > 0:
                w[2 + nr + j, 2 + i] = -d
    try:
        length, path = kernels.bellman_ford(w, 0, 1, PATH_TOL)
    except ValueError:
        raise NegativeCycleError("augmenting graph has a negative cycle") from None
    if not path:
        raise InfeasibleError("no augmenting path between opposite colors")
    slots = [xs]
    for k in path[1:-1]:
        slots.append(reds[k - 2] if k < 2 + nr else blues[k - 2 - nr])
    slots.append(ys)
    return AugmentResult(slots, float(length))


class AdvancedMatcher(DynamicMatcher):
    """Dynamic matcher with explicit per-node edges and bounded recourse."""

    mode = "advanced"

    def _after_init(self) -> None:
        self.recorder = EdgeRecorder()
        self.structural_updates = 0
        self.last_paths: list[AugmentResult] = []
        for node in self.tree.iter_nodes():
            if not node.leaf:
                self._init_explicit(node, record=False)

    # explicit state --------------------------------------------------------

    def _init_explicit(self, node: PTreeNode, record: bool = True) -> None:
        st = node.state
        members = y_members(node, st.takes)
        st.ymembers = {s: set(ids) for s, ids in members.items()}
        st.partner = {}
        st.cells = {}
        queues = {s: iter(ids) for s, ids in members.items()}
        for (r, b), w in sorted(st.gamma.items()):
            for _ in range(w):
                red, blue = next(queues[r]), next(queues[b])
                self._link(st, red, blue, (r, b), record)
        st.delta = None

    def _link(self, st: NodeMatchState, red: int, blue: int, key: tuple[int, int],
              record: bool = True) -> None:
        link(st, red, blue, key, self.recorder if record else None)

    def _unlink(self, st: NodeMatchState, red: int) -> int:
        return unlink(st, red, self.recorder)

    def _drop_edges(self, node: PTreeNode) -> None:
        st = node.state
        if st is None:
            return
        if st.leaf_edges is not None:
            for e in st.leaf_edges:
                self.recorder.remove(e)
        elif st.cells is not None:
            for cell in st.cells.values():
                for e in cell.items():
                    self.recorder.remove(e)

    # updates -------------------------------------------------------------

    def _begin_update(self) -> None:
        self.recorder.reset()
        self.last_paths = []

    def _finish(self, report: UpdateReport) -> UpdateReport:
        report.recourse = len(self.recorder)
        if report.structural:
            self.structural_updates += 1
        return super()._finish(report)

    def _snapshot(self, rec: PointRecord | None, pid: int | None) -> dict:
        tree = self.tree
        if rec is not None:
            path = tree.locate_path(rec.pos)
        else:
            path = [tree.root]
            key = tree.points[pid].zkey
            while not path[-1].leaf:
                path.append(path[-1].children[tree.digit(key, path[-1].level)])
        snaps = {}
        for node in path:
            if node.parent is not None and node.count <= tree.cap + 1:
                snaps[(id(node.parent), node.slot)] = set(node.state.excess.ids())
        return snaps

    def _point_update(self, report: UpdateReport, rec: PointRecord | None, pid: int | None) -> None:
        tree = self.tree
        snaps = self._snapshot(rec, pid)
        ev = tree.insert(rec) if rec is not None else tree.delete(pid)
        report.events.append(ev)
        report.structural |= ev.structural
        for node in ev.removed:
            self._drop_edges(node)
        for node in ev.rebuilt:
            self._drop_edges(node)
        fresh = {id(n) for n in (*ev.new_nodes, *ev.rebuilt)}
        updated: set[int] = set()
        for node in ev.dirty():
            if id(node) in fresh:
                match_node(tree, node)
                if node.leaf:
                    for e in node.state.leaf_edges:
                        self.recorder.add(e)
                else:
                    self._init_explicit(node)
            elif node.leaf:
                self._update_leaf(node)
                updated.add(id(node))
            else:
                self._update_internal(node, snaps, fresh, updated)
                updated.add(id(node))
            report.touched += 1

    def _update_leaf(self, node: PTreeNode) -> None:
        old = node.state
        old_edges = set(old.leaf_edges)
        old_ex = set(old.excess.ids())
        st = match_node(self.tree, node)
        new_edges = set(st.leaf_edges)
        for e in old_edges - new_edges:
            self.recorder.remove(e)
        for e in new_edges - old_edges:
            self.recorder.add(e)
        new_ex = set(st.excess.ids())
        st.delta = (old_ex - new_ex, new_ex - old_ex)

    def apply_update(self, node: PTreeNode) -> None:
        """Incrementally refresh one affected node (children already current)."""
        if node.leaf:
            self._update_leaf(node)
        else:
            self._update_internal(node, {}, set(), set())

    def _slot_changes(self, node: PTreeNode, slot: int, t_new: int, snaps: dict,
                      fresh: set[int], updated: set[int]):
        """Excess delta ``(R, N)`` of one child and matched-set changes ``(out, in)``."""
        st = node.state
        child = node.children.get(slot)
        new_ex = child.state.excess if child is not None else ExcessDescriptor.empty()
        old_y = st.ymembers.get(slot, set())
        snap = snaps.get((id(node), slot))
        if snap is not None or (child is not None and id(child) in fresh):
            ids = new_ex.ids()
            now = set(ids)
            before = snap if snap is not None else set()
            new_y = set(ids[:t_new])
            return before - now, now - before, old_y - new_y, new_y - old_y
        if child is not None and id(child) in updated and child.state.delta is not None:
            removed, added = child.state.delta
        else:
            removed, added = set(), set()
        k = abs(t_new - len(old_y)) + len(removed) + len(added)
        out = {r for r in removed if r in old_y}
        into = {e for e in new_ex.slice(t_new - k, t_new) if e not in old_y}
        out.update(e for e in new_ex.slice(t_new, t_new + k) if e in old_y)
        if added and t_new > 0:
            pts = self.tree.points
            last = pts[new_ex[t_new - 1]].order
            into.update(a for a in added if pts[a].order <= last)
        return removed, added, out, into

    def _update_internal(self, node: PTreeNode, snaps: dict, fresh: set[int],
                         updated: set[int]) -> None:
        tree = self.tree
        st = node.state
        ordered = node.ordered_children()
        sel = select_matchable([(s, c.state.excess) for s, c in ordered])
        slots = set(node.children) | set(st.ymembers)
        slots.update(s for nid, s in snaps if nid == id(node))
        r_all: set[int] = set()
        n_all: set[int] = set()
        y_out: set[int] = set()
        y_in: set[int] = set()
        for slot in sorted(slots):
            t_new = sel.takes.get(slot, 0)
            removed, added, out, into = self._slot_changes(node, slot, t_new, snaps, fresh, updated)
            r_all |= removed
            n_all |= added
            y_out |= out
            y_in |= into
            members = st.ymembers.get(slot, set())
            members -= out
            members |= into
            if len(members) != t_new:
                raise InvariantError(
                    f"{node}: slot {slot} holds {len(members)} matched points, expected {t_new}"
                )
            if members:
                st.ymembers[slot] = members
            else:
                st.ymembers.pop(slot, None)

        pending: list[int] = []
        released: set[int] = set()
        for y in sorted(y_out):
            if y in released:
                continue
            entry = st.partner.get(y)
            if entry is None:
                raise InvariantError(f"{node}: matched point {y} has no partner")
            other, key = entry
            released.add(other)
            red = y if y in st.cells[key] else other
            self._unlink(st, red)
            g = st.gamma[key] - 1
            if g:
                st.gamma[key] = g
            else:
                del st.gamma[key]
            if other not in y_out:
                pending.append(other)
        pending.extend(y_in)
        pts = tree.points
        reds = sorted((p for p in pending if pts[p].color is Color.RED), key=lambda p: pts[p].order)
        blues = sorted((p for p in pending if pts[p].color is Color.BLUE), key=lambda p: pts[p].order)
        if len(reds) != len(blues):
            raise InvariantError(f"{node}: {len(reds)} red vs {len(blues)} blue points to re-match")
        st.takes = sel.takes
        st.colors = sel.colors
        for x, y in zip(reds, blues):
            self.last_paths.append(self.augment(node, x, y))

        st.excess = sel.excess
        st.gamma_cost = gamma_cost(tree, node, st.gamma)
        st.cost = sum(c.state.cost for _, c in ordered) + st.gamma_cost
        st.delta = ((r_all - y_out) | (y_in - n_all), (n_all - y_in) | (y_out - r_all))

    def augment(self, node: PTreeNode, x: int, y: int) -> AugmentResult:
        return augment_matching(self.tree, node, x, y, self.recorder)

    # queries -------------------------------------------------------------

    def query_matching_explicit(self) -> Matching:
        return extract_full_matching(self.tree)

    def query_recourse(self) -> tuple[set[tuple[int, int]], set[tuple[int, int]]]:
        """``(added, removed)`` edges of the last pair update."""
        return set(self.recorder.added), set(self.recorder.removed)

    def recourse_bound(self) -> int:
        return 2 * (self.tree.cap + 1) * self.tree.depth()


def empty_explicit_state() -> NodeMatchState:
    """Internal-node state with no matched points, ready for augmentations."""
    st = NodeMatchState()
    st.ymembers = {}
    st.partner = {}
    st.cells = {}
    return st


def link(st: NodeMatchState, red: int, blue: int, key: tuple[int, int],
         recorder: EdgeRecorder | None = None) -> None:
    st.cells.setdefault(key, {})[red] = blue
    st.partner[red] = (blue, key)
    st.partner[blue] = (red, key)
    if recorder is not None:
        recorder.add((red, blue))


def unlink(st: NodeMatchState, red: int, recorder: EdgeRecorder | None = None) -> int:
    """Remove the edge at red point ``red``; returns its blue partner."""
    blue, key = st.partner.pop(red)
    del st.partner[blue]
    cell = st.cells[key]
    del cell[red]
    if not cell:
        del st.cells[key]
    if recorder is not None:
        recorder.remove((red, blue))
    return blue


def augment_matching(tree: RestrictedPTree, node: PTreeNode, x: int, y: int,
                     recorder: EdgeRecorder | None = None) -> AugmentResult:
    """Add red ``x`` and blue ``y`` to ``node``'s matching along a shortest path.

    Updates the aggregated assignment and the explicit edges together and
    returns the slot path. When both points share a sub-cell they are matched
    to each other directly.
    """
    st = node.state
    xs = tree.digit(tree.points[x].zkey, node.level)
    ys = tree.digit(tree.points[y].zkey, node.level)
    if xs == ys:
        res = AugmentResult([xs, ys], 0.0)
    else:
        slots = {xs, ys} | {s for key in st.gamma for s in key}
        centers = {s: tree.child_center(node, s) for s in slots}
        res = shortest_augmenting_path(centers, st.gamma, xs, ys)
    path = res.path
    cur_red, cur_slot = x, path[0]
    for k in range(1, len(path) - 1, 2):
        b, r = path[k], path[k + 1]
        key = (r, b)
        rho, beta = next(iter(st.cells[key].items()))
        unlink(st, rho, recorder)
        _bump(st.gamma, key, -1)
        link(st, cur_red, beta, (cur_slot, b), recorder)
        _bump(st.gamma, (cur_slot, b), 1)
        cur_red, cur_slot = rho, r
    link(st, cur_red, y, (cur_slot, path[-1]), recorder)
    _bump(st.gamma, (cur_slot, path[-1]), 1)
    st.gamma_cost += res.length
    return res


def _bump(d: dict, key, step: int) -> None:
    v = d.get(key, 0) + step
    if v:
        d[key] = v
    else:
        d.pop(key, None)


def remove_pair_from_node(tree: RestrictedPTree, node: PTreeNode, x: int, y: int,
                          recorder: EdgeRecorder | None = None) -> list[AugmentResult]:
    """Take matched red ``x`` and blue ``y`` out of ``node``'s matching.

    Their former partners are re-matched to each other by one augmentation, so
    the assignment stays optimal. Matched-set bookkeeping is the caller's job.
    """
    st = node.state
    for pid in (x, y):
        if pid not in st.partner:
            raise InvariantError(f"point {pid} is not matched at {node}")
    bx, key_x = st.partner[x]
    unlink(st, x, recorder)
    _bump(st.gamma, key_x, -1)
    out = []
    if bx != y:
        ry, key_y = st.partner[y]
        unlink(st, ry, recorder)
        _bump(st.gamma, key_y, -1)
        out.append(augment_matching(tree, node, ry, bx, recorder))
    st.gamma_cost = gamma_cost(tree, node, st.gamma)
    return out
