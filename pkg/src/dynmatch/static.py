"""Bottom-up static matching over the restricted p-tree.

Leaves are solved exactly. An internal node pairs up the excess points its
children forward, after snapping them to their sub-cell centers, and forwards
whatever stays unmatched.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .core import (
    Color,
    Matching,
    MatcherConfig,
    PointRecord,
    TransportInstance,
    matching_cost,
)
from .errors import IntegrityError, InvariantError, SizeMismatchError
from .exact import hungarian, transport_counts
from .excess import ExcessDescriptor
from .ptree import PTreeNode, RestrictedPTree, build_tree

SQRT2 = math.sqrt(2.0)


class NodeMatchState:
    """Per-node matching state.

    Leaves fill ``leaf_edges``/``leaf_cost``. Internal nodes fill ``takes``
    (points matched per child slot), ``colors`` (excess color per slot) and
    ``gamma`` (aggregated assignment keyed by ``(red_slot, blue_slot)``). The
    remaining fields are used only by the advanced matcher.
    """

    __slots__ = (
        "excess", "cost", "leaf_edges", "leaf_cost", "takes", "colors", "gamma",
        "gamma_cost", "ymembers", "partner", "cells", "delta",
    )

    def __init__(self) -> None:
        self.excess = ExcessDescriptor.empty()
        self.cost = 0.0
        self.leaf_edges: list[tuple[int, int]] | None = None
        self.leaf_cost = 0.0
        self.takes: dict[int, int] = {}
        self.colors: dict[int, Color] = {}
        self.gamma: dict[tuple[int, int], int] = {}
        self.gamma_cost = 0.0
        self.ymembers: dict[int, set[int]] | None = None
        self.partner: dict[int, int] | None = None
        self.cells: dict[tuple[int, int], dict[int, int]] | None = None
        self.delta: tuple[set[int], set[int]] | None = None

    @property
    def eta(self) -> int:
        """Signed size of the excess: positive for red, negative for blue."""
        return self.excess.total if self.excess.color is Color.RED else -self.excess.total

    @property
    def matched(self) -> int:
        """Number of points matched at this node (both colors)."""
        if self.leaf_edges is not None:
            return 2 * len(self.leaf_edges)
        return sum(self.takes.values())


@dataclass
class Selection:
    takes: dict[int, int]
    colors: dict[int, Color]
    excess: ExcessDescriptor

    def red_slots(self) -> list[int]:
        return [s for s, c in sorted(self.colors.items()) if c is Color.RED and self.takes[s]]

    def blue_slots(self) -> list[int]:
        return [s for s, c in sorted(self.colors.items()) if c is Color.BLUE and self.takes[s]]


def select_matchable(children: Sequence[tuple[int, ExcessDescriptor]]) -> Selection:
    """Choose which child excess points get matched here.

    ``children`` is ``(slot, excess)`` in z-order. Every minority-color point is
    taken; majority points are taken child by child until the counts balance,
    splitting at most one child at its smallest z-order points.
    """
    kred = kblue = 0
    for _, e in children:
        if e.color is Color.RED:
            kred += e.total
        else:
            kblue += e.total
    minority = Color.RED if kred <= kblue else Color.BLUE
    need = min(kred, kblue)
    takes: dict[int, int] = {}
    colors: dict[int, Color] = {}
    parts = []
    for slot, e in children:
        if not e.total:
            continue
        colors[slot] = e.color
        if e.color is minority:
            takes[slot] = e.total
            continue
        t = min(need, e.total)
        need -= t
        takes[slot] = t
        if t < e.total:
            parts.append((e, t, e.total - t))
    return Selection(takes, colors, ExcessDescriptor(minority.other, parts))


def aggregated_instance(
    tree: RestrictedPTree, node: PTreeNode, sel: Selection
) -> tuple[TransportInstance, list[int], list[int]]:
    """Snap the matched points to sub-cell centers with multiplicities."""
    reds = sel.red_slots()
    blues = sel.blue_slots()
    inst = TransportInstance.build(
        [(tree.child_center(node, s), sel.takes[s]) for s in reds],
        [(tree.child_center(node, s), -sel.takes[s]) for s in blues],
    )
    return inst, reds, blues


def implicit_matching(
    tree: RestrictedPTree, node: PTreeNode, sel: Selection, certify: bool = False
) -> tuple[dict[tuple[int, int], int], float]:
    """Optimal aggregated assignment ``(red_slot, blue_slot) -> weight`` and its cost."""
    reds = sel.red_slots()
    blues = sel.blue_slots()
    if not reds:
        return {}, 0.0
    weights, cost = transport_counts(
        [tree.child_center(node, s) for s in reds],
        [sel.takes[s] for s in reds],
        [tree.child_center(node, s) for s in blues],
        [sel.takes[s] for s in blues],
        certify=certify,
    )
    return {(reds[i], blues[j]): w for (i, j), w in weights.items()}, cost


def gamma_cost(tree: RestrictedPTree, node: PTreeNode, gamma: dict[tuple[int, int], int]) -> float:
    total = 0.0
    for (r, b), w in sorted(gamma.items()):
        if w:
            cr = tree.child_center(node, r)
            cb = tree.child_center(node, b)
            total += w * math.hypot(cr[0] - cb[0], cr[1] - cb[1])
    return total


def y_members(node: PTreeNode, takes: dict[int, int]) -> dict[int, list[int]]:
    """Materialize, per slot, the child excess points matched at ``node``."""
    return {
        slot: node.children[slot].state.excess.slice(0, t) for slot, t in takes.items() if t
    }


def explicit_matching(
    node: PTreeNode, takes: dict[int, int], gamma: dict[tuple[int, int], int]
) -> list[tuple[int, int]]:
    """Realize an aggregated assignment on the actual points, pairing in z-order."""
    queues = {s: iter(ids) for s, ids in y_members(node, takes).items()}
    edges: list[tuple[int, int]] = []
    for (r, b), w in sorted(gamma.items()):
        for _ in range(w):
            try:
                edges.append((next(queues[r]), next(queues[b])))
            except (KeyError, StopIteration):
                raise InvariantError(
                    f"{node}: assignment uses more points than sub-cells {r}/{b} hold"
                ) from None
    for s, q in queues.items():
        if next(q, None) is not None:
            raise InvariantError(f"{node}: sub-cell {s} has unmatched selected points")
    return edges


def match_leaf(tree: RestrictedPTree, node: PTreeNode) -> NodeMatchState:
    st = NodeMatchState()
    pts = tree.points
    reds: list[PointRecord] = []
    blues: list[PointRecord] = []
    for pid in node.points:
        rec = pts[pid]
        (reds if rec.color is Color.RED else blues).append(rec)
    k = min(len(reds), len(blues))
    if len(reds) >= len(blues):
        st.excess = ExcessDescriptor.from_ids(Color.RED, [r.id for r in reds[k:]])
    else:
        st.excess = ExcessDescriptor.from_ids(Color.BLUE, [b.id for b in blues[k:]])
    m = hungarian(reds[:k], blues[:k])
    st.leaf_edges = m.edges
    st.leaf_cost = m.cost
    st.cost = m.cost
    return st


def match_internal(tree: RestrictedPTree, node: PTreeNode) -> NodeMatchState:
    st = NodeMatchState()
    ordered = node.ordered_children()
    sel = select_matchable([(s, c.state.excess) for s, c in ordered])
    st.takes = sel.takes
    st.colors = sel.colors
    st.excess = sel.excess
    st.gamma, st.gamma_cost = implicit_matching(tree, node, sel)
    st.cost = sum(c.state.cost for _, c in ordered) + st.gamma_cost
    return st


def match_node(tree: RestrictedPTree, node: PTreeNode) -> NodeMatchState:
    """Recompute ``node.state`` from its points (leaf) or its children's states."""
    node.state = match_leaf(tree, node) if node.leaf else match_internal(tree, node)
    return node.state


def match_subtree(tree: RestrictedPTree, top: PTreeNode) -> None:
    order: list[PTreeNode] = []
    stack = [top]
    while stack:
        n = stack.pop()
        order.append(n)
        stack.extend(n.children.values())
    for n in reversed(order):
        match_node(tree, n)


def records_for(A: Sequence, B: Sequence, tree: RestrictedPTree) -> list[PointRecord]:
    """Shifted records with ids ``2i`` (red) and ``2i + 1`` (blue)."""
    if len(A) != len(B):
        raise SizeMismatchError(f"|A| = {len(A)} but |B| = {len(B)}")
    recs = []
    for i, (a, b) in enumerate(zip(A, B)):
        recs.append(tree.shifted_record(2 * i, a, Color.RED))
        recs.append(tree.shifted_record(2 * i + 1, b, Color.BLUE))
    return recs


@dataclass
class StaticSolution:
    tree: RestrictedPTree
    cost: float

    def matching(self) -> Matching:
        return extract_full_matching(self.tree)


def static_from_records(records: Sequence[PointRecord], config: MatcherConfig) -> StaticSolution:
    tree = build_tree(records, config.p, config.D, config.shift)
    match_subtree(tree, tree.root)
    return StaticSolution(tree, tree.root.state.cost)


def static_matching(A: Sequence, B: Sequence, config: MatcherConfig | None = None
                    ) -> tuple[StaticSolution, float]:
    """Shift, build the tree and match bottom-up. Returns the solution and its cost."""
    config = config or MatcherConfig()
    scratch = RestrictedPTree(config.p, config.D, config.shift)
    sol = static_from_records(records_for(A, B, scratch), config)
    return sol, sol.cost


def node_edges(node: PTreeNode) -> list[tuple[int, int]]:
    st = node.state
    if node.leaf:
        return list(st.leaf_edges)
    if st.cells is not None:
        return [e for (_, _), cell in sorted(st.cells.items()) for e in cell.items()]
    return explicit_matching(node, st.takes, st.gamma)


def extract_full_matching(tree: RestrictedPTree) -> Matching:
    """Union of every node's explicit edges; must be perfect on the point set."""
    root = tree.root
    if root.state is None:
        return Matching()
    if root.state.excess.total:
        raise IntegrityError(
            f"root excess holds {root.state.excess.total} unmatched "
            f"{root.state.excess.color.name.lower()} points"
        )
    edges: list[tuple[int, int]] = []
    for node in tree.iter_nodes():
        edges.extend(node_edges(node))
    m = Matching(edges)
    m.cost = matching_cost(tree.points, m)
    return m


def aggregation_slack(tree: RestrictedPTree) -> float:
    """Upper bound on the gap between aggregated and explicit costs over all nodes."""
    total = 0.0
    for node in tree.iter_nodes():
        if not node.leaf and node.state is not None:
            total += SQRT2 * tree.side(node.level + 1) * node.state.matched
    return total
