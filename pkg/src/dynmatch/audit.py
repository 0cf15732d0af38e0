"""Runtime invariant checks for a matcher's whole tree.

Enabled per update with ``DYNMATCH_AUDIT=1``; tests call :func:`audit_matcher`
directly. Every failure raises :class:`~dynmatch.errors.InvariantError`.
"""

from __future__ import annotations

import math

from .core import COST_TOL, Color, validate_matching
from .errors import InvariantError
from .exact import transport_counts
from .ptree import audit_tree
from .static import gamma_cost, node_edges, select_matchable, y_members

OPT_TOL = 1e-7


def _close(a: float, b: float, tol: float) -> bool:
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def audit_node(tree, node, check_optimal: bool = False) -> None:
    st = node.state
    if st is None:
        raise InvariantError(f"{node}: no matching state")
    cell = tree.cell(node)
    pts = tree.points
    ex = st.excess.ids()
    if len(ex) != st.excess.total:
        raise InvariantError(f"{node}: excess materializes to {len(ex)} != {st.excess.total}")
    if any(pts[i].color is not st.excess.color for i in ex):
        raise InvariantError(f"{node}: excess is not monochromatic")
    if len(ex) != abs(node.nred - node.nblue):
        raise InvariantError(
            f"{node}: |E| = {len(ex)} but the cell imbalance is {abs(node.nred - node.nblue)}"
        )
    if ex and st.excess.color is not (Color.RED if node.nred > node.nblue else Color.BLUE):
        raise InvariantError(f"{node}: excess has the minority color")
    if any(not cell.contains(pts[i].pos) for i in ex):
        raise InvariantError(f"{node}: excess point outside the cell")
    keys = [pts[i].order for i in ex]
    if keys != sorted(keys):
        raise InvariantError(f"{node}: excess not in z-order")

    edges = node_edges(node)
    for r, b in edges:
        if not (cell.contains(pts[r].pos) and cell.contains(pts[b].pos)):
            raise InvariantError(f"{node}: edge ({r}, {b}) leaves the cell")
        if pts[r].color is not Color.RED or pts[b].color is not Color.BLUE:
            raise InvariantError(f"{node}: edge ({r}, {b}) has wrong colors")

    if node.leaf:
        cost = math.fsum(math.dist(pts[r].pos, pts[b].pos) for r, b in st.leaf_edges)
        if not _close(cost, st.leaf_cost, COST_TOL) or not _close(st.cost, st.leaf_cost, COST_TOL):
            raise InvariantError(f"{node}: leaf cost {st.cost} != edge sum {cost}")
        if 2 * len(st.leaf_edges) + len(ex) != node.count:
            raise InvariantError(f"{node}: leaf points neither matched nor excess")
        return

    kids = node.ordered_children()
    sel = select_matchable([(s, c.state.excess) for s, c in kids])
    if sel.takes != {s: t for s, t in st.takes.items()} or sel.excess.ids() != ex:
        raise InvariantError(f"{node}: stored selection differs from the canonical one")
    gsum = gamma_cost(tree, node, st.gamma)
    if not _close(gsum, st.gamma_cost, COST_TOL):
        raise InvariantError(f"{node}: assignment cost {st.gamma_cost} != recomputed {gsum}")
    total = sum(c.state.cost for _, c in kids) + st.gamma_cost
    if not _close(total, st.cost, COST_TOL):
        raise InvariantError(f"{node}: cost {st.cost} is not children + assignment ({total})")
    rows: dict[int, int] = {}
    cols: dict[int, int] = {}
    for (r, b), w in st.gamma.items():
        if w <= 0:
            raise InvariantError(f"{node}: non-positive weight on ({r}, {b})")
        rows[r] = rows.get(r, 0) + w
        cols[b] = cols.get(b, 0) + w
    for s, t in st.takes.items():
        got = rows.get(s, 0) + cols.get(s, 0)
        if got != t:
            raise InvariantError(f"{node}: slot {s} carries {got} units, selected {t}")
    if len(edges) * 2 != sum(st.takes.values()):
        raise InvariantError(f"{node}: {len(edges)} edges for {sum(st.takes.values())} points")

    if st.cells is not None:
        members = y_members(node, st.takes)
        if {s: set(v) for s, v in members.items()} != {s: v for s, v in st.ymembers.items() if v}:
            raise InvariantError(f"{node}: tracked matched sets differ from the selection")
        for key, cell_edges in st.cells.items():
            if len(cell_edges) != st.gamma.get(key, 0):
                raise InvariantError(f"{node}: cell {key} has {len(cell_edges)} edges, weight "
                                     f"{st.gamma.get(key, 0)}")
            r, b = key
            for red, blue in cell_edges.items():
                if (tree.digit(pts[red].zkey, node.level), tree.digit(pts[blue].zkey, node.level)) != key:
                    raise InvariantError(f"{node}: edge ({red}, {blue}) filed under wrong cell")
                if st.partner.get(red, (None,))[0] != blue or st.partner.get(blue, (None,))[0] != red:
                    raise InvariantError(f"{node}: partner map disagrees on ({red}, {blue})")
        if len(st.partner) != 2 * len(edges):
            raise InvariantError(f"{node}: stale partner entries")

    if check_optimal:
        reds = sel.red_slots()
        blues = sel.blue_slots()
        _, best = transport_counts(
            [tree.child_center(node, s) for s in reds], [sel.takes[s] for s in reds],
            [tree.child_center(node, s) for s in blues], [sel.takes[s] for s in blues],
        )
        if abs(best - st.gamma_cost) > OPT_TOL * max(1.0, best):
            raise InvariantError(f"{node}: assignment cost {st.gamma_cost} but optimum is {best}")


def audit_matcher(matcher, check_optimal: bool = True) -> None:
    """Walk the tree and check every per-node invariant plus the output matching."""
    tree = matcher.tree
    audit_tree(tree)
    for node in tree.iter_nodes():
        audit_node(tree, node, check_optimal=check_optimal)
    root = tree.root.state
    if root.excess.total == 0:
        m = matcher.query_matching()
        report = validate_matching(tree.points, m, require_perfect=True)
        if not report.ok:
            raise InvariantError(f"output matching invalid: {report.violations[:3]}")
