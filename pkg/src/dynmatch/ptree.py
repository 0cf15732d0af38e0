"""Restricted p-tree over a shifted integer point set.

Cells at level ``L`` have side ``D / p**L``. A node is a leaf when it holds at
most ``p*p`` points (or sits at the finest admissible level, where the
capacity is relaxed for collocated duplicates). The root is the lowest cell
that contains every point. Children are created only for occupied sub-cells;
internal nodes whose points all fall into one sub-cell keep a single child.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple

from .core import Color, Point, PointRecord, is_power_of_two
from .errors import (
    DuplicateIdError,
    InvariantError,
    OutOfUniverseError,
    UnknownIdError,
)


class Cell(NamedTuple):
    level: int
    ix: int
    iy: int
    side: int

    @property
    def origin(self) -> tuple[int, int]:
        return (self.ix * self.side, self.iy * self.side)

    def contains(self, pt) -> bool:
        ox, oy = self.origin
        return ox <= pt[0] < ox + self.side and oy <= pt[1] < oy + self.side


def cell_center(cell: Cell) -> tuple[float, float]:
    ox, oy = cell.origin
    half = cell.side / 2
    return (ox + half, oy + half)


def subcell_index(cell: Cell, point, p: int) -> int:
    """Row-major index ``row * p + col`` of the child cell containing ``point``."""
    if not cell.contains(point):
        raise ValueError(f"point {tuple(point)} outside cell {cell}")
    child = cell.side // p
    ox, oy = cell.origin
    return ((point[1] - oy) // child) * p + (point[0] - ox) // child


def z_key(x: int, y: int, p: int, D: int) -> int:
    """Integer whose natural order is the recursive row-major traversal order."""
    logp = p.bit_length() - 1
    logd = D.bit_length() - 1
    max_level = logd // logp
    mask = p - 1
    key = 0
    for level in range(1, max_level + 1):
        s = logd - level * logp
        key = (key << (2 * logp)) | ((((y >> s) & mask) << logp) | ((x >> s) & mask))
    s = logd - max_level * logp
    rem = (1 << s) - 1
    return (key << (2 * s)) | (((y & rem) << s) | (x & rem))


def z_compare(a: PointRecord, b: PointRecord) -> int:
    """-1, 0 or 1. Records must carry z-keys from the same tree; ties go by id."""
    ka, kb = a.order, b.order
    return (ka > kb) - (ka < kb)


class PTreeNode:
    __slots__ = (
        "level", "ix", "iy", "parent", "slot", "children",
        "count", "nred", "nblue", "leaf", "points", "state",
    )

    def __init__(self, level: int, ix: int, iy: int, parent: "PTreeNode | None" = None,
                 slot: int | None = None) -> None:
        self.level = level
        self.ix = ix
        self.iy = iy
        self.parent = parent
        self.slot = slot
        self.children: dict[int, PTreeNode] = {}
        self.count = 0
        self.nred = 0
        self.nblue = 0
        self.leaf = True
        self.points: list[int] = []
        self.state = None

    @property
    def is_leaf(self) -> bool:
        return self.leaf

    def ordered_children(self) -> list[tuple[int, "PTreeNode"]]:
        return sorted(self.children.items())

    def __repr__(self) -> str:
        kind = "leaf" if self.leaf else "node"
        return f"<{kind} L{self.level} ({self.ix},{self.iy}) n={self.count}>"


@dataclass
class StructuralEvents:
    """What a single-point tree update touched.

    ``path`` lists surviving nodes whose point set changed (root first).
    ``new_nodes`` were created, ``rebuilt`` existed but got a fresh subtree (a
    split leaf or a merged internal node), ``removed`` were detached.
    """

    path: list[PTreeNode] = field(default_factory=list)
    new_nodes: list[PTreeNode] = field(default_factory=list)
    rebuilt: list[PTreeNode] = field(default_factory=list)
    removed: list[PTreeNode] = field(default_factory=list)
    root_changed: bool = False

    @property
    def structural(self) -> bool:
        return bool(self.rebuilt) or self.root_changed

    def dirty(self) -> list[PTreeNode]:
        """Nodes needing new matching state, deepest first."""
        seen: dict[int, PTreeNode] = {}
        for n in (*self.path, *self.new_nodes, *self.rebuilt):
            seen[id(n)] = n
        return sorted(seen.values(), key=lambda n: -n.level)


class RestrictedPTree:
    def __init__(self, p: int, D: int, shift: tuple[int, int] = (0, 0)) -> None:
        if p < 2 or not is_power_of_two(p):
            raise ValueError(f"p must be a power of two >= 2, got {p}")
        if not is_power_of_two(D) or D < p:
            raise ValueError(f"D must be a power of two >= p, got {D}")
        self.p = p
        self.D = D
        self.shift = Point(*shift)
        self.logp = p.bit_length() - 1
        self.logd = D.bit_length() - 1
        self.max_level = self.logd // self.logp
        self.cap = p * p
        self._digit_base = 2 * (self.logd - self.max_level * self.logp)
        self.points: dict[int, PointRecord] = {}
        self.root = PTreeNode(0, 0, 0)

    # geometry ------------------------------------------------------------

    def side(self, level: int) -> int:
        return 1 << (self.logd - level * self.logp)

    def cell(self, node: PTreeNode) -> Cell:
        return Cell(node.level, node.ix, node.iy, self.side(node.level))

    def center(self, node: PTreeNode) -> tuple[float, float]:
        return cell_center(self.cell(node))

    def child_center(self, node: PTreeNode, slot: int) -> tuple[float, float]:
        side = self.side(node.level + 1)
        row, col = divmod(slot, self.p)
        return ((node.ix * self.p + col) * side + side / 2,
                (node.iy * self.p + row) * side + side / 2)

    def in_universe(self, pt) -> bool:
        return 0 <= pt[0] < self.D and 0 <= pt[1] < self.D

    def record(self, pid: int, pos, color: Color, raw=None) -> PointRecord:
        """A record at tree position ``pos`` with its z-key filled in."""
        if not self.in_universe(pos):
            raise OutOfUniverseError(f"point {pid} at {tuple(pos)} outside [0, {self.D})^2")
        pos = Point(int(pos[0]), int(pos[1]))
        raw = pos if raw is None else Point(int(raw[0]), int(raw[1]))
        return PointRecord(pid, pos, raw, Color(color), z_key(pos.x, pos.y, self.p, self.D))

    def shifted_record(self, pid: int, raw, color: Color) -> PointRecord:
        """Apply the shift; raw coordinates must lie in ``[0, D/2)``."""
        half = self.D // 2
        if not (0 <= raw[0] < half and 0 <= raw[1] < half):
            raise OutOfUniverseError(f"point {pid} at {tuple(raw)} outside [0, {half})^2")
        return self.record(pid, (raw[0] + self.shift.x, raw[1] + self.shift.y), color, raw)

    def digit(self, zkey: int, level: int) -> int:
        """Sub-cell index, at a node of ``level``, of the point with key ``zkey``."""
        return (zkey >> (self._digit_base + 2 * self.logp * (self.max_level - 1 - level))) & (
            self.cap - 1
        )

    def key(self, pid: int) -> tuple[int, int]:
        return self.points[pid].order

    def lowest_level(self, pts: Iterable) -> tuple[int, int, int]:
        """Level and indices of the lowest cell containing every position."""
        it = iter(pts)
        first = next(it, None)
        if first is None:
            return (0, 0, 0)
        x0, y0 = first
        diff = 0
        for x, y in it:
            diff |= (x ^ x0) | (y ^ y0)
        if diff == 0:
            level = self.max_level
        else:
            level = min(self.max_level, (self.logd - diff.bit_length()) // self.logp)
        s = self.logd - level * self.logp
        return (level, x0 >> s, y0 >> s)

    # traversal -----------------------------------------------------------

    def iter_nodes(self) -> Iterator[PTreeNode]:
        stack = [self.root]
        while stack:
            node = stack.pop()
            yield node
            if not node.leaf:
                stack.extend(c for _, c in sorted(node.children.items(), reverse=True))

    def leaves(self) -> Iterator[PTreeNode]:
        return (n for n in self.iter_nodes() if n.leaf)

    def depth(self) -> int:
        """Number of nodes on the longest root-to-leaf path."""
        best = 0
        stack = [(self.root, 1)]
        while stack:
            node, d = stack.pop()
            if node.leaf:
                best = max(best, d)
            else:
                stack.extend((c, d + 1) for c in node.children.values())
        return best

    def subtree_ids(self, node: PTreeNode) -> list[int]:
        """Point ids under ``node`` in z-order."""
        out: list[int] = []
        stack = [node]
        while stack:
            n = stack.pop()
            if n.leaf:
                out.extend(n.points)
            else:
                stack.extend(c for _, c in sorted(n.children.items(), reverse=True))
        return out

    def shape(self) -> list[tuple]:
        return sorted(
            (n.level, n.ix, n.iy, n.leaf, n.count, n.nred) for n in self.iter_nodes()
        )

    # construction --------------------------------------------------------

    def _count(self, node: PTreeNode, ids: list[int]) -> None:
        node.count = len(ids)
        node.nred = sum(1 for i in ids if self.points[i].color is Color.RED)
        node.nblue = node.count - node.nred

    def _fill(self, node: PTreeNode, ids: list[int], created: list[PTreeNode]) -> None:
        """Turn ``node`` into the subtree for the z-sorted ``ids``."""
        self._count(node, ids)
        node.children = {}
        if len(ids) <= self.cap or node.level >= self.max_level:
            node.leaf = True
            node.points = list(ids)
            return
        node.leaf = False
        node.points = []
        level = node.level
        start = 0
        n = len(ids)
        while start < n:
            d = self.digit(self.points[ids[start]].zkey, level)
            stop = start + 1
            while stop < n and self.digit(self.points[ids[stop]].zkey, level) == d:
                stop += 1
            row, col = divmod(d, self.p)
            child = PTreeNode(level + 1, node.ix * self.p + col, node.iy * self.p + row, node, d)
            node.children[d] = child
            created.append(child)
            self._fill(child, ids[start:stop], created)
            start = stop

    def _sorted_ids(self, ids: Iterable[int]) -> list[int]:
        pts = self.points
        return sorted(ids, key=lambda i: pts[i].order)

    def rebuild(self) -> None:
        ids = self._sorted_ids(self.points)
        level, ix, iy = self.lowest_level(self.points[i].pos for i in ids)
        self.root = PTreeNode(level, ix, iy)
        self._fill(self.root, ids, [])

    # updates -------------------------------------------------------------

    def insert(self, rec: PointRecord) -> StructuralEvents:
        if rec.id in self.points:
            raise DuplicateIdError(f"point id {rec.id} already present")
        if not self.in_universe(rec.pos):
            raise OutOfUniverseError(f"point {rec.id} at {tuple(rec.pos)} outside universe")
        self.points[rec.id] = rec
        ev = StructuralEvents()
        root = self.root
        if root.leaf:
            ids = self._sorted_ids([*root.points, rec.id])
            level, ix, iy = self.lowest_level(self.points[i].pos for i in ids)
            if (level, ix, iy) != (root.level, root.ix, root.iy):
                ev.root_changed = True
                root.level, root.ix, root.iy = level, ix, iy
            if len(ids) > self.cap and level < self.max_level:
                self._fill(root, ids, ev.new_nodes)
                ev.rebuilt.append(root)
            else:
                self._fill(root, ids, ev.new_nodes)
                ev.path.append(root)
            return ev
        if not self.cell(root).contains(rec.pos):
            self._grow_root(rec, ev)
            return ev
        node = root
        red = rec.color is Color.RED
        while not node.leaf:
            node.count += 1
            if red:
                node.nred += 1
            else:
                node.nblue += 1
            ev.path.append(node)
            slot = self.digit(rec.zkey, node.level)
            child = node.children.get(slot)
            if child is None:
                row, col = divmod(slot, self.p)
                leaf = PTreeNode(node.level + 1, node.ix * self.p + col,
                                 node.iy * self.p + row, node, slot)
                node.children[slot] = leaf
                self._fill(leaf, [rec.id], [])
                ev.new_nodes.append(leaf)
                return ev
            node = child
        pos = bisect.bisect_left(node.points, rec.order, key=self.key)
        node.points.insert(pos, rec.id)
        node.count += 1
        if red:
            node.nred += 1
        else:
            node.nblue += 1
        if node.count > self.cap and node.level < self.max_level:
            self._fill(node, node.points, ev.new_nodes)
            ev.rebuilt.append(node)
        else:
            ev.path.append(node)
        return ev

    def _grow_root(self, rec: PointRecord, ev: StructuralEvents) -> None:
        old = self.root
        ox, oy = self.cell(old).origin
        level, ix, iy = self.lowest_level([(ox, oy), rec.pos])
        top = PTreeNode(level, ix, iy)
        top.leaf = False
        top.count = old.count + 1
        top.nred = old.nred + (rec.color is Color.RED)
        top.nblue = top.count - top.nred
        ev.new_nodes.append(top)
        parent = top
        for lv in range(level + 1, old.level + 1):
            s = self.logd - lv * self.logp
            slot = ((oy >> s) & (self.p - 1)) * self.p + ((ox >> s) & (self.p - 1))
            if lv == old.level:
                node = old
                old.parent, old.slot = parent, slot
            else:
                node = PTreeNode(lv, ox >> s, oy >> s, parent, slot)
                node.leaf = False
                node.count, node.nred, node.nblue = old.count, old.nred, old.nblue
                ev.new_nodes.append(node)
            parent.children[slot] = node
            parent = node
        slot = self.digit(rec.zkey, level)
        row, col = divmod(slot, self.p)
        leaf = PTreeNode(level + 1, ix * self.p + col, iy * self.p + row, top, slot)
        top.children[slot] = leaf
        self._fill(leaf, [rec.id], [])
        ev.new_nodes.append(leaf)
        self.root = top
        ev.root_changed = True

    def delete(self, pid: int) -> StructuralEvents:
        rec = self.points.get(pid)
        if rec is None:
            raise UnknownIdError(f"unknown point id {pid}")
        ev = StructuralEvents()
        red = rec.color is Color.RED
        node = self.root
        path = [node]
        while not node.leaf:
            node = node.children[self.digit(rec.zkey, node.level)]
            path.append(node)
        for n in path:
            n.count -= 1
            if red:
                n.nred -= 1
            else:
                n.nblue -= 1
        node.points.remove(pid)
        del self.points[pid]
        if node.count == 0 and node is not self.root:
            del node.parent.children[node.slot]
            node.parent = None
            ev.removed.append(node)
            path.pop()
        for i, n in enumerate(path):
            if not n.leaf and n.count <= self.cap:
                ids = self.subtree_ids(n)
                ev.removed.extend(d for d in self._descendants(n))
                self._fill(n, ids, [])
                ev.rebuilt.append(n)
                del path[i:]
                break
        while not self.root.leaf and len(self.root.children) == 1:
            (child,) = self.root.children.values()
            if child.count != self.root.count:
                break
            old = self.root
            old.children = {}
            child.parent, child.slot = None, None
            ev.removed.append(old)
            if path and path[0] is old:
                path.pop(0)
            self.root = child
            ev.root_changed = True
        root = self.root
        if root.leaf:
            level, ix, iy = self.lowest_level(self.points[i].pos for i in root.points)
            if (level, ix, iy) != (root.level, root.ix, root.iy):
                root.level, root.ix, root.iy = level, ix, iy
                ev.root_changed = True
        ev.path = path
        return ev

    def _descendants(self, node: PTreeNode) -> list[PTreeNode]:
        out: list[PTreeNode] = []
        stack = list(node.children.values())
        while stack:
            n = stack.pop()
            out.append(n)
            stack.extend(n.children.values())
            n.parent = None
        return out

    # queries -------------------------------------------------------------

    def locate_path(self, point) -> list[PTreeNode]:
        if not self.in_universe(point):
            raise OutOfUniverseError(f"{tuple(point)} outside [0, {self.D})^2")
        node = self.root
        if not self.cell(node).contains(point):
            return []
        key = z_key(point[0], point[1], self.p, self.D)
        path = [node]
        while not node.leaf:
            node = node.children.get(self.digit(key, node.level))
            if node is None:
                break
            path.append(node)
        return path

    def leaf_of(self, pid: int) -> PTreeNode:
        rec = self.points[pid]
        node = self.root
        while not node.leaf:
            node = node.children[self.digit(rec.zkey, node.level)]
        return node


def build_tree(points: Iterable[PointRecord], p: int, D: int,
               shift: tuple[int, int] = (0, 0)) -> RestrictedPTree:
    """Build from records whose ``pos`` is already shifted; z-keys are recomputed."""
    tree = RestrictedPTree(p, D, shift)
    for rec in points:
        if rec.id in tree.points:
            raise DuplicateIdError(f"point id {rec.id} appears twice")
        tree.points[rec.id] = tree.record(rec.id, rec.pos, rec.color, rec.raw)
    tree.rebuild()
    return tree


def audit_tree(tree: RestrictedPTree) -> None:
    """Full structural walk; raises :class:`InvariantError` on the first violation."""
    root = tree.root
    if root.parent is not None:
        raise InvariantError("root has a parent")
    seen: set[int] = set()
    for node in tree.iter_nodes():
        cell = tree.cell(node)
        if node.count != node.nred + node.nblue:
            raise InvariantError(f"{node}: color counts do not add up")
        if node.leaf:
            if node.children:
                raise InvariantError(f"{node}: leaf with children")
            if node.count != len(node.points):
                raise InvariantError(f"{node}: count {node.count} != {len(node.points)} points")
            if node.count > tree.cap and node.level < tree.max_level:
                raise InvariantError(f"{node}: leaf over capacity")
            nred = 0
            for pid in node.points:
                rec = tree.points[pid]
                if not cell.contains(rec.pos):
                    raise InvariantError(f"point {pid} outside its leaf {node}")
                nred += rec.color is Color.RED
                seen.add(pid)
            if nred != node.nred:
                raise InvariantError(f"{node}: red count {node.nred} != {nred}")
            keys = [tree.points[i].order for i in node.points]
            if keys != sorted(keys):
                raise InvariantError(f"{node}: leaf points not in z-order")
        else:
            if node.count <= tree.cap:
                raise InvariantError(f"{node}: internal with only {node.count} points")
            if sum(c.count for c in node.children.values()) != node.count:
                raise InvariantError(f"{node}: count not the sum of its children")
            if sum(c.nred for c in node.children.values()) != node.nred:
                raise InvariantError(f"{node}: red count not the sum of its children")
            for slot, child in node.children.items():
                if child.parent is not node or child.slot != slot:
                    raise InvariantError(f"{child}: bad parent link")
                if child.level != node.level + 1 or child.count == 0:
                    raise InvariantError(f"{child}: bad level or empty")
                ccell = tree.cell(child)
                if subcell_index(cell, ccell.origin, tree.p) != slot:
                    raise InvariantError(f"{child}: not in sub-cell {slot} of {node}")
    if seen != set(tree.points):
        raise InvariantError("leaf contents differ from the point table")
    if root.leaf:
        want = tree.lowest_level(tree.points[i].pos for i in root.points)
        if want != (root.level, root.ix, root.iy):
            raise InvariantError(f"root leaf {root} is not the lowest enclosing cell")
    elif any(c.count == root.count for c in root.children.values()):
        raise InvariantError("root is not minimal")
