from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dynmatch.core import Color
from dynmatch.errors import DuplicateIdError, OutOfUniverseError, UnknownIdError
from dynmatch.ptree import (
    Cell,
    RestrictedPTree,
    audit_tree,
    build_tree,
    cell_center,
    subcell_index,
    z_key,
)


def naive_z_key(x, y, p, D):
    """Digits by repeated cell subdivision, then the leftover square row-major."""
    digits = []
    side = D
    ox = oy = 0
    max_level = (D.bit_length() - 1) // (p.bit_length() - 1)
    for _ in range(max_level):
        child = side // p
        col, row = (x - ox) // child, (y - oy) // child
        digits.append(row * p + col)
        ox += col * child
        oy += row * child
        side = child
    key = 0
    for d in digits:
        key = key * p * p + d
    return key * side * side + (y - oy) * side + (x - ox)


@pytest.mark.parametrize("p,D", [(2, 16), (4, 64), (4, 128), (8, 512), (2, 1)])
def test_z_key_matches_subdivision(p, D):
    if D < p:
        return
    rng = random.Random(p * D)
    for _ in range(300):
        x, y = rng.randrange(D), rng.randrange(D)
        assert z_key(x, y, p, D) == naive_z_key(x, y, p, D)


def test_z_key_row_major_at_top():
    # p=2, D=2: the four unit cells in row-major order
    assert [z_key(x, y, 2, 2) for y in range(2) for x in range(2)] == [0, 1, 2, 3]


def test_subcell_index_and_center():
    cell = Cell(1, 1, 0, 8)  # covers [8,16) x [0,8)
    assert subcell_index(cell, (8, 0), 4) == 0
    assert subcell_index(cell, (15, 7), 4) == 15
    assert subcell_index(cell, (10, 4), 4) == 2 * 4 + 1
    assert cell_center(cell) == (12.0, 4.0)
    with pytest.raises(ValueError):
        subcell_index(cell, (0, 0), 4)


@settings(max_examples=200)
@given(st.integers(0, 255), st.integers(0, 255), st.sampled_from([2, 4]))
def test_digit_agrees_with_subcell(x, y, p):
    tree = RestrictedPTree(p, 256)
    key = z_key(x, y, p, 256)
    for level in range(tree.max_level):
        side = tree.side(level)
        cell = Cell(level, x // side, y // side, side)
        assert tree.digit(key, level) == subcell_index(cell, (x, y), p)


def test_empty_tree_is_level_zero_leaf():
    tree = RestrictedPTree(4, 256)
    audit_tree(tree)
    assert tree.root.leaf and tree.root.level == 0 and tree.root.count == 0
    assert tree.depth() == 1


def test_universe_and_ids():
    tree = RestrictedPTree(2, 16, shift=(3, 3))
    with pytest.raises(OutOfUniverseError):
        tree.shifted_record(0, (8, 0), Color.RED)
    rec = tree.shifted_record(0, (7, 7), Color.RED)
    assert tuple(rec.pos) == (10, 10) and tuple(rec.raw) == (7, 7)
    tree.insert(rec)
    with pytest.raises(DuplicateIdError):
        tree.insert(rec)
    with pytest.raises(UnknownIdError):
        tree.delete(5)
    with pytest.raises(DuplicateIdError):
        build_tree([rec, rec], 2, 16)


def test_root_is_lowest_enclosing_cell():
    tree = RestrictedPTree(2, 16)
    tree.insert(tree.record(0, (4, 4), Color.RED))
    assert (tree.root.level, tree.root.ix, tree.root.iy) == (tree.max_level, 4, 4)
    tree.insert(tree.record(1, (5, 4), Color.BLUE))
    # (4,4) and (5,4) share the side-2 cell at index (2,2)
    assert (tree.root.level, tree.root.ix, tree.root.iy) == (3, 2, 2)
    tree.insert(tree.record(2, (15, 0), Color.BLUE))
    assert tree.root.level == 0
    tree.delete(2)
    assert (tree.root.level, tree.root.ix, tree.root.iy) == (3, 2, 2)
    audit_tree(tree)


def test_split_and_merge_at_capacity():
    tree = RestrictedPTree(2, 64)
    pts = [(1, 1), (40, 3), (3, 50), (60, 60)]
    for i, pos in enumerate(pts):
        ev = tree.insert(tree.record(i, pos, Color(i % 2)))
        assert not ev.rebuilt
    assert tree.root.leaf and tree.root.count == tree.cap
    ev = tree.insert(tree.record(4, (2, 2), Color.RED))
    assert ev.rebuilt and ev.structural
    assert not tree.root.leaf
    audit_tree(tree)
    ev = tree.delete(4)
    assert ev.structural
    assert tree.root.leaf and tree.root.count == 4
    audit_tree(tree)


def test_single_child_chain_kept():
    tree = RestrictedPTree(2, 64)
    # five points packed in a 2x2 corner force a chain down to it
    pts = [(0, 0), (1, 0), (0, 1), (1, 1), (0, 0)]
    for i, pos in enumerate(pts[:4]):
        tree.insert(tree.record(i, pos, Color.RED))
    tree.insert(tree.record(9, (40, 40), Color.BLUE))
    tree.insert(tree.record(10, (0, 0), Color.BLUE))
    audit_tree(tree)
    chain = [n for n in tree.iter_nodes() if not n.leaf and len(n.children) == 1]
    assert chain


def test_collocated_points_stop_at_max_level():
    tree = RestrictedPTree(2, 16)
    for i in range(20):
        tree.insert(tree.record(i, (5, 5), Color(i % 2)))
    audit_tree(tree)
    assert tree.root.leaf and tree.root.level == tree.max_level and tree.root.count == 20


def fresh_shape(tree):
    other = build_tree(tree.points.values(), tree.p, tree.D, tuple(tree.shift))
    return other.shape()


@pytest.mark.parametrize("p,D", [(2, 1 << 6), (4, 1 << 8), (8, 1 << 9)])
@pytest.mark.parametrize("seed", range(4))
def test_incremental_matches_rebuild(p, D, seed):
    rng = random.Random(seed)
    tree = RestrictedPTree(p, D)
    live = []
    nxt = 0
    for step in range(400):
        if live and rng.random() < 0.45:
            pid = live.pop(rng.randrange(len(live)))
            ev = tree.delete(pid)
        else:
            c = rng.randrange(D // 4) if rng.random() < 0.5 else rng.randrange(D)
            pos = (c if rng.random() < 0.5 else rng.randrange(D), rng.randrange(D))
            ev = tree.insert(tree.record(nxt, pos, Color(nxt % 2)))
            live.append(nxt)
            nxt += 1
        assert [n.level for n in ev.dirty()] == sorted((n.level for n in ev.dirty()), reverse=True)
        if step % 25 == 0:
            audit_tree(tree)
            assert tree.shape() == fresh_shape(tree)
    audit_tree(tree)
    assert tree.shape() == fresh_shape(tree)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 31), st.integers(0, 31)), max_size=60),
       st.sampled_from([2, 4]))
def test_build_is_insert_order_independent(pts, p):
    tree = RestrictedPTree(p, 32)
    for i, pos in enumerate(pts):
        tree.insert(tree.record(i, pos, Color(i % 2)))
    audit_tree(tree)
    assert tree.shape() == fresh_shape(tree)
    for i in range(0, len(pts), 2):
        tree.delete(i)
    audit_tree(tree)
    assert tree.shape() == fresh_shape(tree)


def test_locate_and_leaf_of():
    tree = RestrictedPTree(2, 64)
    rng = random.Random(1)
    for i in range(50):
        tree.insert(tree.record(i, (rng.randrange(64), rng.randrange(64)), Color(i % 2)))
    for i in range(50):
        leaf = tree.leaf_of(i)
        assert i in leaf.points
        path = tree.locate_path(tree.points[i].pos)
        assert path[0] is tree.root and path[-1] is leaf
        assert tree.subtree_ids(tree.root) == sorted(tree.points, key=tree.key)
