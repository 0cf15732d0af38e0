from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dynmatch.core import Color
from dynmatch.errors import InvariantError
from dynmatch.excess import ExcessDescriptor


def test_basic_indexing():
    leaf = ExcessDescriptor.from_ids(Color.RED, [4, 8, 15, 16])
    parent = ExcessDescriptor(Color.RED, [(leaf, 1, 2), ([23, 42], 0, 2)])
    assert len(parent) == 4
    assert parent.ids() == [8, 15, 23, 42]
    assert parent[0] == 8 and parent[-1] == 42
    assert parent.slice(1, 3) == [15, 23]
    assert parent.slice(-5, 99) == parent.ids()
    with pytest.raises(IndexError):
        parent[4]


def test_empty():
    e = ExcessDescriptor.empty(Color.BLUE)
    assert not e and len(e) == 0 and e.ids() == [] and e.color is Color.BLUE


def test_window_out_of_range():
    with pytest.raises(InvariantError):
        ExcessDescriptor(Color.RED, [([1, 2], 1, 2)])


def test_old_descriptor_survives_new_one():
    child_old = ExcessDescriptor.from_ids(Color.RED, [1, 2, 3])
    parent_old = ExcessDescriptor(Color.RED, [(child_old, 0, 3)])
    child_new = ExcessDescriptor.from_ids(Color.RED, [1, 3])
    assert parent_old.ids() == [1, 2, 3]
    assert child_new.ids() == [1, 3]


@st.composite
def nested(draw, depth=3):
    """A random descriptor tree together with the flat list it should spell out."""
    if depth == 0 or draw(st.booleans()):
        ids = draw(st.lists(st.integers(0, 10_000), max_size=12))
        return list(ids), list(ids)
    parts = []
    flat = []
    for _ in range(draw(st.integers(0, 4))):
        src, src_flat = draw(nested(depth - 1))
        n = len(src_flat)
        skip = draw(st.integers(0, n))
        take = draw(st.integers(0, n - skip))
        parts.append((src, skip, take))
        flat.extend(src_flat[skip:skip + take])
    return ExcessDescriptor(Color.RED, parts), flat


@given(nested(), st.integers(-3, 40), st.integers(-3, 40))
def test_descriptor_matches_flat_model(pair, a, b):
    desc, flat = pair
    if isinstance(desc, list):
        desc = ExcessDescriptor.from_ids(Color.RED, desc)
    assert len(desc) == len(flat)
    assert desc.ids() == flat
    assert list(desc) == flat
    assert desc.slice(a, b) == flat[max(a, 0):max(min(b, len(flat)), 0)]
    for i in range(len(flat)):
        assert desc[i] == flat[i]
