from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linear_sum_assignment

from dynmatch.core import Color, Point, PointRecord, TransportInstance, assignment_cost, validate_matching
from dynmatch.errors import BalanceError, InstanceTooLargeError, InvariantError, SizeMismatchError
from dynmatch.exact import (
    brute_force_matching,
    brute_force_transport,
    check_reduced_costs,
    hungarian,
    solve_transport,
    transport_counts,
)

small = st.integers(0, 60)
pt = st.tuples(small, small)


def recs(points, color, start=0):
    return [PointRecord(start + i, Point(*p), Point(*p), color) for i, p in enumerate(points)]


def test_hungarian_known_instance():
    # crossing pairs: the optimum uncrosses them
    reds = recs([(0, 0), (10, 0)], Color.RED)
    blues = recs([(10, 1), (0, 1)], Color.BLUE, 2)
    m = hungarian(reds, blues)
    assert sorted(m.edges) == [(0, 3), (1, 2)]
    assert m.cost == pytest.approx(2.0)


def test_hungarian_size_mismatch():
    with pytest.raises(SizeMismatchError):
        hungarian(recs([(0, 0)], Color.RED), [])


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(pt, pt), min_size=1, max_size=7))
def test_hungarian_equals_brute_force(pairs):
    reds = recs([a for a, _ in pairs], Color.RED)
    blues = recs([b for _, b in pairs], Color.BLUE, len(pairs))
    fast = hungarian(reds, blues)
    slow = brute_force_matching(reds, blues)
    assert fast.cost == pytest.approx(slow.cost, abs=1e-9)
    table = {r.id: r for r in reds + blues}
    assert validate_matching(table, fast, require_perfect=True).ok


@pytest.mark.parametrize("seed", range(5))
def test_hungarian_equals_scipy_medium(seed):
    rng = np.random.default_rng(seed)
    a = rng.integers(0, 1000, size=(150, 2))
    b = rng.integers(0, 1000, size=(150, 2))
    m = hungarian(recs(a.tolist(), Color.RED), recs(b.tolist(), Color.BLUE, 150))
    cost = np.hypot(a[:, None, 0] - b[None, :, 0], a[:, None, 1] - b[None, :, 1])
    r, c = linear_sum_assignment(cost)
    assert m.cost == pytest.approx(cost[r, c].sum(), rel=1e-12)


def test_brute_force_limits():
    ten = recs([(i, 0) for i in range(10)], Color.RED)
    with pytest.raises(InstanceTooLargeError):
        brute_force_matching(ten, recs([(i, 1) for i in range(10)], Color.BLUE, 10))
    t = TransportInstance.build([((0, 0), 9)], [((1, 1), -9)])
    with pytest.raises(InstanceTooLargeError):
        brute_force_transport(t)


def test_transport_known_instance():
    t = TransportInstance.build([((0, 0), 2), ((10, 0), 1)], [((1, 0), -1), ((9, 0), -2)])
    a = solve_transport(t, certify=True)
    assert a.cost == pytest.approx(11.0)
    assert assignment_cost(t, a) == pytest.approx(11.0)


def test_transport_unbalanced():
    t = TransportInstance.build([((0, 0), 2)], [((1, 1), -3)])
    with pytest.raises(BalanceError, match="-1"):
        solve_transport(t)
    with pytest.raises(BalanceError):
        brute_force_transport(t)


def test_transport_empty():
    assert solve_transport(TransportInstance()).cost == 0.0


@st.composite
def transport_instances(draw):
    m = draw(st.integers(1, 3))
    k = draw(st.integers(1, 6 - m))
    supply = draw(st.lists(st.integers(1, 3), min_size=m, max_size=m))
    total = sum(supply)
    if total > 8:
        supply = [1] * m
        total = m
    cuts = sorted(draw(st.lists(st.integers(0, total), min_size=k - 1, max_size=k - 1)))
    demand = [b - a for a, b in zip([0, *cuts], [*cuts, total])]
    s_locs = draw(st.lists(pt, min_size=m, max_size=m))
    d_locs = draw(st.lists(pt, min_size=k, max_size=k))
    return TransportInstance.build(
        list(zip(s_locs, supply)), [(loc, -d) for loc, d in zip(d_locs, demand) if d > 0]
    )


@settings(max_examples=80, deadline=None)
@given(transport_instances())
def test_transport_equals_brute_force(t):
    fast = solve_transport(t, certify=True)
    slow = brute_force_transport(t)
    assert fast.cost == pytest.approx(slow.cost, abs=1e-9)
    assert assignment_cost(t, fast) == pytest.approx(fast.cost, abs=1e-9)


def test_transport_counts_weights_integral():
    w, cost = transport_counts([(0, 0), (5, 5)], [3, 2], [(0, 1), (5, 6)], [2, 3], certify=True)
    assert all(isinstance(v, int) and v > 0 for v in w.values())
    assert sum(w.values()) == 5
    assert cost == pytest.approx(2 * 1 + 1 * math.hypot(5, 6) + 2 * 1)


def test_reduced_cost_certificate_rejects_suboptimal():
    cost = np.array([[0.0, 5.0], [5.0, 0.0]])
    flow = np.array([[0, 1], [1, 0]])
    with pytest.raises(InvariantError):
        check_reduced_costs(cost, flow, np.zeros(4))
