"""Exact subroutines: leaf assignment, transportation, and brute-force oracles."""

from __future__ import annotations

import itertools
import math
from typing import Sequence

import numpy as np

from . import kernels
from .core import Assignment, Matching, PointRecord, TransportInstance, distance
from .errors import (
    BalanceError,
    InstanceTooLargeError,
    InvariantError,
    SizeMismatchError,
)

BRUTE_FORCE_MAX = 9
CERT_TOL = 1e-7


def _distance_matrix(left: Sequence, right: Sequence) -> np.ndarray:
    if not left or not right:
        return np.zeros((len(left), len(right)))
    a = np.asarray(left, dtype=np.float64)
    b = np.asarray(right, dtype=np.float64)
    return np.hypot(a[:, None, 0] - b[None, :, 0], a[:, None, 1] - b[None, :, 1])


def hungarian(reds: Sequence[PointRecord], blues: Sequence[PointRecord]) -> Matching:
    """Minimum-cost perfect matching between equally sized red and blue lists."""
    if len(reds) != len(blues):
        raise SizeMismatchError(f"{len(reds)} reds vs {len(blues)} blues")
    if not reds:
        return Matching()
    cost = _distance_matrix([r.pos for r in reds], [b.pos for b in blues])
    assignment, _ = kernels.hungarian(cost)
    edges = [(reds[i].id, blues[j].id) for i, j in enumerate(assignment)]
    total = math.fsum(float(cost[i, j]) for i, j in enumerate(assignment))
    return Matching(edges, total)


def check_reduced_costs(cost: np.ndarray, flow: np.ndarray, pot: np.ndarray) -> None:
    """Optimality certificate for a transport solution.

    Forward arcs need a nonnegative reduced cost and arcs carrying flow need a
    nonpositive one, both up to ``CERT_TOL``.
    """
    m, k = cost.shape
    if m == 0 or k == 0:
        return
    reduced = cost + pot[:m, None] - pot[None, m:]
    if (reduced < -CERT_TOL).any():
        i, j = np.argwhere(reduced < -CERT_TOL)[0]
        raise InvariantError(f"negative reduced cost {reduced[i, j]} on arc ({i}, {j})")
    loaded = flow > 0
    if (reduced[loaded] > CERT_TOL).any():
        i, j = np.argwhere(loaded & (reduced > CERT_TOL))[0]
        raise InvariantError(f"loaded arc ({i}, {j}) has reduced cost {reduced[i, j]}")


def transport_counts(
    locations_s: Sequence, supply: Sequence[int], locations_d: Sequence, demand: Sequence[int],
    certify: bool = False,
) -> tuple[dict[tuple[int, int], int], float]:
    """Solve a balanced instance given as plain vectors (demands positive here)."""
    if sum(supply) == 0:
        return {}, 0.0
    cost = _distance_matrix(locations_s, locations_d)
    flow, pot = kernels.transport(cost, supply, demand)
    if certify:
        check_reduced_costs(cost, flow, pot)
    weights: dict[tuple[int, int], int] = {}
    total = 0.0
    for i, j in zip(*np.nonzero(flow)):
        w = int(flow[i, j])
        weights[(int(i), int(j))] = w
        total += w * float(cost[i, j])
    return weights, total


def solve_transport(t: TransportInstance, certify: bool = False) -> Assignment:
    """Optimal integral assignment for a balanced transportation instance.

    Successive shortest paths with potentials over the complete bipartite graph.
    """
    if t.imbalance != 0:
        raise BalanceError(f"unbalanced instance: sum(s) + sum(d) = {t.imbalance}")
    weights, total = transport_counts(
        [loc for loc, _ in t.supplies],
        [s for _, s in t.supplies],
        [loc for loc, _ in t.demands],
        [-d for _, d in t.demands],
        certify=certify,
    )
    return Assignment(weights, total)


def _best_permutation(cost: np.ndarray) -> tuple[tuple[int, ...], float]:
    n = cost.shape[0]
    best: tuple[int, ...] = tuple(range(n))
    best_cost = math.inf
    rows = range(n)
    for perm in itertools.permutations(range(n)):
        c = math.fsum(cost[i, perm[i]] for i in rows)
        if c < best_cost:
            best, best_cost = perm, c
    return best, (best_cost if n else 0.0)


def brute_force_matching(reds: Sequence[PointRecord], blues: Sequence[PointRecord]) -> Matching:
    """Enumerate all permutations. Refuses more than nine points per side."""
    if len(reds) != len(blues):
        raise SizeMismatchError(f"{len(reds)} reds vs {len(blues)} blues")
    if len(reds) > BRUTE_FORCE_MAX:
        raise InstanceTooLargeError(f"{len(reds)} points per side exceeds {BRUTE_FORCE_MAX}")
    cost = _distance_matrix([r.pos for r in reds], [b.pos for b in blues])
    perm, total = _best_permutation(cost)
    return Matching([(reds[i].id, blues[perm[i]].id) for i in range(len(reds))], total)


def brute_force_transport(t: TransportInstance) -> Assignment:
    """Expand multiplicities into unit points and enumerate."""
    if t.imbalance != 0:
        raise BalanceError(f"unbalanced instance: sum(s) + sum(d) = {t.imbalance}")
    total = t.total_supply
    nloc = len(t.supplies) + len(t.demands)
    if total > 8 or nloc > 6:
        raise InstanceTooLargeError(
            f"total supply {total} / {nloc} locations exceeds the oracle limit (8 / 6)"
        )
    rows = [i for i, (_, s) in enumerate(t.supplies) for _ in range(s)]
    cols = [j for j, (_, d) in enumerate(t.demands) for _ in range(-d)]
    cost = _distance_matrix(
        [t.supplies[i][0] for i in rows], [t.demands[j][0] for j in cols]
    )
    perm, _ = _best_permutation(cost)
    weights: dict[tuple[int, int], int] = {}
    for a, b in enumerate(perm):
        key = (rows[a], cols[b])
        weights[key] = weights.get(key, 0) + 1
    value = math.fsum(
        w * distance(t.supplies[i][0], t.demands[j][0]) for (i, j), w in weights.items()
    )
    return Assignment(weights, value)
