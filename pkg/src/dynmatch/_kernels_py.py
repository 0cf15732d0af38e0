"""Pure-Python hot kernels.

Same signatures as the compiled ``_ckernels`` module; selected by
:mod:`dynmatch.kernels` when the extension is unavailable.
"""

from __future__ import annotations

import numpy as np

INF = float("inf")


def hungarian(cost):
    """Minimum-cost perfect assignment on a square cost matrix.

    Potential-based O(k^3) shortest augmenting path formulation. Returns
    ``(assignment, total)`` where ``assignment[i]`` is the column of row ``i``.
    """
    a = np.asarray(cost, dtype=np.float64).tolist()
    n = len(a)
    if n == 0:
        return [], 0.0
    u = [0.0] * (n + 1)
    v = [0.0] * (n + 1)
    p = [0] * (n + 1)
    way = [0] * (n + 1)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = [INF] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0 = p[j0]
            row = a[i0 - 1]
            ui0 = u[i0]
            delta = INF
            j1 = 0
            for j in range(1, n + 1):
                if not used[j]:
                    cur = row[j - 1] - ui0 - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while True:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
            if j0 == 0:
                break
    assignment = [0] * n
    for j in range(1, n + 1):
        assignment[p[j] - 1] = j - 1
    total = 0.0
    for i in range(n):
        total += a[i][assignment[i]]
    return assignment, total


def transport(cost, supply, demand):
    """Successive shortest paths with node potentials on a dense bipartite graph.

    ``supply`` and ``demand`` are non-negative integer vectors with equal sums.
    Returns ``(flow, potentials)``: ``flow`` is an ``m x k`` int64 array and
    ``potentials`` has ``m + k`` entries (supplies first), suitable for a
    reduced-cost optimality check.
    """
    c = np.asarray(cost, dtype=np.float64).tolist()
    m = len(supply)
    k = len(demand)
    flow = [[0] * k for _ in range(m)]
    rem_s = [int(s) for s in supply]
    rem_d = [int(d) for d in demand]
    nn = m + k
    pot = [0.0] * nn
    left = sum(rem_s)
    while left > 0:
        dist = [INF] * nn
        prev = [-1] * nn
        done = [False] * nn
        # active supplies keep potential 0, so their source arcs have reduced cost 0
        for i in range(m):
            if rem_s[i] > 0:
                dist[i] = 0.0
        best_t = -1
        best_d = INF
        while True:
            x = -1
            dx = INF
            for q in range(nn):
                if not done[q] and dist[q] < dx:
                    dx = dist[q]
                    x = q
            if x < 0 or dx >= best_d:
                break
            done[x] = True
            if x < m:
                row = c[x]
                px = pot[x]
                for j in range(k):
                    y = m + j
                    if done[y]:
                        continue
                    rc = row[j] + px - pot[y]
                    if rc < 0.0:
                        rc = 0.0
                    nd = dx + rc
                    if nd < dist[y]:
                        dist[y] = nd
                        prev[y] = x
            else:
                j = x - m
                if rem_d[j] > 0 and dx < best_d:
                    best_d = dx
                    best_t = x
                px = pot[x]
                for i in range(m):
                    if done[i] or flow[i][j] <= 0:
                        continue
                    rc = -c[i][j] + px - pot[i]
                    if rc < 0.0:
                        rc = 0.0
                    nd = dx + rc
                    if nd < dist[i]:
                        dist[i] = nd
                        prev[i] = x
        if best_t < 0:
            raise RuntimeError("transport instance is infeasible")
        for q in range(nn):
            d = dist[q]
            pot[q] += d if d < best_d else best_d
        # bottleneck along the path
        t = best_t
        amount = rem_d[t - m]
        y = t
        while True:
            x = prev[y]
            if x < 0:
                break
            if x >= m:
                # backward arc demand x -> supply y
                f = flow[y][x - m]
                if f < amount:
                    amount = f
            y = x
        start = y
        if rem_s[start] < amount:
            amount = rem_s[start]
        y = t
        while True:
            x = prev[y]
            if x < 0:
                break
            if x < m:
                flow[x][y - m] += amount
            else:
                flow[y][x - m] -= amount
            y = x
        rem_s[start] -= amount
        rem_d[t - m] -= amount
        left -= amount
    return np.array(flow, dtype=np.int64).reshape(m, k), np.array(pot, dtype=np.float64)


def bellman_ford(weights, src, dst, tol=1e-9):
    """Shortest ``src -> dst`` path on a dense arc-weight matrix (``inf`` = no arc).

    Improvements smaller than ``tol`` are ignored except to shorten the arc
    count. Returns ``(length, path)`` with ``path`` a node list, or
    ``(inf, [])`` if ``dst`` is unreachable. Raises ``ValueError`` with message
    ``"negative cycle"`` when one is reachable from ``src``.
    """
    w = np.asarray(weights, dtype=np.float64).tolist()
    n = len(w)
    dist = [INF] * n
    hops = [n + 1] * n
    pred = [-1] * n
    dist[src] = 0.0
    hops[src] = 0
    for _ in range(n):
        changed = False
        for i in range(n):
            di = dist[i]
            if di == INF:
                continue
            hi = hops[i] + 1
            row = w[i]
            for j in range(n):
                wij = row[j]
                if wij == INF or j == src:
                    continue
                nd = di + wij
                dj = dist[j]
                if nd < dj - tol or (nd <= dj + tol and hi < hops[j]):
                    if nd < dj:
                        dist[j] = nd
                    hops[j] = hi
                    pred[j] = i
                    changed = True
        if not changed:
            break
    for i in range(n):
        di = dist[i]
        if di == INF:
            continue
        row = w[i]
        for j in range(n):
            if row[j] != INF and di + row[j] < dist[j] - 1e-7:
                raise ValueError("negative cycle")
    if dist[dst] == INF:
        return INF, []
    path = [dst]
    while path[-1] != src:
        path.append(pred[path[-1]])
        if len(path) > n or path[-1] < 0:
            raise ValueError("negative cycle")
    path.reverse()
    return dist[dst], path
