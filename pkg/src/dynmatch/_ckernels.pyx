# cython: language_level=3
"""Compiled hot kernels; mirror of ``_kernels_py`` signature for signature."""

import numpy as np
cimport numpy as cnp
from libc.math cimport INFINITY

cnp.import_array()


def hungarian(cost):
    cdef double[:, ::1] a = np.ascontiguousarray(cost, dtype=np.float64)
    cdef Py_ssize_t n = a.shape[0]
    if n == 0:
        return [], 0.0
    cdef double[::1] u = np.zeros(n + 1)
    cdef double[::1] v = np.zeros(n + 1)
    cdef double[::1] minv = np.empty(n + 1)
    cdef Py_ssize_t[::1] p = np.zeros(n + 1, dtype=np.intp)
    cdef Py_ssize_t[::1] way = np.zeros(n + 1, dtype=np.intp)
    cdef unsigned char[::1] used = np.zeros(n + 1, dtype=np.uint8)
    cdef Py_ssize_t i, j, j0, j1, i0
    cdef double delta, cur, ui0
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        for j in range(n + 1):
            minv[j] = INFINITY
            used[j] = 0
        while True:
            used[j0] = 1
            i0 = p[j0]
            ui0 = u[i0]
            delta = INFINITY
            j1 = 0
            for j in range(1, n + 1):
                if not used[j]:
                    cur = a[i0 - 1, j - 1] - ui0 - v[j]
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
    cdef double total = 0.0
    for j in range(1, n + 1):
        assignment[p[j] - 1] = j - 1
    for i in range(n):
        total += a[i, <Py_ssize_t>assignment[i]]
    return assignment, total


def transport(cost, supply, demand):
    cdef double[:, ::1] c = np.ascontiguousarray(cost, dtype=np.float64)
    cdef Py_ssize_t m = len(supply)
    cdef Py_ssize_t k = len(demand)
    cdef Py_ssize_t nn = m + k
    flow_arr = np.zeros((m, k), dtype=np.int64)
    cdef long long[:, ::1] flow = flow_arr
    cdef long long[::1] rem_s = np.asarray(supply, dtype=np.int64).copy()
    cdef long long[::1] rem_d = np.asarray(demand, dtype=np.int64).copy()
    pot_arr = np.zeros(nn)
    cdef double[::1] pot = pot_arr
    cdef double[::1] dist = np.empty(nn)
    cdef Py_ssize_t[::1] prev = np.empty(nn, dtype=np.intp)
    cdef unsigned char[::1] done = np.empty(nn, dtype=np.uint8)
    cdef long long left = 0
    cdef Py_ssize_t i, j, q, x, y, t, start, best_t
    cdef double dx, best_d, rc, nd, px, d
    cdef long long amount, f
    for i in range(m):
        left += rem_s[i]
    while left > 0:
        for q in range(nn):
            dist[q] = INFINITY
            prev[q] = -1
            done[q] = 0
        for i in range(m):
            if rem_s[i] > 0:
                dist[i] = 0.0
        best_t = -1
        best_d = INFINITY
        while True:
            x = -1
            dx = INFINITY
            for q in range(nn):
                if not done[q] and dist[q] < dx:
                    dx = dist[q]
                    x = q
            if x < 0 or dx >= best_d:
                break
            done[x] = 1
            px = pot[x]
            if x < m:
                for j in range(k):
                    y = m + j
                    if done[y]:
                        continue
                    rc = c[x, j] + px - pot[y]
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
                for i in range(m):
                    if done[i] or flow[i, j] <= 0:
                        continue
                    rc = -c[i, j] + px - pot[i]
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
        t = best_t
        amount = rem_d[t - m]
        y = t
        while True:
            x = prev[y]
            if x < 0:
                break
            if x >= m:
                f = flow[y, x - m]
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
                flow[x, y - m] += amount
            else:
                flow[y, x - m] -= amount
            y = x
        rem_s[start] -= amount
        rem_d[t - m] -= amount
        left -= amount
    return flow_arr, pot_arr


def bellman_ford(weights, Py_ssize_t src, Py_ssize_t dst, double tol=1e-9):
    cdef double[:, ::1] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef Py_ssize_t n = w.shape[0]
    cdef double[::1] dist = np.full(n, INFINITY)
    cdef Py_ssize_t[::1] hops = np.full(n, n + 1, dtype=np.intp)
    cdef Py_ssize_t[::1] pred = np.full(n, -1, dtype=np.intp)
    cdef Py_ssize_t rnd, i, j, hi
    cdef double di, wij, nd, dj
    cdef bint changed
    dist[src] = 0.0
    hops[src] = 0
    for rnd in range(n):
        changed = False
        for i in range(n):
            di = dist[i]
            if di == INFINITY:
                continue
            hi = hops[i] + 1
            for j in range(n):
                wij = w[i, j]
                if wij == INFINITY or j == src:
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
        if di == INFINITY:
            continue
        for j in range(n):
            wij = w[i, j]
            if wij != INFINITY and di + wij < dist[j] - 1e-7:
                raise ValueError("negative cycle")
    if dist[dst] == INFINITY:
        return INFINITY, []
    path = [dst]
    cdef Py_ssize_t cur = dst
    while cur != src:
        cur = pred[cur]
        if cur < 0 or len(path) > n:
            raise ValueError("negative cycle")
        path.append(cur)
    path.reverse()
    return dist[dst], path
