"""Seeded point generators."""

from __future__ import annotations

import numpy as np

GRID = 500


def gen_uniform(n: int, seed: int = 0) -> list[tuple[int, int]]:
    """``n`` points with integer coordinates uniform on ``[1, 500]``."""
    if n <= 0:
        return []
    rng = np.random.default_rng(seed)
    pts = rng.integers(1, GRID + 1, size=(n, 2))
    return [(int(x), int(y)) for x, y in pts]


def gen_gaussian(n: int, seed: int = 0, mean: float = 0.5, sd: float = 0.25) -> list[tuple[int, int]]:
    """``round(500 * N(mean, sd))`` per axis, clamped to be nonnegative."""
    if n <= 0:
        return []
    rng = np.random.default_rng(seed)
    pts = np.rint(GRID * rng.normal(mean, sd, size=(n, 2))).astype(np.int64)
    np.maximum(pts, 0, out=pts)
    return [(int(x), int(y)) for x, y in pts]


GENERATORS = {"uniform": gen_uniform, "gaussian": gen_gaussian}
