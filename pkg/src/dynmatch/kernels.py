"""Backend selection for the hot kernels.

The compiled extension is preferred; set ``DYNMATCH_PURE_PYTHON=1`` to force the
pure-Python implementation (used by the test suite to exercise both).
"""

from __future__ import annotations

import os
from types import ModuleType

from . import _kernels_py


def _load_compiled() -> ModuleType | None:
    try:
        from . import _ckernels
    except ImportError:
        return None
    return _ckernels


_compiled = _load_compiled()

BACKENDS: dict[str, ModuleType] = {"python": _kernels_py}
if _compiled is not None:
    BACKENDS["cython"] = _compiled

if os.getenv("DYNMATCH_PURE_PYTHON") == "1" or _compiled is None:
    BACKEND = "python"
else:
    BACKEND = "cython"

_impl = BACKENDS[BACKEND]


def use_backend(name: str) -> None:
    """Switch the active backend process-wide (``"cython"`` or ``"python"``)."""
    global BACKEND, _impl
    if name not in BACKENDS:
        raise ValueError(f"backend {name!r} unavailable; have {sorted(BACKENDS)}")
    BACKEND = name
    _impl = BACKENDS[name]


def hungarian(cost):
    return _impl.hungarian(cost)


def transport(cost, supply, demand):
    return _impl.transport(cost, supply, demand)


def bellman_ford(weights, src, dst, tol=1e-9):
    return _impl.bellman_ford(weights, src, dst, tol)
