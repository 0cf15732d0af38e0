from __future__ import annotations

import random

import pytest

from dynmatch import kernels
from dynmatch.core import Color, MatcherConfig


@pytest.fixture(params=sorted(kernels.BACKENDS))
def backend(request):
    """Run the test once per available kernel backend."""
    previous = kernels.BACKEND
    kernels.use_backend(request.param)
    yield request.param
    kernels.use_backend(previous)


@pytest.fixture
def no_audit_env(monkeypatch):
    monkeypatch.delenv("DYNMATCH_AUDIT", raising=False)


def random_workload(matcher, rng: random.Random, steps: int, coord: int = 500,
                    delete_prob: float = 0.35, cluster: bool = True):
    """Drive ``matcher`` with a mix of inserts and deletes; returns live id pairs."""
    live = []
    half = matcher.config.D // 2
    top = min(coord, half - 1)

    def pt():
        if cluster and rng.random() < 0.4:
            cx = rng.randrange(max(top - 8, 1))
            return (cx + rng.randrange(8), rng.randrange(top + 1))
        return (rng.randrange(top + 1), rng.randrange(top + 1))

    for _ in range(steps):
        if live and rng.random() < delete_prob:
            matcher.delete_pair(*live.pop(rng.randrange(len(live))))
        else:
            live.append(matcher.insert_pair(pt(), pt()).ids)
    return live


def small_config(p: int = 2, D: int = 1 << 8, seed: int = 0) -> MatcherConfig:
    return MatcherConfig(p=p, D=D, seed=seed)


RED, BLUE = Color.RED, Color.BLUE


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE: list[str] = []


def record_criterion(number: int, ok: bool, detail: str) -> None:
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
