from __future__ import annotations

import os
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

FIXTURES = Path(__file__).parent / "fixtures"

_ACCEPTANCE: list[str] = []


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    # compile once so that timed tests measure the work, not the JIT
    from rigidmetric import _kernels

    D = np.array([[0, 1], [1, 0]], dtype=np.int64)
    _kernels.floyd_warshall(D, 10)
    _kernels.triangle_violations(D)
    _kernels.search_embeddings(D, D, np.ones((2, 2), dtype=bool), np.array([0, 1]))


@pytest.fixture
def acceptance_line():
    def record(number: int, ok: bool, seconds: float, limit: float, detail: str) -> None:
        status = "PASS" if ok else "FAIL"
        line = f"criterion {number:2d}: {status}  {seconds:7.2f}s (limit {limit:g}s)  {detail}"
        _ACCEPTANCE.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE):
            terminalreporter.write_line(line)
