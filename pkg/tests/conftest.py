"""Pytest configuration: ensure src/ is importable in tests.

This allows importing `prodnorm` without installing the package in editable mode.
"""

import sys
from pathlib import Path

import pytest

REPO_ROOT = Path(__file__).resolve().parents[1]
SRC_ROOT = REPO_ROOT / "src"
for p in (REPO_ROOT, SRC_ROOT):
    sys.path.insert(0, str(p))

from prodnorm.config import SeesawOptions  # noqa: E402


@pytest.fixture
def fast_opts() -> SeesawOptions:
    """Few restarts; enough for the small instances used in unit tests."""
    return SeesawOptions(restarts=6, max_iters=300, tol=1e-10, seed=7)


@pytest.fixture(autouse=True)
def _no_env_cap(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.delenv("PRODNORM_DIM_CAP", raising=False)
