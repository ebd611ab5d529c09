from __future__ import annotations

import csv
import io

import pytest

from prodnorm.config import SeesawOptions
from prodnorm.errors import InputError
from prodnorm.repro import (
    ANCHORS,
    CASES,
    _Recorder,
    as_records,
    compare,
    repro_all,
    run_case,
    to_csv,
)


@pytest.mark.parametrize(
    "computed,expected,tol,comparison,ok",
    [
        (1.0, 1.0, 0.0, "equals", True),
        (1.0 + 2e-6, 1.0, 1e-6, "equals", False),
        (0.86, 0.8536, 1e-3, "at-least", True),
        (0.85, 0.8536, 1e-3, "at-least", False),
        (1.0 + 5e-7, 1.0, 1e-6, "at-most", True),
        (1.1, 1.0, 1e-6, "at-most", False),
        (float("nan"), 0.0, 1.0, "at-most", False),
    ],
)
def test_compare(computed: float, expected: float, tol: float, comparison: str, ok: bool) -> None:
    assert compare(computed, expected, tol, comparison) is ok  # type: ignore[arg-type]


def test_unknown_case() -> None:
    with pytest.raises(InputError) as e:
        run_case("no-such-case")
    assert "epr-product" in str(e.value)


@pytest.mark.parametrize("case_id", [c for c in CASES if c != "norm-consistency"])
def test_case_passes(case_id: str) -> None:
    results = run_case(case_id, SeesawOptions(restarts=8, seed=0))
    assert results
    assert all(r.case_id == case_id for r in results)
    failed = [(r.check, r.computed) for r in results if not r.passed]
    assert not failed


def test_norm_consistency_case_passes() -> None:
    results = run_case("norm-consistency", SeesawOptions(seed=0))
    assert [r.check for r in results] == ["witness agreement", "value agreement"]
    assert all(r.passed for r in results)


def test_records_and_csv_hide_timings_by_default() -> None:
    results = run_case("trace-norm-sum")
    records = as_records(results)
    assert list(records[0]) == [
        "case_id",
        "check",
        "expected",
        "computed",
        "tolerance",
        "comparison",
        "passed",
        "anchor",
    ]
    assert "runtime_ms" in as_records(results, timings=True)[0]
    rows = list(csv.DictReader(io.StringIO(to_csv(results))))
    assert rows[0]["expected"] == "2"
    assert rows[0]["passed"] == "True"
    assert to_csv([]) == ""


def test_repro_all_is_seed_deterministic() -> None:
    first = as_records(repro_all(seed=3))
    second = as_records(repro_all(seed=3))
    assert first == second
    assert all(rec["passed"] for rec in first)


def test_every_case_uses_a_known_anchor() -> None:
    assert {anchor for anchor, _ in CASES.values()} <= ANCHORS
    results = run_case("trace-norm-sum")
    assert all(r.anchor in ANCHORS for r in results)
    with pytest.raises(InputError):
        _Recorder("made-up", "an unlisted anchor")
