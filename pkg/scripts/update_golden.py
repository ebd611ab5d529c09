from __future__ import annotations

from pathlib import Path

from prodnorm.repro import ReproResult, render_report


def _write_golden(name: str, content: str) -> None:
    golden_dir = Path(__file__).resolve().parents[1] / "tests" / "golden"
    golden_dir.mkdir(parents=True, exist_ok=True)
    path = golden_dir / name
    # Normalize final newline
    path.write_text(content.rstrip() + "\n", encoding="utf-8")
    print(f"wrote {path}")


def _results() -> list[ReproResult]:
    # keep in sync with tests/test_snapshots.py
    return [
        ReproResult(
            case_id="epr-product",
            check="rank-one formula",
            expected=0.7071067811865476,
            computed=0.7071067811865475,
            tolerance=1e-10,
            comparison="equals",
            passed=True,
            runtime_ms=3,
            anchor="rank-one product norm",
        ),
        ReproResult(
            case_id="chsh",
            check="entangled value dP=2",
            expected=0.8536,
            computed=0.8535533905932737,
            tolerance=1e-3,
            comparison="at-least",
            passed=True,
            runtime_ms=120,
            anchor="CHSH game",
        ),
    ]


def main() -> None:
    results = _results()
    _write_golden("repro_report.md", render_report(results, seed=0))
    _write_golden("repro_report_timings.md", render_report(results, seed=0, timings=True))


if __name__ == "__main__":
    main()
