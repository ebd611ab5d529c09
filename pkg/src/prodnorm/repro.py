"""Reproduction suite for the worked examples and counterexamples.

Each case recomputes a known value from scratch and compares it with the
expected one. Cases are deterministic given the seed; runtimes are
recorded but kept out of the rendered outputs unless asked for.
"""

from __future__ import annotations

import csv
import io
import logging
import math
import time
from collections.abc import Callable
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Literal

import numpy as np
from jinja2 import Environment, FileSystemLoader, StrictUndefined

from .config import Limits, SeesawOptions
from .constants import (
    ERR_UNKNOWN_ANCHOR,
    ERR_UNKNOWN_CASE,
    TEMPLATES_PACKAGE,
    TPL_REPRO_REPORT,
)
from .errors import InputError
from .games import (
    acceptance_probability,
    chsh_game,
    chsh_spec,
    classical_value,
    magic_square_game,
    magic_square_spec,
    map_lb,
    norm_consistency,
    random_spec,
)
from .linalg import Bipartition, ComplexMatrix, max_entangled, rank_one
from .norms import (
    hj_product_bound,
    product_norm_lb,
    product_norm_rank1,
    sandwich_bounds,
    trace_norm,
)
from .restarts import derive_seed, make_rng
from .sop import (
    SopStart,
    diamond_lb,
    l1_norm_lb,
    sop_product_norm_lb,
    stability_scan,
    tensor_identity,
    transpose_sop,
    transpose_swap_witness,
)
from .strategies import chsh_optimal, magic_square_optimal

logger = logging.getLogger(__name__)

Comparison = Literal["equals", "at-least", "at-most"]

# independent random streams per case
_STREAM_TRACE_BOUND = 41
_STREAM_RANDOM_SPEC = 43

ANCHORS: frozenset[str] = frozenset(
    {
        "rank-one product norm",
        "strict sandwich bound",
        "trace norm of the unnormalized EPR projector",
        "transpose l1 non-stability",
        "transpose product-norm non-stability",
        "trace of a product inequality",
        "CHSH game",
        "magic square game",
        "acceptance probability equals squared norm",
    }
)


@dataclass(frozen=True)
class ReproResult:
    case_id: str
    check: str
    expected: float
    computed: float
    tolerance: float
    comparison: Comparison
    passed: bool
    runtime_ms: int
    anchor: str


def compare(computed: float, expected: float, tolerance: float, comparison: Comparison) -> bool:
    if not math.isfinite(computed):
        return False
    if comparison == "equals":
        return abs(computed - expected) <= tolerance
    if comparison == "at-least":
        return computed >= expected - tolerance
    return computed <= expected + tolerance


class _Recorder:
    """Collects the checks of one case and times each of them."""

    def __init__(self, case_id: str, anchor: str) -> None:
        if anchor not in ANCHORS:
            raise InputError(ERR_UNKNOWN_ANCHOR.format(anchor=anchor))
        self.case_id = case_id
        self.anchor = anchor
        self.results: list[ReproResult] = []
        self._mark = time.perf_counter()

    def record(
        self,
        check: str,
        computed: float,
        expected: float,
        tolerance: float,
        comparison: Comparison = "equals",
    ) -> None:
        now = time.perf_counter()
        passed = compare(computed, expected, tolerance, comparison)
        self.results.append(
            ReproResult(
                case_id=self.case_id,
                check=check,
                expected=float(expected),
                computed=float(computed),
                tolerance=tolerance,
                comparison=comparison,
                passed=passed,
                runtime_ms=int(round((now - self._mark) * 1000)),
                anchor=self.anchor,
            )
        )
        logger.debug("%s/%s computed=%.12g passed=%s", self.case_id, check, computed, passed)
        self._mark = now


def _basis(d: int, i: int) -> ComplexMatrix:
    e = np.zeros(d, dtype=np.complex128)
    e[i] = 1.0
    return e


def _epr_product(rec: _Recorder, opts: SeesawOptions, limits: Limits) -> None:
    part = Bipartition(2, 2)
    epr = max_entangled(2)
    zero = _basis(4, 0)
    rec.record("rank-one formula", product_norm_rank1(epr, zero, part), 1 / math.sqrt(2), 1e-10)
    cert = product_norm_lb(rank_one(epr, zero), part, opts)
    rec.record("seesaw certificate", cert.value, 1 / math.sqrt(2), 1e-6)


def _swap_product(rec: _Recorder, opts: SeesawOptions, limits: Limits) -> None:
    part = Bipartition(2, 2)
    a = rank_one(_basis(4, 0), _basis(4, 3))
    lower, upper = sandwich_bounds(a, part)
    rec.record("sandwich lower", lower, 0.0, 1e-12)
    rec.record("sandwich upper", upper, 1.0, 1e-12)
    rec.record("seesaw certificate", product_norm_lb(a, part, opts).value, 1.0, 1e-6)


def _trace_norm_sum(rec: _Recorder, opts: SeesawOptions, limits: Limits) -> None:
    phi = np.eye(2, dtype=np.complex128).reshape(-1)
    rec.record("trace norm", trace_norm(rank_one(phi, phi)), 2.0, 1e-10)


def _transpose_l1(rec: _Recorder, opts: SeesawOptions, limits: Limits) -> None:
    t = transpose_sop(2, Bipartition(1, 2))
    rec.record("l1 norm", l1_norm_lb(t, opts).value, 1.0, 1e-6)
    extended = tensor_identity(t, 2, limits)
    u = np.zeros((2, 2, 2), dtype=np.complex128)
    u[0, 0, 0] = u[1, 1, 0] = 1 / math.sqrt(2)
    witness = trace_norm(extended.apply_rank_one(u.reshape(-1), u.reshape(-1)))
    rec.record("one-qubit ancilla witness", witness, 2.0, 1e-6, "at-least")
    rec.record("stabilized l1 norm", l1_norm_lb(extended, opts).value, 2.0, 1e-6, "at-least")
    rec.record("diamond norm", diamond_lb(t, opts, limits).value, 2.0, 1e-6)


def _transpose_product(rec: _Recorder, opts: SeesawOptions, limits: Limits) -> None:
    t = transpose_sop(4, Bipartition(2, 2))
    rec.record("product norm", sop_product_norm_lb(t, opts).value, 1.0, 1e-6, "at-most")
    starts: dict[int, list[SopStart]] = {2: [transpose_swap_witness(2)]}
    scan = stability_scan(t, (2,), opts, warm_starts=starts, limits=limits)
    rec.record("stabilized N=2", scan.entries[-1].value, 4.0, 1e-5, "at-least")
    rec.record("diamond norm", diamond_lb(t, opts, limits).value, 4.0, 1e-5)


def _trace_product_bound(rec: _Recorder, opts: SeesawOptions, limits: Limits) -> None:
    worst = -math.inf
    for k in range(300):
        d = (2, 3, 5)[k % 3]
        rng = make_rng(opts.seed, _STREAM_TRACE_BOUND, k)
        b = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        c = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        lhs, rhs = hj_product_bound(b, c)
        worst = max(worst, lhs - rhs)
    rec.record("max violation", worst, 0.0, 1e-10, "at-most")


def _chsh(rec: _Recorder, opts: SeesawOptions, limits: Limits) -> None:
    spec = chsh_spec()
    rec.record("classical value", classical_value(chsh_game(), limits), 0.75, 1e-12)
    rec.record(
        "rotated strategy",
        acceptance_probability(spec, chsh_optimal()),
        math.cos(math.pi / 8) ** 2,
        1e-9,
    )
    report = map_lb(spec, 2, 2, opts, limits=limits)
    rec.record("entangled value dP=2", report.probability, 0.8536, 1e-3, "at-least")


def _magic_square(rec: _Recorder, opts: SeesawOptions, limits: Limits) -> None:
    rec.record("classical value", classical_value(magic_square_game(), limits), 8 / 9, 1e-12)
    strategy = acceptance_probability(magic_square_spec(), magic_square_optimal())
    rec.record("Pauli square strategy", strategy, 1.0, 1e-9)


def _norm_consistency(rec: _Recorder, opts: SeesawOptions, limits: Limits) -> None:
    spec = random_spec(2, 2, 2, derive_seed(opts.seed, _STREAM_RANDOM_SPEC))
    report = norm_consistency(spec, 1, opts, limits)
    rec.record("witness agreement", report.witness_gap, 0.0, 1e-6, "at-most")
    rec.record("value agreement", report.gap, 0.0, 1e-6, "at-most")


CaseFn = Callable[[_Recorder, SeesawOptions, Limits], None]

CASES: dict[str, tuple[str, CaseFn]] = {
    "epr-product": ("rank-one product norm", _epr_product),
    "swap-product": ("strict sandwich bound", _swap_product),
    "trace-norm-sum": ("trace norm of the unnormalized EPR projector", _trace_norm_sum),
    "transpose-l1": ("transpose l1 non-stability", _transpose_l1),
    "transpose-product": ("transpose product-norm non-stability", _transpose_product),
    "trace-product-bound": ("trace of a product inequality", _trace_product_bound),
    "chsh": ("CHSH game", _chsh),
    "magic-square": ("magic square game", _magic_square),
    "norm-consistency": ("acceptance probability equals squared norm", _norm_consistency),
}


def run_case(
    case_id: str, opts: SeesawOptions | None = None, limits: Limits | None = None
) -> list[ReproResult]:
    if case_id not in CASES:
        raise InputError(ERR_UNKNOWN_CASE.format(case=case_id, known=", ".join(CASES)))
    opts = opts or SeesawOptions()
    limits = limits or Limits.from_env()
    anchor, fn = CASES[case_id]
    rec = _Recorder(case_id, anchor)
    fn(rec, opts, limits)
    logger.info(
        "case %s: %d/%d passed",
        case_id,
        sum(r.passed for r in rec.results),
        len(rec.results),
    )
    return rec.results


def repro_all(
    seed: int = 0, opts: SeesawOptions | None = None, limits: Limits | None = None
) -> list[ReproResult]:
    opts = (opts or SeesawOptions()).model_copy(update={"seed": seed})
    results: list[ReproResult] = []
    for case_id in CASES:
        results.extend(run_case(case_id, opts, limits))
    return results


def as_records(results: list[ReproResult], timings: bool = False) -> list[dict[str, object]]:
    """Plain dicts in a stable key order; ``runtime_ms`` only with ``timings``."""
    records = []
    for r in results:
        d = asdict(r)
        if not timings:
            d.pop("runtime_ms")
        records.append(d)
    return records


def to_csv(results: list[ReproResult], timings: bool = False) -> str:
    records = as_records(results, timings)
    if not records:
        return ""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(records[0]), lineterminator="\n")
    writer.writeheader()
    for rec in records:
        writer.writerow({k: _fmt(v) if isinstance(v, float) else v for k, v in rec.items()})
    return buf.getvalue()


def _fmt(value: float) -> str:
    return f"{value:.10g}"


def default_templates_dir() -> Path:
    """Return the path to the packaged templates directory."""
    try:
        from importlib.resources import files

        return Path(str(files(TEMPLATES_PACKAGE)))
    except Exception:
        return Path(__file__).parent / "templates"


def render_report(
    results: list[ReproResult],
    seed: int,
    timings: bool = False,
    templates_dir: Path | None = None,
) -> str:
    env = Environment(
        loader=FileSystemLoader(str(templates_dir or default_templates_dir())),
        undefined=StrictUndefined,
        autoescape=False,
        trim_blocks=True,
        lstrip_blocks=True,
    )
    env.filters["fmt"] = _fmt
    template = env.get_template(TPL_REPRO_REPORT)
    return template.render(
        results=results,
        seed=seed,
        timings=timings,
        passed=sum(r.passed for r in results),
        total=len(results),
    )
