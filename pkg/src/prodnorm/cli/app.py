"""Prodnorm CLI application.

Defines the Typer application with a root callback holding the global
options and these command groups:
- healthcheck: environment sanity check
- init-config: write a sample prodnorm.yaml
- norm: trace, product and rank-one product norms of a matrix
- sop: l1, diamond and product norms of a superoperator, stability scans
- game: verifier values, strategy evaluation, classical values, built-ins
- repro: the reproduction suite
"""

from __future__ import annotations

import logging
import sys
from collections.abc import Callable, Iterator, Sequence
from contextlib import contextmanager
from dataclasses import dataclass, field
from importlib.resources import files as ir_files
from pathlib import Path
from typing import Annotated, Any

import typer
from pydantic import ValidationError
from rich.console import Console
from rich.logging import RichHandler
from rich.panel import Panel
from rich.table import Table

from prodnorm import __version__
from prodnorm.config import Limits, ProdnormConfig, SeesawOptions, load_config
from prodnorm.constants import (
    ERR_INVALID_NS,
    ERR_REPRO_FAILED,
    ERR_UNKNOWN_BUILTIN,
    EXIT_OK,
    EXIT_REPRO_FAILED,
    EXIT_RESOURCE,
    EXIT_VALIDATION,
    MSG_CONFIG_CREATED,
    MSG_CONFIG_EXISTS,
    MSG_HEALTH_ERR,
    MSG_HEALTH_OK,
    MSG_REPORT_WRITTEN,
    MSG_USAGE,
    PANEL_REPRO,
    SAMPLE_PACKAGE,
    SAMPLE_YAML_FILENAME,
    SIGNIFICANT_DIGITS,
)
from prodnorm.errors import InputError, ProdnormError, ReproFailure, ResourceError
from prodnorm.games import (
    BUILTIN_GAMES,
    BUILTIN_SPECS,
    acceptance_probability,
    classical_value,
    embed_strategy,
    map_lb,
)
from prodnorm.jsonio import (
    ClassicalGamePayload,
    MatrixPayload,
    SpecPayload,
    StrategyPayload,
    dump,
    load_game,
    load_matrix,
    load_spec,
    load_strategy,
    load_superoperator,
    write_json,
)
from prodnorm.linalg import Bipartition
from prodnorm.norms import product_norm_lb, product_norm_rank1, sandwich_bounds, trace_norm
from prodnorm.repro import as_records, render_report, repro_all, run_case, to_csv
from prodnorm.sop import (
    diamond_lb,
    l1_norm_lb,
    sop_product_norm_lb,
    square_swap_witness,
    stability_scan,
)
from prodnorm.strategies import FIXTURES

app: typer.Typer = typer.Typer(no_args_is_help=True)
norm_app: typer.Typer = typer.Typer(no_args_is_help=True, help="Operator norms of a matrix.")
sop_app: typer.Typer = typer.Typer(no_args_is_help=True, help="Superoperator norms.")
game_app: typer.Typer = typer.Typer(no_args_is_help=True, help="Two-prover protocols.")
app.add_typer(norm_app, name="norm")
app.add_typer(sop_app, name="sop")
app.add_typer(game_app, name="game")

console: Console = Console()
console_err: Console = Console(stderr=True)

BUILTIN_STRATEGY = {"chsh": "chsh-optimal", "magicsquare": "magicsquare-optimal"}


@dataclass
class CliState:
    json: bool = False
    csv: bool = False
    config: ProdnormConfig = field(default_factory=ProdnormConfig)
    overrides: dict[str, Any] = field(default_factory=dict)

    @property
    def limits(self) -> Limits:
        return self.config.limits

    def seesaw(self, **local: Any) -> SeesawOptions:
        """Config values, then global flags, then command flags."""
        update = {**self.overrides, **{k: v for k, v in local.items() if v is not None}}
        try:
            return SeesawOptions.model_validate({**self.config.seesaw.model_dump(), **update})
        except ValidationError as e:
            raise typer.BadParameter(str(e)) from e


RestartsOpt = Annotated[
    int | None, typer.Option("--restarts", min=1, help="Seesaw restarts.")
]
TolOpt = Annotated[
    float | None, typer.Option("--tol", min=0.0, help="Relative stopping tolerance.")
]
SeedOpt = Annotated[int | None, typer.Option("--seed", help="Base seed for restarts.")]
MaxItersOpt = Annotated[
    int | None, typer.Option("--max-iters", min=1, help="Iterations per restart.")
]
D1Opt = Annotated[int, typer.Option("--d1", min=1, help="Dimension of the first factor.")]
D2Opt = Annotated[int, typer.Option("--d2", min=1, help="Dimension of the second factor.")]
SopOpt = Annotated[Path, typer.Option("--sop", help="Superoperator JSON file.")]
SpecOpt = Annotated[Path, typer.Option("--spec", help="Verifier spec JSON file.")]


def _fmt(value: float) -> str:
    return f"{value:.{SIGNIFICANT_DIGITS}g}"


def _state(ctx: typer.Context) -> CliState:
    obj = ctx.find_root().obj
    return obj if isinstance(obj, CliState) else CliState()


@contextmanager
def _guard() -> Iterator[None]:
    """Map library errors onto the exit code contract."""
    try:
        yield
    except ResourceError as e:
        console_err.print(str(e), style="red", markup=False)
        raise typer.Exit(code=EXIT_RESOURCE)
    except ReproFailure as e:
        console_err.print(str(e), style="red", markup=False)
        raise typer.Exit(code=EXIT_REPRO_FAILED)
    except (ProdnormError, ValueError) as e:
        console_err.print(str(e), style="red", markup=False)
        raise typer.Exit(code=EXIT_VALIDATION)


def _emit(state: CliState, payload: dict[str, Any], title: str) -> None:
    if state.json:
        console.print_json(data=payload)
        return
    scalars = {k: v for k, v in payload.items() if not isinstance(v, (dict, list))}
    if state.csv:
        console.print(",".join(scalars), markup=False, highlight=False)
        console.print(
            ",".join(_fmt(v) if isinstance(v, float) else str(v) for v in scalars.values()),
            markup=False,
            highlight=False,
        )
        return
    console.print(f"[bold]{title}[/bold]")
    for key, value in scalars.items():
        shown = _fmt(value) if isinstance(value, float) else value
        console.print(f" {key}: {shown}", highlight=False)


def _configure_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(message)s",
        handlers=[RichHandler(console=console_err, show_path=False)],
        force=True,
    )


@app.callback()
def main_callback(
    ctx: typer.Context,
    json_out: Annotated[
        bool, typer.Option("--json", help="Emit one JSON document on stdout.")
    ] = False,
    csv_out: Annotated[bool, typer.Option("--csv", help="Emit CSV on stdout.")] = False,
    seed: SeedOpt = None,
    restarts: RestartsOpt = None,
    tol: TolOpt = None,
    max_iters: MaxItersOpt = None,
    workers: Annotated[
        int | None, typer.Option("--workers", min=1, help="Threads used for restarts.")
    ] = None,
    config: Annotated[
        Path | None, typer.Option("--config", "-c", help="Path to prodnorm.yaml")
    ] = None,
    verbose: Annotated[
        bool, typer.Option("--verbose", "-v", help="Log seesaw progress to stderr.")
    ] = False,
) -> None:
    """Prodnorm CLI.

    Global seesaw flags override the config file; the same flags on a
    command override both.
    """
    _configure_logging(verbose)
    with _guard():
        cfg = load_config(config) if config is not None else ProdnormConfig(
            limits=Limits.from_env()
        )
    overrides = {
        k: v
        for k, v in {
            "seed": seed,
            "restarts": restarts,
            "tol": tol,
            "max_iters": max_iters,
            "workers": workers,
        }.items()
        if v is not None
    }
    ctx.obj = CliState(json=json_out, csv=csv_out, config=cfg, overrides=overrides)


@app.command("healthcheck")
def healthcheck(
    verbose: Annotated[
        bool, typer.Option("--verbose", "-v", help="Show environment details")
    ] = False,
) -> None:
    """Report CLI readiness with optional environment details."""
    try:
        from jinja2 import __version__ as jinja_ver
        from numpy import __version__ as numpy_ver
        from pydantic import __version__ as pydantic_ver
        from typer import __version__ as typer_ver

        if verbose:
            console.print(f"python: {sys.version.split()[0]} | prodnorm: {__version__}")
            console.print(
                f"numpy: {numpy_ver} | jinja2: {jinja_ver} | pydantic: {pydantic_ver}"
                f" | typer: {typer_ver}"
            )
        console.print(f"[green]{MSG_HEALTH_OK}[/green]")
    except Exception as e:
        console.print(f"[red]{MSG_HEALTH_ERR.format(err=e)}[/red]")
        raise typer.Exit(code=EXIT_VALIDATION)


@app.command("init-config")
def init_config(
    path: Annotated[
        Path, typer.Option("--path", "-p", help="Where to write the config file.")
    ] = Path("prodnorm.yaml"),
    force: Annotated[
        bool, typer.Option("--force", "-f", help="Overwrite existing files.")
    ] = False,
) -> None:
    """Create a starter prodnorm.yaml."""
    if path.exists() and not force:
        console.print(f"[yellow]{MSG_CONFIG_EXISTS.format(path=path)}[/yellow]")
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    sample = (ir_files(SAMPLE_PACKAGE) / SAMPLE_YAML_FILENAME).read_text(encoding="utf-8")
    path.write_text(sample, encoding="utf-8")
    console.print(
        Panel.fit(f"[bold green]{MSG_CONFIG_CREATED.format(path=path)}[/bold green]")
    )


# -- norm ------------------------------------------------------------------


@norm_app.command("trace")
def norm_trace(
    ctx: typer.Context,
    matrix: Annotated[Path, typer.Option("--matrix", help="Matrix JSON file.")],
) -> None:
    """Trace norm (sum of singular values)."""
    state = _state(ctx)
    with _guard():
        value = trace_norm(load_matrix(matrix))
    _emit(state, {"value": value}, "trace norm")


@norm_app.command("product")
def norm_product(
    ctx: typer.Context,
    matrix: Annotated[Path, typer.Option("--matrix", help="Matrix JSON file.")],
    d1: D1Opt,
    d2: D2Opt,
    restarts: RestartsOpt = None,
    tol: TolOpt = None,
    seed: SeedOpt = None,
    max_iters: MaxItersOpt = None,
    certificate: Annotated[
        bool, typer.Option("--certificate", help="Include the certifying unitaries.")
    ] = False,
) -> None:
    """Seesaw lower bound on the product norm, with sandwich bounds."""
    state = _state(ctx)
    opts = state.seesaw(restarts=restarts, tol=tol, seed=seed, max_iters=max_iters)
    with _guard():
        a = load_matrix(matrix)
        part = Bipartition(d1, d2)
        cert = product_norm_lb(a, part, opts)
        lower, upper = sandwich_bounds(a, part)
    payload: dict[str, Any] = {
        "value": cert.value,
        "lower": lower,
        "upper": upper,
        "converged": cert.converged,
        "iterations": cert.iterations,
        "restartIndex": cert.restart_index,
    }
    if certificate:
        payload["certificate"] = {
            "u1": dump(MatrixPayload.from_array(cert.u1)),
            "u2": dump(MatrixPayload.from_array(cert.u2)),
        }
    _emit(state, payload, "product norm")


@norm_app.command("rank1")
def norm_rank1(
    ctx: typer.Context,
    u: Annotated[Path, typer.Option("--u", help="Vector JSON file (r×1 matrix).")],
    v: Annotated[Path, typer.Option("--v", help="Vector JSON file (r×1 matrix).")],
    d1: D1Opt,
    d2: D2Opt,
) -> None:
    """Closed-form product norm of |u⟩⟨v|."""
    state = _state(ctx)
    with _guard():
        value = product_norm_rank1(load_matrix(u), load_matrix(v), Bipartition(d1, d2))
    _emit(state, {"value": value}, "rank-one product norm")


# -- sop -------------------------------------------------------------------


def _sop_payload(cert: Any) -> dict[str, Any]:
    return {
        "value": cert.value,
        "converged": cert.converged,
        "iterations": cert.iterations,
        "restartIndex": cert.restart_index,
    }


def _sop_command(
    ctx: typer.Context,
    path: Path,
    title: str,
    run: Callable[[Any, SeesawOptions, Limits], Any],
    **flags: Any,
) -> None:
    state = _state(ctx)
    opts = state.seesaw(**flags)
    with _guard():
        cert = run(load_superoperator(path), opts, state.limits)
    _emit(state, _sop_payload(cert), title)


@sop_app.command("l1")
def sop_l1(
    ctx: typer.Context,
    sop: SopOpt,
    restarts: RestartsOpt = None,
    tol: TolOpt = None,
    seed: SeedOpt = None,
    max_iters: MaxItersOpt = None,
) -> None:
    """Lower bound on the l1 norm."""
    _sop_command(
        ctx,
        sop,
        "l1 norm",
        lambda t, o, _: l1_norm_lb(t, o),
        restarts=restarts,
        tol=tol,
        seed=seed,
        max_iters=max_iters,
    )


@sop_app.command("diamond")
def sop_diamond(
    ctx: typer.Context,
    sop: SopOpt,
    restarts: RestartsOpt = None,
    tol: TolOpt = None,
    seed: SeedOpt = None,
    max_iters: MaxItersOpt = None,
) -> None:
    """Lower bound on the diamond norm."""
    _sop_command(
        ctx,
        sop,
        "diamond norm",
        diamond_lb,
        restarts=restarts,
        tol=tol,
        seed=seed,
        max_iters=max_iters,
    )


@sop_app.command("product")
def sop_product(
    ctx: typer.Context,
    sop: SopOpt,
    restarts: RestartsOpt = None,
    tol: TolOpt = None,
    seed: SeedOpt = None,
    max_iters: MaxItersOpt = None,
) -> None:
    """Lower bound on the superoperator product norm."""
    _sop_command(
        ctx,
        sop,
        "superoperator product norm",
        lambda t, o, _: sop_product_norm_lb(t, o),
        restarts=restarts,
        tol=tol,
        seed=seed,
        max_iters=max_iters,
    )


@sop_app.command("stability")
def sop_stability(
    ctx: typer.Context,
    sop: SopOpt,
    ns: Annotated[str, typer.Option("--ns", help="Ancilla sizes, e.g. 1,2,4.")] = "1,2",
    swap_start: Annotated[
        bool,
        typer.Option("--swap-start", help="Warm-start N = d1 with the swap witness."),
    ] = False,
    restarts: RestartsOpt = None,
    tol: TolOpt = None,
    seed: SeedOpt = None,
    max_iters: MaxItersOpt = None,
) -> None:
    """Product norms of T⊗I_N⊗I_N for each N."""
    state = _state(ctx)
    opts = state.seesaw(restarts=restarts, tol=tol, seed=seed, max_iters=max_iters)
    with _guard():
        try:
            sizes = [int(n) for n in ns.split(",") if n.strip()]
        except ValueError as e:
            raise InputError(ERR_INVALID_NS.format(ns=ns)) from e
        t = load_superoperator(sop)
        warm = {t.out_part.d1: [square_swap_witness(t.out_part)]} if swap_start else None
        report = stability_scan(t, sizes, opts, warm_starts=warm, limits=state.limits)
    payload = {
        "base": report.base_value,
        "entries": [{"n": e.n, "value": e.value} for e in report.entries],
    }
    if state.json:
        console.print_json(data=payload)
        return
    console.print(f"[bold]stability scan[/bold] (base {_fmt(report.base_value)})")
    for e in report.entries:
        console.print(f" N={e.n}: {_fmt(e.value)}", highlight=False)


# -- game ------------------------------------------------------------------


def _game_payload(report: Any) -> dict[str, Any]:
    return {
        "probability": report.probability,
        "normValue": report.norm_value,
        "converged": report.converged,
        "restartIndex": report.restart_index,
        "iterations": report.iterations,
    }


@game_app.command("value")
def game_value(
    ctx: typer.Context,
    spec: SpecOpt,
    dp1: Annotated[int, typer.Option("--dp1", min=1, help="Prover 1 ancilla size.")] = 1,
    dp2: Annotated[int, typer.Option("--dp2", min=1, help="Prover 2 ancilla size.")] = 1,
    start: Annotated[
        Path | None, typer.Option("--start", help="Warm-start strategy JSON.")
    ] = None,
    strategy_out: Annotated[
        Path | None, typer.Option("--strategy-out", help="Write the best strategy here.")
    ] = None,
    restarts: RestartsOpt = None,
    tol: TolOpt = None,
    seed: SeedOpt = None,
    max_iters: MaxItersOpt = None,
) -> None:
    """Seesaw lower bound on the maximum acceptance probability."""
    state = _state(ctx)
    opts = state.seesaw(restarts=restarts, tol=tol, seed=seed, max_iters=max_iters)
    with _guard():
        warm = load_strategy(start) if start is not None else None
        report = map_lb(load_spec(spec), dp1, dp2, opts, start=warm, limits=state.limits)
    if strategy_out is not None:
        write_json(strategy_out, StrategyPayload.from_strategy(report.strategy))
    _emit(state, _game_payload(report), "game value")


@game_app.command("eval")
def game_eval(
    ctx: typer.Context,
    spec: SpecOpt,
    strategy: Annotated[Path, typer.Option("--strategy", help="Strategy JSON file.")],
) -> None:
    """Acceptance probability of a given strategy."""
    state = _state(ctx)
    with _guard():
        value = acceptance_probability(load_spec(spec), load_strategy(strategy))
    _emit(state, {"probability": value}, "acceptance probability")


@game_app.command("classical")
def game_classical(
    ctx: typer.Context,
    game: Annotated[Path, typer.Option("--game", help="Classical game JSON file.")],
) -> None:
    """Exact classical value by brute force."""
    state = _state(ctx)
    with _guard():
        value = classical_value(load_game(game), state.limits)
    _emit(state, {"value": value}, "classical value")


def _builtin(name: str) -> str:
    key = name.lower().replace("-", "").replace("_", "")
    if key not in BUILTIN_GAMES:
        raise InputError(ERR_UNKNOWN_BUILTIN.format(name=name))
    return key


@game_app.command("builtin")
def game_builtin(
    ctx: typer.Context,
    name: Annotated[str, typer.Argument(help="chsh or magicsquare")],
    dp: Annotated[
        int | None,
        typer.Option("--dp", min=1, help="Ancilla size per prover for the seesaw."),
    ] = None,
    restarts: RestartsOpt = None,
    tol: TolOpt = None,
    seed: SeedOpt = None,
    max_iters: MaxItersOpt = None,
) -> None:
    """Classical value, reference strategy and (optionally) the entangled seesaw.

    CHSH runs the seesaw at dP = 2 by default; the magic square only when
    --dp is given, warm-started from the reference strategy when dP >= 4.
    """
    state = _state(ctx)
    opts = state.seesaw(restarts=restarts, tol=tol, seed=seed, max_iters=max_iters)
    with _guard():
        key = _builtin(name)
        spec = BUILTIN_SPECS[key]()
        reference = FIXTURES[BUILTIN_STRATEGY[key]]()
        payload: dict[str, Any] = {
            "game": key,
            "classical": classical_value(BUILTIN_GAMES[key](), state.limits),
            "reference": acceptance_probability(spec, reference),
        }
        if dp is None and key == "chsh":
            dp = 2
        if dp is not None:
            warm = None
            if dp >= reference.d_p1:
                warm = embed_strategy(reference, dp, dp)
            report = map_lb(spec, dp, dp, opts, start=warm, limits=state.limits)
            payload["dp"] = dp
            payload["entangled"] = report.probability
    _emit(state, payload, f"builtin {key}")


@game_app.command("export")
def game_export(
    ctx: typer.Context,
    name: Annotated[str, typer.Argument(help="chsh or magicsquare")],
    out: Annotated[Path, typer.Option("--out", "-o", help="Output directory.")],
    with_spec: Annotated[
        bool, typer.Option("--spec", help="Also write the (dense) verifier spec.")
    ] = False,
) -> None:
    """Write a built-in game and its reference strategies as JSON fixtures."""
    with _guard():
        key = _builtin(name)
        written = [out / f"{key}.game.json"]
        write_json(written[0], ClassicalGamePayload.from_game(BUILTIN_GAMES[key]()))
        for fixture, build in FIXTURES.items():
            if fixture.startswith(key):
                path = out / f"{fixture}.strategy.json"
                write_json(path, StrategyPayload.from_strategy(build()))
                written.append(path)
        if with_spec:
            path = out / f"{key}.spec.json"
            write_json(path, SpecPayload.from_spec(BUILTIN_SPECS[key]()))
            written.append(path)
    console.print(Panel.fit(f"[bold green]Wrote {len(written)} file(s) to {out}[/bold green]"))
    for p in written:
        console.print(f"  - {p}")


# -- repro -----------------------------------------------------------------


@app.command("repro")
def repro(
    ctx: typer.Context,
    case: Annotated[str, typer.Argument(help="'all' or a case id.")] = "all",
    report: Annotated[
        Path | None, typer.Option("--report", help="Write a markdown report here.")
    ] = None,
    timings: Annotated[
        bool, typer.Option("--timings", help="Include per-check runtimes.")
    ] = False,
) -> None:
    """Recompute the worked examples and check them against known values."""
    state = _state(ctx)
    opts = state.seesaw()
    with _guard():
        if case == "all":
            results = repro_all(opts.seed, opts, state.limits)
        else:
            results = run_case(case, opts, state.limits)
    if report is not None:
        report.parent.mkdir(parents=True, exist_ok=True)
        report.write_text(render_report(results, opts.seed, timings), encoding="utf-8")
        console_err.print(MSG_REPORT_WRITTEN.format(path=report))
    passed = sum(r.passed for r in results)
    if state.json:
        console.print_json(data={"seed": opts.seed, "results": as_records(results, timings)})
    elif state.csv:
        console.out(to_csv(results, timings), end="")
    else:
        table = Table("case", "check", "expected", "computed", "passed")
        for r in results:
            table.add_row(
                r.case_id,
                r.check,
                f"{r.comparison} {_fmt(r.expected)}",
                _fmt(r.computed),
                "[green]yes[/green]" if r.passed else "[red]NO[/red]",
            )
        console.print(table)
        console.print(Panel.fit(PANEL_REPRO.format(passed=passed, total=len(results))))
    if passed != len(results):
        with _guard():
            raise ReproFailure(ERR_REPRO_FAILED.format(failed=len(results) - passed))


def _raised_by(exc: BaseException, kind: type[BaseException]) -> bool:
    seen: BaseException | None = exc
    while seen is not None:
        if isinstance(seen, kind):
            return True
        seen = seen.__cause__ or seen.__context__
    return False


def run(argv: Sequence[str]) -> int:
    """Run the CLI on ``argv`` and return the exit code instead of exiting."""
    args = list(argv)
    if not args:
        console_err.print(MSG_USAGE)
        return EXIT_VALIDATION
    try:
        app(args=args, prog_name="prodnorm")
    except SystemExit as e:
        if e.code is None:
            return EXIT_OK
        code = e.code if isinstance(e.code, int) else EXIT_VALIDATION
        # usage errors also exit with 2; only a guarded ResourceError keeps it
        if code == EXIT_RESOURCE and not _raised_by(e, ResourceError):
            return EXIT_VALIDATION
        return code
    return EXIT_OK


def main() -> None:
    """Entrypoint for console script."""
    sys.exit(run(sys.argv[1:]))

