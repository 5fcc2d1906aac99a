"""
CLI for fractional Hermite–Hadamard verification: verify, audit, search, reduce.

Usage:
    python -m src.cli.fracineq verify --ineq T3.2 --f poly:0,0,1 --a 0 --b 1 --alpha 1 --h id
    python -m src.cli.fracineq audit --corollary C3.3 --alpha-grid 0.5:3:0.5
    python -m src.cli.fracineq search --ineq T3.19 --budget 200 --seed 7
    python -m src.cli.fracineq reduce --f exp:1 --a 0 --b 1

Option precedence: command-line flags > --config file > FRACINEQ_QUAD_TOL > defaults.
"""
from __future__ import annotations
import os
import sys
from pathlib import Path
from typing import Any, Dict, List, Literal, Mapping, Optional, Sequence, Tuple, Union
import click
import typer
from pydantic import BaseModel, ConfigDict, Field
from rich.console import Console
from rich.table import Table
from ..common.config import settings
from ..common.errors import DomainError, FracIneqError, UsageError
from ..common.logging import logger
from ..common.schemas import AuditReport, QuadConfig, ReductionReport, RunSummary
from ..inequalities.catalog import PROOF_FINAL_IDS, CorollaryId, InequalityId, reduction_check
from ..inequalities.funclasses import (
    Scenario,
    certify_scenario,
    make_map,
    parse_eta,
    parse_function_spec,
    parse_hclass,
)
from ..pipeline.audit import audit_constants
from ..pipeline.generate import GenerationConfig, generate_scenarios
from ..pipeline.reports import emit_report, write_atomic
from ..pipeline.search import SearchConfig, search_counterexamples
from ..pipeline.verify import run_verification

app = typer.Typer(help="Fractional Hermite–Hadamard inequality verification", add_completion=False)
console = Console(stderr=True)

REDUCTION_KINDS = ("alpha_one", "phi_zero", "both")
DEFAULT_AUDIT_ALPHAS = (0.5, 1.0, 2.0)
DEFAULT_AUDIT_S = (0.25, 0.5, 1.0)
DEFAULT_AUDIT_P = (1.5, 2.0, 3.0)


class RunPlan(BaseModel):
    """Fully resolved invocation; ``render_plan`` turns it back into argv."""
    model_config = ConfigDict(frozen=True)

    command: Literal["verify", "audit", "search", "reduce"]
    ineq: Tuple[str, ...] = ()
    corollary: Tuple[str, ...] = ()
    kinds: Tuple[str, ...] = ()
    f: Optional[str] = None
    h: str = "id"
    eta: str = "diff"
    lam: float = 1.0
    a: Optional[float] = None
    b: Optional[float] = None
    alpha: float = 1.0
    p: float = 2.0
    alpha_grid: Tuple[float, ...] = ()
    s_grid: Tuple[float, ...] = ()
    p_grid: Tuple[float, ...] = ()
    seed: int = 0
    n: int = 0
    budget: int = 0
    waive_certification: bool = False
    out: Optional[str] = None
    format: Literal["jsonl", "csv"] = "jsonl"
    quad_tol: float = Field(default_factory=lambda: settings.QUAD_ABS_TOL, gt=0.0)
    workers: int = 1


# ---------------------------------------------------------------------------
# argument helpers
# ---------------------------------------------------------------------------

def parse_grid(text: str) -> Tuple[float, ...]:
    """``lo:hi:step`` (inclusive) or a comma list."""
    text = text.strip()
    try:
        if ":" in text:
            lo, hi, step = (float(x) for x in text.split(":"))
            if step <= 0 or hi < lo:
                raise typer.BadParameter(f"grid {text!r} needs step > 0 and lo <= hi")
            count = int((hi - lo) / step + 1e-9) + 1
            return tuple(lo + i * step for i in range(count))
        values = tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise typer.BadParameter(f"cannot parse grid {text!r}")
    if not values:
        raise typer.BadParameter(f"empty grid {text!r}")
    return values


def _grid_text(values: Sequence[float]) -> str:
    return ",".join(repr(float(v)) for v in values)


def _check_grammar(f: Optional[str], h: str, eta: str) -> None:
    try:
        if f is not None:
            parse_function_spec(f)
        parse_hclass(h)
        parse_eta(eta)
    except DomainError as exc:
        raise typer.BadParameter(str(exc))


def _ineq_ids(values: Optional[Sequence[str]], default: Sequence[InequalityId]) -> Tuple[str, ...]:
    out = []
    for v in values or [i.value for i in default]:
        try:
            out.append(InequalityId(v).value)
        except ValueError:
            raise typer.BadParameter(f"unknown inequality id {v!r}", param_hint="--ineq")
    return tuple(out)


def _corollary_ids(values: Optional[Sequence[str]]) -> Tuple[str, ...]:
    if not values or list(values) == ["all"]:
        return tuple(c.value for c in CorollaryId)
    out = []
    for v in values:
        try:
            out.append(CorollaryId(v).value)
        except ValueError:
            raise typer.BadParameter(f"unknown corollary id {v!r}", param_hint="--corollary")
    return tuple(out)


def _check_ranges(alpha: float, lam: float, p: float) -> None:
    if not alpha > 0:
        raise typer.BadParameter(f"--alpha must be > 0, got {alpha}")
    if not 0 < lam <= 1:
        raise typer.BadParameter(f"--lambda must lie in (0, 1], got {lam}")
    if not p > 1:
        raise typer.BadParameter(f"--p must be > 1, got {p}")


def _option_keys(command: click.Command) -> Dict[str, str]:
    """Config-file key -> parameter name, derived from every long flag of a command."""
    keys = {}
    for param in command.params:
        keys[param.name] = param.name
        for opt in getattr(param, "opts", []):
            if opt.startswith("--"):
                keys[opt[2:].replace("-", "_")] = param.name
    return keys


def read_config_file(path: Union[str, Path]) -> Dict[str, str]:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    values: Dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise UsageError(f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


_MULTI = {"ineq", "corollary", "kinds"}


def config_defaults(ctx: click.Context, values: Mapping[str, str]) -> Dict[str, Any]:
    """Map raw config values onto the parameters of the command being invoked."""
    own = _option_keys(ctx.command)
    known = set(own)
    group = ctx.parent.command if ctx.parent is not None else None
    for cmd in getattr(group, "commands", {}).values():
        known |= set(_option_keys(cmd))
    defaults: Dict[str, Any] = {}
    for key, value in values.items():
        if key not in known:
            raise typer.BadParameter(f"unknown config key {key!r}", param_hint="--config")
        if key in own:
            name = own[key]
            defaults[name] = [v.strip() for v in value.split(",") if v.strip()] if name in _MULTI else value
    return defaults


def _load_config(ctx: typer.Context, value: Optional[str]) -> Optional[str]:
    if value:
        try:
            values = read_config_file(value)
        except UsageError as exc:
            raise typer.BadParameter(str(exc), param_hint="--config")
        ctx.default_map = {**(ctx.default_map or {}), **config_defaults(ctx, values)}
    return value


def _finish(ctx: typer.Context, plan: RunPlan) -> RunPlan:
    if ctx.obj and ctx.obj.get("plan_only"):
        return plan
    raise typer.Exit(execute_plan(plan))


ConfigOption = typer.Option(None, "--config", help="key = value defaults file", is_eager=True, callback=_load_config)
OutOption = typer.Option(None, "--out", help="Report path (stdout when omitted)")
FormatOption = typer.Option("jsonl", "--format", help="jsonl or csv")
QuadTolOption = typer.Option(None, "--quad-tol", help="Absolute quadrature tolerance")


def _fmt_choice(fmt: str) -> str:
    if fmt not in ("jsonl", "csv"):
        raise typer.BadParameter(f"unknown format {fmt!r}", param_hint="--format")
    return fmt


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

@app.command("verify")
def verify(
    ctx: typer.Context,
    ineq: Optional[List[str]] = typer.Option(None, "--ineq", help="Inequality id, repeatable (default: all six)"),
    f: Optional[str] = typer.Option(None, "--f", help="poly:c0,c1,... | exp:k | powabs:k (default: generated suite)"),
    h: str = typer.Option("id", "--h", help="id | pow:s | one | tab:t=v,..."),
    eta: str = typer.Option("diff", "--eta", help="diff | affine:c"),
    lam: float = typer.Option(1.0, "--lambda", help="Real stand-in for e^{i phi}, in (0, 1]"),
    a: Optional[float] = typer.Option(None, "--a"),
    b: Optional[float] = typer.Option(None, "--b"),
    alpha: float = typer.Option(1.0, "--alpha"),
    p: float = typer.Option(2.0, "--p", help="Hölder exponent > 1"),
    seed: int = typer.Option(settings.SEED, "--seed"),
    n: int = typer.Option(100, "--n", help="Generated scenarios when --f is omitted"),
    waive_certification: bool = typer.Option(False, "--waive-certification"),
    out: Optional[str] = OutOption,
    fmt: str = FormatOption,
    quad_tol: Optional[float] = QuadTolOption,
    workers: int = typer.Option(settings.WORKERS, "--workers"),
    config: Optional[str] = ConfigOption,
):
    """Evaluate inequalities on one scenario or on the generated suite."""
    _check_grammar(f, h, eta)
    _check_ranges(alpha, lam, p)
    if f is not None and (a is None or b is None):
        raise typer.BadParameter("--f needs both --a and --b")
    if n < 1 or workers < 1:
        raise typer.BadParameter("--n and --workers must be >= 1")
    plan = RunPlan(
        command="verify", ineq=_ineq_ids(ineq, PROOF_FINAL_IDS), f=f, h=h, eta=eta, lam=lam, a=a, b=b,
        alpha=alpha, p=p, seed=seed, n=n, waive_certification=waive_certification, out=out,
        format=_fmt_choice(fmt), quad_tol=quad_tol or settings.QUAD_ABS_TOL, workers=workers,
    )
    return _finish(ctx, plan)


@app.command("audit")
def audit(
    ctx: typer.Context,
    corollary: Optional[List[str]] = typer.Option(None, "--corollary", help="Corollary id, repeatable (default: all)"),
    alpha_grid: str = typer.Option(_grid_text(DEFAULT_AUDIT_ALPHAS), "--alpha-grid", help="lo:hi:step or a,b,c"),
    s_grid: str = typer.Option(_grid_text(DEFAULT_AUDIT_S), "--s", help="s values for the t^s cases"),
    p_grid: str = typer.Option(_grid_text(DEFAULT_AUDIT_P), "--p", help="p values for the Hölder and power-mean cases"),
    out: Optional[str] = OutOption,
    fmt: str = FormatOption,
    config: Optional[str] = ConfigOption,
):
    """Compare printed corollary constants with their numeric oracles."""
    alphas, ss, ps = parse_grid(alpha_grid), parse_grid(s_grid), parse_grid(p_grid)
    if any(x <= 0 for x in alphas):
        raise typer.BadParameter("alpha grid values must be > 0", param_hint="--alpha-grid")
    if any(not 0 < x <= 1 for x in ss):
        raise typer.BadParameter("s values must lie in (0, 1]", param_hint="--s")
    if any(x <= 1 for x in ps):
        raise typer.BadParameter("p values must be > 1", param_hint="--p")
    plan = RunPlan(
        command="audit", corollary=_corollary_ids(corollary), alpha_grid=alphas, s_grid=ss, p_grid=ps,
        out=out, format=_fmt_choice(fmt),
    )
    return _finish(ctx, plan)


@app.command("search")
def search(
    ctx: typer.Context,
    ineq: Optional[List[str]] = typer.Option(None, "--ineq", help="Inequality id, repeatable (default: T3.2)"),
    budget: int = typer.Option(200, "--budget", help="Evaluations per inequality"),
    seed: int = typer.Option(settings.SEED, "--seed"),
    waive_certification: bool = typer.Option(False, "--waive-certification"),
    out: Optional[str] = OutOption,
    fmt: str = FormatOption,
    quad_tol: Optional[float] = QuadTolOption,
    config: Optional[str] = ConfigOption,
):
    """Randomized search for small or negative margins."""
    if budget < 1:
        raise typer.BadParameter("--budget must be >= 1")
    plan = RunPlan(
        command="search", ineq=_ineq_ids(ineq, (InequalityId.T3_2,)), budget=budget, seed=seed,
        waive_certification=waive_certification, out=out, format=_fmt_choice(fmt),
        quad_tol=quad_tol or settings.QUAD_ABS_TOL,
    )
    return _finish(ctx, plan)


@app.command("reduce")
def reduce(
    ctx: typer.Context,
    kinds: Optional[List[str]] = typer.Option(None, "--kind", help="alpha_one | phi_zero | both, repeatable"),
    f: str = typer.Option("poly:0,0,1", "--f"),
    h: str = typer.Option("id", "--h"),
    eta: str = typer.Option("diff", "--eta"),
    lam: float = typer.Option(1.0, "--lambda"),
    a: float = typer.Option(0.0, "--a"),
    b: float = typer.Option(1.0, "--b"),
    alpha: float = typer.Option(1.0, "--alpha"),
    p: float = typer.Option(2.0, "--p"),
    out: Optional[str] = OutOption,
    fmt: str = FormatOption,
    quad_tol: Optional[float] = QuadTolOption,
    config: Optional[str] = ConfigOption,
):
    """Check the alpha = 1 and phi = 0 specializations on one scenario."""
    _check_grammar(f, h, eta)
    _check_ranges(alpha, lam, p)
    chosen = tuple(kinds or REDUCTION_KINDS)
    for k in chosen:
        if k not in REDUCTION_KINDS:
            raise typer.BadParameter(f"unknown reduction kind {k!r}", param_hint="--kind")
    plan = RunPlan(
        command="reduce", kinds=chosen, f=f, h=h, eta=eta, lam=lam, a=a, b=b, alpha=alpha, p=p,
        out=out, format=_fmt_choice(fmt), quad_tol=quad_tol or settings.QUAD_ABS_TOL,
    )
    return _finish(ctx, plan)


# ---------------------------------------------------------------------------
# plan <-> argv
# ---------------------------------------------------------------------------

def parse_args(argv: Sequence[str], env: Optional[Mapping[str, str]] = None,
               config_file: Optional[Union[str, Path]] = None) -> RunPlan:
    """Resolve argv into a RunPlan without executing it."""
    argv = list(argv)
    env = os.environ if env is None else env
    group = typer.main.get_command(app)
    if not argv or argv[0] not in getattr(group, "commands", {}):
        raise UsageError(f"expected one of {sorted(group.commands)}, got {argv[0] if argv else 'nothing'!r}")
    name = argv[0]
    defaults: Dict[str, Any] = {}
    if env.get("FRACINEQ_QUAD_TOL") and "quad_tol" in _option_keys(group.commands[name]):
        defaults["quad_tol"] = env["FRACINEQ_QUAD_TOL"]
    if config_file is not None:
        ctx = click.Context(group.commands[name], parent=click.Context(group))
        try:
            defaults.update(config_defaults(ctx, read_config_file(config_file)))
        except click.ClickException as exc:
            raise UsageError(exc.format_message()) from exc
    try:
        result = group.main(
            args=argv,
            prog_name="fracineq",
            standalone_mode=False,
            default_map={name: defaults},
            obj={"plan_only": True},
        )
    except click.exceptions.ClickException as exc:
        raise UsageError(exc.format_message()) from exc
    except click.exceptions.Abort as exc:
        raise UsageError("aborted") from exc
    if not isinstance(result, RunPlan):
        raise UsageError("no plan produced")
    return result


def render_plan(plan: RunPlan) -> List[str]:
    """argv that parse_args maps back onto an equal plan."""
    args: List[str] = [plan.command]

    def flag(on: bool, name: str) -> List[str]:
        return [f"--{name}" if on else f"--no-{name}"]

    if plan.command == "verify":
        for i in plan.ineq:
            args += ["--ineq", i]
        if plan.f is not None:
            args += ["--f", plan.f]
        args += ["--h", plan.h, "--eta", plan.eta, "--lambda", repr(plan.lam)]
        if plan.a is not None:
            args += ["--a", repr(plan.a)]
        if plan.b is not None:
            args += ["--b", repr(plan.b)]
        args += ["--alpha", repr(plan.alpha), "--p", repr(plan.p), "--seed", str(plan.seed), "--n", str(plan.n)]
        args += flag(plan.waive_certification, "waive-certification")
        args += ["--quad-tol", repr(plan.quad_tol), "--workers", str(plan.workers)]
    elif plan.command == "audit":
        for c in plan.corollary:
            args += ["--corollary", c]
        args += ["--alpha-grid", _grid_text(plan.alpha_grid), "--s", _grid_text(plan.s_grid),
                 "--p", _grid_text(plan.p_grid)]
    elif plan.command == "search":
        for i in plan.ineq:
            args += ["--ineq", i]
        args += ["--budget", str(plan.budget), "--seed", str(plan.seed)]
        args += flag(plan.waive_certification, "waive-certification")
        args += ["--quad-tol", repr(plan.quad_tol)]
    else:
        for k in plan.kinds:
            args += ["--kind", k]
        args += ["--f", plan.f or "poly:0,0,1", "--h", plan.h, "--eta", plan.eta, "--lambda", repr(plan.lam),
                 "--a", repr(plan.a), "--b", repr(plan.b), "--alpha", repr(plan.alpha), "--p", repr(plan.p),
                 "--quad-tol", repr(plan.quad_tol)]
    if plan.out is not None:
        args += ["--out", plan.out]
    args += ["--format", plan.format]
    return args


# ---------------------------------------------------------------------------
# execution
# ---------------------------------------------------------------------------

Payload = Union[RunSummary, List[AuditReport], List[ReductionReport]]


def exit_code_for(payload: Payload) -> int:
    """2 on violations, under_oracle or inconsistent reductions; 1 on error entries."""
    if isinstance(payload, RunSummary):
        if payload.violations:
            return 2
        return 1 if payload.errors else 0
    items = list(payload)
    if any(isinstance(x, AuditReport) and x.classification == "under_oracle" for x in items):
        return 2
    if any(isinstance(x, ReductionReport) and x.inconsistent for x in items):
        return 2
    return 0


def _scenario(plan: RunPlan, cfg: QuadConfig) -> Scenario:
    return Scenario(
        f=parse_function_spec(plan.f),
        a=plan.a,
        b=plan.b,
        alpha=plan.alpha,
        p=plan.p,
        h=parse_hclass(plan.h),
        map=make_map(plan.eta, plan.lam),
        quad_cfg=cfg,
    )


def _run_verify(plan: RunPlan, cfg: QuadConfig) -> RunSummary:
    ids = [InequalityId(i) for i in plan.ineq]
    if plan.f is not None:
        scenarios = [certify_scenario(_scenario(plan, cfg))]
    else:
        gen = GenerationConfig(ids=tuple(ids), quad_cfg=cfg)
        if plan.waive_certification:
            gen = gen.waived()
        scenarios = generate_scenarios(gen, plan.seed, plan.n)
    return run_verification(ids, scenarios, waive=plan.waive_certification, seed=plan.seed,
                            workers=plan.workers, progress=len(scenarios) > 1)


def _run_search(plan: RunPlan, cfg: QuadConfig) -> RunSummary:
    reports, notes, runs = [], [], 0
    for i in plan.ineq:
        conf = SearchConfig(budget=plan.budget, seed=plan.seed, generation=GenerationConfig(quad_cfg=cfg))
        summary = search_counterexamples(InequalityId(i), conf, waive_certification=plan.waive_certification)
        reports.extend(summary.reports)
        notes.extend(f"{i}: {note}" for note in summary.notes)
        runs += summary.scenarios_run
    return RunSummary.from_reports(reports, scenarios_run=runs, seed=plan.seed,
                                   waived=plan.waive_certification, notes=notes)


def display_summary(payload: Payload) -> None:
    if isinstance(payload, RunSummary):
        table = Table(title="Verification")
        for col in ("scenarios", "reports", "violations", "errors", "min margin", "waived"):
            table.add_column(col)
        table.add_row(str(payload.scenarios_run), str(len(payload.reports)), str(payload.violations),
                      str(payload.errors), f"{payload.min_margin:.6g}", str(payload.waived))
        console.print(table)
        for note in payload.notes:
            console.print(f"[dim]{note}[/dim]")
        return
    items = list(payload)
    if items and isinstance(items[0], ReductionReport):
        table = Table(title="Reductions")
        for col in ("kind", "check", "generic", "closed form", "discrepancy", "within"):
            table.add_column(col)
        for red in items:
            for e in red.entries:
                table.add_row(red.kind, e.label, f"{e.generic:.10g}", f"{e.closed_form:.10g}",
                              f"{e.discrepancy:.3e}", "[green]yes[/green]" if e.within else "[red]no[/red]")
        console.print(table)
        return
    table = Table(title="Corollary audit")
    for col in ("corollary", "alpha", "s", "p", "printed", "oracle", "class"):
        table.add_column(col)
    for r in items:
        table.add_row(r.corollary, f"{r.alpha:g}", "" if r.s is None else f"{r.s:g}",
                      "" if r.p is None else f"{r.p:g}", f"{r.printed_value:.10g}", f"{r.oracle_value:.10g}",
                      r.classification)
    console.print(table)
    inconclusive = sum(1 for r in items if r.classification == "inconclusive")
    if inconclusive:
        console.print(f"[yellow]warning: {inconclusive} inconclusive audit entries[/yellow]")


def execute_plan(plan: RunPlan) -> int:
    cfg = QuadConfig(abs_tol=plan.quad_tol)
    try:
        if plan.command == "verify":
            payload: Payload = _run_verify(plan, cfg)
        elif plan.command == "audit":
            payload = audit_constants([CorollaryId(c) for c in plan.corollary], plan.alpha_grid,
                                      plan.s_grid, plan.p_grid)
        elif plan.command == "search":
            payload = _run_search(plan, cfg)
        else:
            s = _scenario(plan, cfg)
            payload = [reduction_check(k, s) for k in plan.kinds]
    except (FracIneqError, ValueError, ArithmeticError) as exc:
        logger.error(f"{plan.command} failed: {exc}")
        console.print(f"[red]Error:[/red] {exc}")
        return 1

    display_summary(payload)
    data = emit_report(payload, plan.format)
    if plan.out:
        try:
            path = write_atomic(plan.out, data)
        except OSError as exc:
            console.print(f"[red]Error writing {plan.out}: {exc}[/red]")
            return 1
        console.print(f"[green]Saved report to {path}[/green]")
    else:
        sys.stdout.write(data.decode("utf-8"))
        sys.stdout.flush()
    return exit_code_for(payload)


def main(argv: Optional[Sequence[str]] = None, env: Optional[Mapping[str, str]] = None) -> int:
    try:
        plan = parse_args(sys.argv[1:] if argv is None else argv, env)
    except UsageError as exc:
        console.print(f"[red]Usage error:[/red] {exc}")
        return 1
    return execute_plan(plan)


if __name__ == "__main__":
    sys.exit(main())
