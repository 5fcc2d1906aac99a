"""
Randomized counterexample search: coordinate-wise perturbation with restarts,
driving the relative margin (rhs - lhs)/max(1, |rhs|) down.
"""
from __future__ import annotations
import math
from typing import List, Optional, Tuple
import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from ..common.errors import FracIneqError
from ..common.logging import logger
from ..common.schemas import BoundReport, RunSummary
from ..inequalities.catalog import InequalityId, eval_inequality
from ..inequalities.funclasses import Scenario
from .generate import GenerationConfig, accept, draw_candidate, scenario_rng
from .verify import error_report

_COORDINATES = ("alpha", "a", "width", "lam", "p")


class SearchConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    budget: int = Field(200, ge=1, description="Maximum number of inequality evaluations")
    seed: int = 0
    perturbation_scale: float = Field(0.25, gt=0.0)
    restart_every: int = Field(20, ge=1)
    generation: GenerationConfig = Field(default_factory=GenerationConfig)


def relative_margin(report: BoundReport) -> float:
    if report.holds is None:
        return math.inf
    return report.margin / max(1.0, abs(report.rhs))


def perturb(s: Scenario, rng: np.random.Generator, scale: float) -> Optional[Scenario]:
    coord = _COORDINATES[int(rng.integers(len(_COORDINATES)))]
    step = scale * float(rng.standard_normal())
    alpha, a, width, lam, p = s.alpha, s.a, s.b - s.a, s.map.lam, s.p
    if coord == "alpha":
        alpha = float(np.clip(alpha * math.exp(step), 0.05, 5.0))
    elif coord == "a":
        a = max(0.0, a + step * width)
    elif coord == "width":
        width = float(np.clip(width * math.exp(step), 0.05, 4.0))
    elif coord == "lam":
        lam = float(np.clip(lam * math.exp(step), 0.05, 1.0))
    else:
        p = float(np.clip(1.0 + (p - 1.0) * math.exp(step), 1.05, 8.0))
    try:
        return Scenario(
            f=s.f,
            a=a,
            b=a + width,
            alpha=alpha,
            p=p,
            h=s.h,
            map=s.map.model_copy(update={"lam": lam}),
            quad_cfg=s.quad_cfg,
        )
    except ValueError:
        return None


def _evaluate(id: InequalityId, s: Scenario, waive: bool) -> BoundReport:
    try:
        return eval_inequality(id, s, waive=waive)
    except (FracIneqError, ArithmeticError, ValueError) as exc:
        return error_report(id, s, exc, waive)


def _start(gen: GenerationConfig, rng: np.random.Generator) -> Optional[Scenario]:
    for _ in range(gen.max_retries):
        candidate = draw_candidate(gen, rng)
        if candidate is None:
            continue
        candidate, ok = accept(gen, candidate)
        if ok:
            return candidate
    return None


def search_counterexamples(id: InequalityId, config: SearchConfig, waive_certification: bool = False) -> RunSummary:
    """Every evaluated scenario contributes its report; the notes name the
    scenario with the smallest relative margin."""
    id = InequalityId(id)
    gen = config.generation.model_copy(update={"ids": (id,)})
    if waive_certification:
        gen = gen.waived()

    reports: List[BoundReport] = []
    best: Tuple[float, Optional[Scenario]] = (math.inf, None)
    evaluations = 0
    restart = 0
    while evaluations < config.budget:
        rng = scenario_rng(config.seed, restart)
        restart += 1
        current = _start(gen, rng)
        if current is None:
            evaluations += 1
            logger.warning(f"search restart {restart} found no admissible start")
            continue
        current_report = _evaluate(id, current, waive_certification)
        reports.append(current_report)
        evaluations += 1
        if relative_margin(current_report) < best[0]:
            best = (relative_margin(current_report), current)

        for _ in range(config.restart_every):
            if evaluations >= config.budget:
                break
            candidate = perturb(current, rng, config.perturbation_scale)
            if candidate is None:
                continue
            candidate, ok = accept(gen, candidate)
            if not ok:
                continue
            report = _evaluate(id, candidate, waive_certification)
            reports.append(report)
            evaluations += 1
            if relative_margin(report) < relative_margin(current_report):
                current, current_report = candidate, report
                if relative_margin(report) < best[0]:
                    best = (relative_margin(report), candidate)

    notes = []
    if best[1] is not None:
        notes.append(f"min relative margin {best[0]!r} at {best[1].digest()}: {best[1].describe()}")
    if waive_certification:
        notes.append("certification waived: violations on non-preinvex inputs are expected")
    summary = RunSummary.from_reports(reports, scenarios_run=len(reports), seed=config.seed,
                                      waived=waive_certification, notes=notes)
    logger.info(f"search {id.value}: {len(reports)} evaluations, {summary.violations} violations, "
                f"min relative margin {best[0]}")
    return summary


__all__ = ["SearchConfig", "search_counterexamples", "perturb", "relative_margin"]
