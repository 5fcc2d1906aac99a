"""
Batch verification: every (inequality, scenario) pair becomes one BoundReport.
"""
from __future__ import annotations
from concurrent.futures import ThreadPoolExecutor
from typing import Iterable, List, Optional, Sequence
from tqdm import tqdm
from ..common.config import settings
from ..common.errors import FracIneqError
from ..common.logging import logger
from ..common.schemas import BoundReport, RunSummary
from ..inequalities.catalog import InequalityId, eval_inequality
from ..inequalities.funclasses import Scenario


def error_report(id: InequalityId, s: Scenario, exc: BaseException, waive: bool = False) -> BoundReport:
    return BoundReport(
        id=InequalityId(id).value,
        scenario_digest=s.digest(),
        lhs=0.0,
        rhs=0.0,
        margin=0.0,
        quad_error=0.0,
        holds=None,
        waived=waive,
        error=f"{type(exc).__name__}: {exc}",
    )


def evaluate_scenario(ids: Sequence[InequalityId], s: Scenario, waive: bool = False) -> List[BoundReport]:
    reports = []
    for id in ids:
        try:
            report = eval_inequality(id, s, waive=waive)
        except (FracIneqError, ArithmeticError, ValueError) as exc:
            logger.debug(f"{InequalityId(id).value} failed on {s.digest()}: {exc}")
            report = error_report(id, s, exc, waive)
        else:
            if report.holds is False:
                logger.warning(f"{report.id} violated on {s.describe()}: lhs={report.lhs} rhs={report.rhs}")
        reports.append(report)
    return reports


def run_verification(
    ids: Iterable[InequalityId],
    scenarios: Sequence[Scenario],
    waive: bool = False,
    seed: int = 0,
    workers: Optional[int] = None,
    progress: bool = False,
) -> RunSummary:
    """Evaluate each id on each scenario, in scenario order then id order.

    Worker threads only change the schedule: results are collected with an
    order-preserving map, so the summary is identical for any worker count.
    """
    ids = [InequalityId(i) for i in ids]
    workers = workers or settings.WORKERS
    logger.info(f"verifying {len(ids)} inequalities on {len(scenarios)} scenarios (workers={workers})")

    def task(s: Scenario) -> List[BoundReport]:
        return evaluate_scenario(ids, s, waive)

    if workers > 1 and len(scenarios) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(tqdm(pool.map(task, scenarios), total=len(scenarios), disable=not progress, desc="verify"))
    else:
        chunks = [task(s) for s in tqdm(scenarios, disable=not progress, desc="verify")]

    reports = [r for chunk in chunks for r in chunk]
    summary = RunSummary.from_reports(reports, scenarios_run=len(scenarios), seed=seed, waived=waive)
    logger.info(f"verification done: {summary.violations} violations, {summary.errors} errors, min margin {summary.min_margin}")
    return summary


__all__ = ["run_verification", "evaluate_scenario", "error_report"]
