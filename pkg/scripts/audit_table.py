"""Audit all eighteen printed corollary constants and print the classification table.

    python scripts/audit_table.py --format csv --out artifacts/audit.csv
"""
from __future__ import annotations
import sys
from pathlib import Path
from typing import Optional

PROJECT_ROOT = Path(__file__).resolve().parents[0].parent
sys.path.insert(0, str(PROJECT_ROOT))
import typer  # noqa: E402
from src.cli.fracineq import DEFAULT_AUDIT_ALPHAS, DEFAULT_AUDIT_P, DEFAULT_AUDIT_S, RunPlan, execute_plan  # noqa: E402
from src.inequalities.catalog import CorollaryId  # noqa: E402


def main(
    out: Optional[str] = typer.Option(None, "--out"),
    fmt: str = typer.Option("jsonl", "--format"),
):
    plan = RunPlan(command="audit", corollary=tuple(c.value for c in CorollaryId),
                   alpha_grid=DEFAULT_AUDIT_ALPHAS, s_grid=DEFAULT_AUDIT_S, p_grid=DEFAULT_AUDIT_P,
                   out=out, format=fmt)
    raise typer.Exit(execute_plan(plan))


if __name__ == "__main__":
    typer.run(main)
