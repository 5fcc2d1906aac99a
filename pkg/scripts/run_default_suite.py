"""Run the certified default suite (all six proof-final bounds) and write JSON-lines.

Two runs with the same seed produce byte-identical files.

    python scripts/run_default_suite.py --seed 42 --n 100 --out artifacts/default_suite.jsonl
"""
from __future__ import annotations
import sys
from pathlib import Path

PROJECT_ROOT = Path(__file__).resolve().parents[0].parent
sys.path.insert(0, str(PROJECT_ROOT))
import typer  # noqa: E402
from src.cli.fracineq import RunPlan, execute_plan  # noqa: E402
from src.common.config import settings  # noqa: E402
from src.inequalities.catalog import PROOF_FINAL_IDS  # noqa: E402


def main(
    seed: int = typer.Option(settings.SEED, "--seed"),
    n: int = typer.Option(100, "--n"),
    out: str = typer.Option("artifacts/default_suite.jsonl", "--out"),
    workers: int = typer.Option(settings.WORKERS, "--workers"),
):
    plan = RunPlan(command="verify", ineq=tuple(i.value for i in PROOF_FINAL_IDS), seed=seed, n=n,
                   out=out, workers=workers)
    raise typer.Exit(execute_plan(plan))


if __name__ == "__main__":
    typer.run(main)
