"""
JSON-lines and CSV rendering of verification, audit and reduction results.

Key order is fixed per record kind; floats are written as the shortest decimal
that round-trips (orjson for JSON, repr for CSV).
"""
from __future__ import annotations
import csv
import io
import os
import tempfile
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Sequence, Union
import orjson
from ..common.schemas import AuditReport, ReductionReport, RunSummary

ReportFormat = Literal["jsonl", "csv"]

BOUND_FIELDS = ("id", "scenario_digest", "lhs", "rhs", "margin", "quad_error", "holds", "seed", "waived", "error")
AUDIT_FIELDS = ("id", "alpha", "s", "p", "printed_value", "oracle_value", "oracle_error", "classification", "seed")
REDUCTION_FIELDS = ("kind", "scenario_digest", "label", "generic", "closed_form", "discrepancy", "tolerance",
                    "within", "inconsistent")

Reportable = Union[RunSummary, Sequence[AuditReport], Sequence[ReductionReport]]


def _bound_rows(summary: RunSummary) -> List[Dict[str, Any]]:
    return [
        {
            "id": r.id,
            "scenario_digest": r.scenario_digest,
            "lhs": r.lhs,
            "rhs": r.rhs,
            "margin": r.margin,
            "quad_error": r.quad_error,
            "holds": r.holds,
            "seed": summary.seed,
            "waived": r.waived,
            "error": r.error,
        }
        for r in summary.reports
    ]


def _audit_rows(audits: Sequence[AuditReport], seed: Optional[int]) -> List[Dict[str, Any]]:
    return [
        {
            "id": a.corollary,
            "alpha": a.alpha,
            "s": a.s,
            "p": a.p,
            "printed_value": a.printed_value,
            "oracle_value": a.oracle_value,
            "oracle_error": a.oracle_error,
            "classification": a.classification,
            "seed": seed,
        }
        for a in audits
    ]


def _reduction_rows(reductions: Sequence[ReductionReport]) -> List[Dict[str, Any]]:
    rows = []
    for red in reductions:
        for e in red.entries:
            rows.append({
                "kind": red.kind,
                "scenario_digest": red.scenario_digest,
                "label": e.label,
                "generic": e.generic,
                "closed_form": e.closed_form,
                "discrepancy": e.discrepancy,
                "tolerance": e.tolerance,
                "within": e.within,
                "inconsistent": red.inconsistent,
            })
    return rows


def to_rows(payload: Reportable, seed: Optional[int] = None):
    if isinstance(payload, RunSummary):
        return BOUND_FIELDS, _bound_rows(payload)
    items = list(payload)
    if items and isinstance(items[0], ReductionReport):
        return REDUCTION_FIELDS, _reduction_rows(items)
    return AUDIT_FIELDS, _audit_rows(items, seed)


def _csv_cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def emit_report(payload: Reportable, format: ReportFormat = "jsonl", seed: Optional[int] = None) -> bytes:
    """Render payload; seed stamps audit rows, bound rows carry the summary's own."""
    fields, rows = to_rows(payload, seed)
    if format == "jsonl":
        return b"".join(orjson.dumps(row) + b"\n" for row in rows)
    if format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(fields)
        for row in rows:
            writer.writerow([_csv_cell(row[k]) for k in fields])
        return buf.getvalue().encode("utf-8")
    raise ValueError(f"unknown report format {format!r}")


def write_atomic(path: Union[str, Path], data: bytes) -> Path:
    """Write data next to path under a temporary name, then rename over it."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=str(path.parent))
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


__all__ = ["emit_report", "write_atomic", "to_rows", "BOUND_FIELDS", "AUDIT_FIELDS", "REDUCTION_FIELDS"]
