"""
Audit of printed corollary constants against the generic theorem coefficient
evaluated numerically for the corollary's h.
"""
from __future__ import annotations
import itertools
from typing import Iterable, List, Optional, Sequence
from ..common.config import settings
from ..common.errors import MissingParameterError
from ..common.logging import logger
from ..common.schemas import AuditReport, Classification, QuadConfig
from ..inequalities.catalog import COROLLARIES, CorollaryId, corollary_constant, corollary_oracle

# Oracle integrals are taken well below the classification tolerance.
AUDIT_QUAD_CFG = QuadConfig(abs_tol=1e-13, rel_tol=1e-12, max_subdivisions=4000)


def classify(printed: float, oracle: float, oracle_error: float = 0.0, converged: bool = True,
             rel_tol: float = settings.AUDIT_REL_TOL) -> Classification:
    tol = rel_tol * max(1.0, abs(oracle))
    if not converged or oracle_error >= tol:
        return "inconclusive"
    if abs(printed - oracle) <= tol:
        return "exact"
    return "looser_upper" if printed > oracle else "under_oracle"


def audit_one(id: CorollaryId, alpha: float, s: Optional[float] = None, p: Optional[float] = None,
              cfg: Optional[QuadConfig] = None) -> AuditReport:
    spec = COROLLARIES[CorollaryId(id)]
    printed = corollary_constant(spec.id, alpha, s, p)
    oracle = corollary_oracle(spec.id, alpha, s, p, cfg or AUDIT_QUAD_CFG)
    label = classify(printed, oracle.value, oracle.error, oracle.converged)
    notes = [f"oracle: {spec.theorem.value} coefficient with h={spec.h_case}"]
    if label == "inconclusive":
        notes.append("oracle error not below classification tolerance")
        logger.warning(f"{spec.id.value} at alpha={alpha} s={s} p={p} is inconclusive (oracle error {oracle.error})")
    return AuditReport(
        corollary=spec.id.value,
        alpha=alpha,
        s=s,
        p=p,
        printed_value=printed,
        oracle_value=oracle.value,
        oracle_error=oracle.error,
        classification=label,
        notes=notes,
    )


def audit_constants(
    ids: Iterable[CorollaryId],
    alpha_grid: Sequence[float],
    s_grid: Sequence[float] = (),
    p_grid: Sequence[float] = (),
    cfg: Optional[QuadConfig] = None,
) -> List[AuditReport]:
    """One report per corollary and grid point; s and p grids apply only where used."""
    reports: List[AuditReport] = []
    for cid in ids:
        spec = COROLLARIES[CorollaryId(cid)]
        s_values = list(s_grid) if spec.uses_s else [None]
        p_values = list(p_grid) if spec.uses_p else [None]
        if not s_values or not p_values:
            raise MissingParameterError(f"{spec.id.value} needs a non-empty {'s' if not s_values else 'p'} grid")
        for alpha, s, p in itertools.product(alpha_grid, s_values, p_values):
            reports.append(audit_one(spec.id, alpha, s, p, cfg))
    counts = {}
    for r in reports:
        counts[r.classification] = counts.get(r.classification, 0) + 1
    logger.info(f"audited {len(reports)} constants: {counts}")
    return reports


__all__ = ["audit_constants", "audit_one", "classify", "AUDIT_QUAD_CFG"]
