"""
Pydantic records shared by the numerics, inequality and pipeline layers.
"""
from __future__ import annotations
import math
from typing import List, Literal, Optional, Tuple
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from .config import settings


class SpecfunResult(BaseModel):
    """Value of a special function together with an absolute error estimate."""
    model_config = ConfigDict(frozen=True)

    value: float = Field(..., description="Function value")
    abs_error_estimate: float = Field(0.0, ge=0.0, description="Absolute error estimate")

    @field_validator("abs_error_estimate")
    @classmethod
    def _finite_error(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError("abs_error_estimate must be finite")
        return v


class QuadConfig(BaseModel):
    """Tolerances and forced breakpoints of one adaptive quadrature call."""
    model_config = ConfigDict(frozen=True)

    abs_tol: float = Field(default_factory=lambda: settings.QUAD_ABS_TOL, gt=0.0)
    rel_tol: float = Field(default_factory=lambda: settings.QUAD_REL_TOL, gt=0.0)
    max_subdivisions: int = Field(default_factory=lambda: settings.MAX_SUBDIVISIONS, ge=1)
    forced_breakpoints: Tuple[float, ...] = Field(default=(), description="Split points applied before adaptation")

    def with_breakpoints(self, *points: float) -> "QuadConfig":
        merged = tuple(sorted(set(self.forced_breakpoints) | {float(p) for p in points}))
        return self.model_copy(update={"forced_breakpoints": merged})

    def without_breakpoints(self) -> "QuadConfig":
        if not self.forced_breakpoints:
            return self
        return self.model_copy(update={"forced_breakpoints": ()})

    def tightened(self, factor: float) -> "QuadConfig":
        return self.model_copy(update={"abs_tol": self.abs_tol / factor, "rel_tol": self.rel_tol / factor})


class QuadResult(BaseModel):
    """Outcome of an adaptive integration."""
    model_config = ConfigDict(frozen=True)

    value: float
    abs_error_estimate: float = Field(..., ge=0.0)
    subdivisions: int = Field(0, ge=0)
    converged: bool = True

    def scaled(self, factor: float) -> "QuadResult":
        return self.model_copy(update={
            "value": self.value * factor,
            "abs_error_estimate": self.abs_error_estimate * abs(factor),
        })


class Certification(BaseModel):
    """Grid check of g(u + t·λ·η(v,u)) ≤ h(1-t)g(u) + h(t)g(v)."""
    model_config = ConfigDict(frozen=True)

    holds: bool
    worst_violation: float
    witness: Optional[Tuple[float, float, float]] = Field(None, description="(u, v, t) of the worst grid point")
    points_checked: int = 0


class BoundReport(BaseModel):
    """One inequality evaluated on one scenario."""
    id: str
    scenario_digest: str
    lhs: float
    rhs: float
    margin: float
    quad_error: float = Field(0.0, ge=0.0)
    holds: Optional[bool] = Field(None, description="None when evaluation failed")
    waived: bool = False
    error: Optional[str] = None
    notes: List[str] = Field(default_factory=list)

    @staticmethod
    def tolerance(rhs: float, quad_error: float) -> float:
        return quad_error + settings.BOUND_REL_TOL * max(1.0, abs(rhs))

    @model_validator(mode="after")
    def _holds_matches_margin(self) -> "BoundReport":
        if self.error is None and self.holds is not None:
            expected = self.lhs <= self.rhs + self.tolerance(self.rhs, self.quad_error)
            if expected != self.holds:
                raise ValueError("holds flag disagrees with lhs/rhs/quad_error")
        return self


Classification = Literal["exact", "looser_upper", "under_oracle", "inconclusive"]


class AuditReport(BaseModel):
    """Printed corollary constant compared with its numeric oracle."""
    corollary: str
    alpha: float
    s: Optional[float] = None
    p: Optional[float] = None
    printed_value: float
    oracle_value: float
    oracle_error: float = Field(0.0, ge=0.0)
    classification: Classification
    notes: List[str] = Field(default_factory=list)


class RunSummary(BaseModel):
    """Batch of BoundReports produced by one verification or search run."""
    scenarios_run: int = 0
    violations: int = 0
    errors: int = 0
    min_margin: float = math.inf
    reports: List[BoundReport] = Field(default_factory=list)
    seed: int = 0
    waived: bool = False
    notes: List[str] = Field(default_factory=list)

    @classmethod
    def from_reports(cls, reports: List[BoundReport], scenarios_run: int, seed: int,
                     waived: bool = False, notes: Optional[List[str]] = None) -> "RunSummary":
        margins = [r.margin for r in reports if r.holds is not None]
        return cls(
            scenarios_run=scenarios_run,
            violations=sum(1 for r in reports if r.holds is False),
            errors=sum(1 for r in reports if r.holds is None),
            min_margin=min(margins) if margins else math.inf,
            reports=reports,
            seed=seed,
            waived=waived,
            notes=list(notes or []),
        )


class ReductionEntry(BaseModel):
    label: str
    generic: float
    closed_form: float
    discrepancy: float
    tolerance: float
    within: bool


class ReductionReport(BaseModel):
    kind: Literal["alpha_one", "phi_zero", "both"]
    scenario_digest: str
    max_abs_discrepancy: float
    inconsistent: bool = False
    entries: List[ReductionEntry] = Field(default_factory=list)
    notes: List[str] = Field(default_factory=list)


__all__ = [
    "SpecfunResult",
    "QuadConfig",
    "QuadResult",
    "Certification",
    "BoundReport",
    "Classification",
    "AuditReport",
    "RunSummary",
    "ReductionEntry",
    "ReductionReport",
]
