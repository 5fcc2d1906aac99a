"""
Fractional Hermite–Hadamard identities, the generic-h bounds built on them, and the
printed closed-form constants of their h-specializations.

Every bound has the shape

    |f(a) + f(a+L) - Γ(α+1)/L^α · [J_{a+}^α f(a+L) + J_{(a+L)-}^α f(a)]|
        ≤ L^order · coefficient(h, α, p) · F

with L = λ·η(b, a) and F either |d(a)| + |d(b)| or (|d(a)|^q + |d(b)|^q)^(1/q),
where d is f' (order 1) or f'' (order 2) and q = p/(p-1).
"""
from __future__ import annotations
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Callable, Dict, List, Literal, NamedTuple, Optional, Tuple
import numpy as np
from ..common.config import settings
from ..common.errors import CertificationMissingError, DomainError, MissingParameterError, UnavailableDerivativeError
from ..common.logging import logger
from ..common.schemas import BoundReport, QuadConfig, QuadResult, ReductionEntry, ReductionReport
from ..numerics.fracint import rl_left, rl_right
from ..numerics.quad import integrate
from ..numerics.specfun import incomplete_beta_lower, log_gamma
from .funclasses import DifferenceEta, FunctionSpec, HClass, IdentityH, OneH, PowerH, Scenario

LAMBDA_NOTE = "lambda-model: e^{i phi} evaluated as real lambda"
GENERIC_H_NOTE = "generic-h binding: header class read as the displayed h"


class InequalityId(str, Enum):
    T3_2 = "T3.2"
    T3_6 = "T3.6"
    T3_10 = "T3.10"
    T3_15 = "T3.15"
    T3_19 = "T3.19"
    T3_19_printed = "T3.19-printed"
    T3_23 = "T3.23"


PROOF_FINAL_IDS: Tuple[InequalityId, ...] = (
    InequalityId.T3_2,
    InequalityId.T3_6,
    InequalityId.T3_10,
    InequalityId.T3_15,
    InequalityId.T3_19,
    InequalityId.T3_23,
)


class Coefficient(NamedTuple):
    value: float
    error: float
    converged: bool = True


# ---------------------------------------------------------------------------
# kernel weights
# ---------------------------------------------------------------------------

def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not (math.isfinite(alpha) and alpha > 0.0):
        raise DomainError(f"alpha must be > 0, got {alpha}")
    return alpha


@lru_cache(maxsize=4096)
def _w1(h: HClass, alpha: float, cfg: QuadConfig) -> QuadResult:
    def kernel(t):
        return np.abs((1.0 - t) ** alpha - t ** alpha) * h(t)
    return integrate(kernel, 0.0, 1.0, cfg.with_breakpoints(0.5, *h.knots))


@lru_cache(maxsize=4096)
def _w2(h: HClass, alpha: float, cfg: QuadConfig) -> QuadResult:
    def kernel(t):
        return (1.0 - (1.0 - t) ** (alpha + 1.0) - t ** (alpha + 1.0)) / (alpha + 1.0) * h(t)
    return integrate(kernel, 0.0, 1.0, cfg.with_breakpoints(*h.knots))


@lru_cache(maxsize=1024)
def _h_integral(h: HClass, cfg: QuadConfig) -> QuadResult:
    return integrate(h, 0.0, 1.0, cfg.with_breakpoints(*h.knots))


def weight_integral_W1(h: HClass, alpha: float, cfg: Optional[QuadConfig] = None) -> QuadResult:
    """∫₀¹ |(1-t)^α - t^α| h(t) dt, split at the kink t = 1/2."""
    return _w1(h, _check_alpha(alpha), cfg or QuadConfig())


def weight_integral_W2(h: HClass, alpha: float, cfg: Optional[QuadConfig] = None) -> QuadResult:
    """∫₀¹ [1 - (1-t)^(α+1) - t^(α+1)]/(α+1) · h(t) dt."""
    return _w2(h, _check_alpha(alpha), cfg or QuadConfig())


def h_integral(h: HClass, cfg: Optional[QuadConfig] = None) -> QuadResult:
    return _h_integral(h, cfg or QuadConfig())


# ---------------------------------------------------------------------------
# coefficient algebra
# ---------------------------------------------------------------------------

def signed_root(x: float, e: float) -> float:
    """x^e keeping the sign of x, so a negative bracket stays visible."""
    return math.copysign(abs(x) ** e, x)


def _from_quad(r: QuadResult) -> Coefficient:
    return Coefficient(r.value, r.abs_error_estimate, r.converged)


def _const(value: float) -> Coefficient:
    return Coefficient(value, 0.0, True)


def _pow(c: Coefficient, e: float) -> Coefficient:
    if c.value == 0.0:
        return Coefficient(0.0, c.error ** e if c.error > 0.0 else 0.0, c.converged)
    value = signed_root(c.value, e)
    return Coefficient(value, abs(e) * abs(c.value) ** (e - 1.0) * c.error, c.converged)


def _mul(x: Coefficient, y: Coefficient) -> Coefficient:
    return Coefficient(
        x.value * y.value,
        abs(x.value) * y.error + abs(y.value) * x.error + x.error * y.error,
        x.converged and y.converged,
    )


def w1_one_closed(alpha: float) -> float:
    return 2.0 / (alpha + 1.0) * (1.0 - 2.0 ** (-alpha))


def w2_one_closed(alpha: float) -> float:
    return alpha / ((alpha + 1.0) * (alpha + 2.0))


def holder_prefactor(alpha: float, p: float) -> float:
    return (2.0 / (alpha * p + 1.0)) ** (1.0 / p) * (1.0 - 2.0 ** (-alpha * p)) ** (1.0 / p)


def _coef_t3_2(h: HClass, alpha: float, p: float, cfg: QuadConfig) -> Coefficient:
    return _from_quad(weight_integral_W1(h, alpha, cfg))


def _coef_t3_6(h: HClass, alpha: float, p: float, cfg: QuadConfig) -> Coefficient:
    q = p / (p - 1.0)
    return _mul(_const(holder_prefactor(alpha, p)), _pow(_from_quad(h_integral(h, cfg)), 1.0 / q))


def _coef_t3_10(h: HClass, alpha: float, p: float, cfg: QuadConfig) -> Coefficient:
    q = p / (p - 1.0)
    front = _const(w1_one_closed(alpha) ** (1.0 / p))
    return _mul(front, _pow(_from_quad(weight_integral_W1(h, alpha, cfg)), 1.0 / q))


def _coef_t3_15(h: HClass, alpha: float, p: float, cfg: QuadConfig) -> Coefficient:
    return _from_quad(weight_integral_W2(h, alpha, cfg))


def _coef_t3_19(h: HClass, alpha: float, p: float, cfg: QuadConfig) -> Coefficient:
    # max of the second-order kernel on [0, 1], attained at t = 1/2
    q = p / (p - 1.0)
    front = _const((1.0 - 2.0 ** (-alpha)) / (alpha + 1.0))
    return _mul(front, _pow(_from_quad(h_integral(h, cfg)), 1.0 / q))


def _coef_t3_19_printed(h: HClass, alpha: float, p: float, cfg: QuadConfig) -> Coefficient:
    q = p / (p - 1.0)
    return _mul(_const(1.0 - 2.0 ** (-alpha)), _pow(_from_quad(h_integral(h, cfg)), 1.0 / q))


def _coef_t3_23(h: HClass, alpha: float, p: float, cfg: QuadConfig) -> Coefficient:
    q = p / (p - 1.0)
    front = _const(w2_one_closed(alpha) ** (1.0 / p))
    return _mul(front, _pow(_from_quad(weight_integral_W2(h, alpha, cfg)), 1.0 / q))


@dataclass(frozen=True)
class TheoremSpec:
    id: InequalityId
    order: int
    tag: str
    norm: Literal["sum", "qnorm"]
    coefficient: Callable[[HClass, float, float, QuadConfig], Coefficient]
    notes: Tuple[str, ...] = ()


THEOREMS: Dict[InequalityId, TheoremSpec] = {
    InequalityId.T3_2: TheoremSpec(InequalityId.T3_2, 1, "d1", "sum", _coef_t3_2),
    InequalityId.T3_6: TheoremSpec(InequalityId.T3_6, 1, "d1q", "qnorm", _coef_t3_6),
    InequalityId.T3_10: TheoremSpec(InequalityId.T3_10, 1, "d1q", "qnorm", _coef_t3_10),
    InequalityId.T3_15: TheoremSpec(InequalityId.T3_15, 2, "d2", "sum", _coef_t3_15),
    InequalityId.T3_19: TheoremSpec(InequalityId.T3_19, 2, "d2q", "qnorm", _coef_t3_19, (GENERIC_H_NOTE,)),
    InequalityId.T3_19_printed: TheoremSpec(
        InequalityId.T3_19_printed, 2, "d2q", "qnorm", _coef_t3_19_printed,
        (GENERIC_H_NOTE, "statement form: no 1/(alpha+1) factor"),
    ),
    InequalityId.T3_23: TheoremSpec(InequalityId.T3_23, 2, "d2q", "qnorm", _coef_t3_23, (GENERIC_H_NOTE,)),
}


def theorem_coefficient(id: InequalityId, h: HClass, alpha: float, p: float = 2.0,
                        cfg: Optional[QuadConfig] = None) -> Coefficient:
    if p <= 1.0:
        raise DomainError(f"p must be > 1, got {p}")
    return THEOREMS[InequalityId(id)].coefficient(h, _check_alpha(alpha), float(p), cfg or QuadConfig())


def derivative_factor(id: InequalityId, s: Scenario) -> float:
    """F: the derivative magnitudes at a and b combined as the theorem needs."""
    spec = THEOREMS[InequalityId(id)]
    da = abs(s.f.derivative_at(spec.order, s.a))
    db = abs(s.f.derivative_at(spec.order, s.b))
    if spec.norm == "sum":
        return da + db
    q = s.q
    return (da ** q + db ** q) ** (1.0 / q)


# ---------------------------------------------------------------------------
# identities
# ---------------------------------------------------------------------------

@lru_cache(maxsize=4096)
def _identity_lhs(f: FunctionSpec, a: float, end: float, alpha: float, cfg: QuadConfig) -> Coefficient:
    fv = f.d(0)
    left = rl_left(fv, a, end, alpha, cfg)
    right = rl_right(fv, a, end, alpha, cfg)
    length = end - a
    pref = math.exp(log_gamma(alpha + 1.0).value - alpha * math.log(length))
    value = f.value(a) + f.value(end) - pref * (left.value + right.value)
    err = pref * (left.abs_error_estimate + right.abs_error_estimate)
    return Coefficient(value, err, left.converged and right.converged)


def identity_lhs(s: Scenario) -> Coefficient:
    """Signed left side shared by both identities and all bounds."""
    return _identity_lhs(s.f, float(s.a), float(s.end), float(s.alpha), s.quad_cfg)


def _order_kernel(order: int, alpha: float) -> Callable[[np.ndarray], np.ndarray]:
    if order == 1:
        return lambda t: t ** alpha - (1.0 - t) ** alpha
    return lambda t: (1.0 - (1.0 - t) ** (alpha + 1.0) - t ** (alpha + 1.0)) / (alpha + 1.0)


def identity_rhs(order: int, s: Scenario) -> Coefficient:
    """L^order · ∫₀¹ kernel(t) · f^(order)(a + tL) dt."""
    if order not in (1, 2):
        raise DomainError(f"order must be 1 or 2, got {order}")
    d = s.f.d(order)
    kernel = _order_kernel(order, s.alpha)
    a, length = s.a, s.step

    def integrand(t):
        return kernel(t) * d(a + t * length)

    r = integrate(integrand, 0.0, 1.0, s.quad_cfg)
    scale = length ** order
    return Coefficient(scale * r.value, scale * r.abs_error_estimate, r.converged)


def lemma_sides(order: int, s: Scenario) -> Tuple[Coefficient, Coefficient]:
    return identity_lhs(s), identity_rhs(order, s)


def lemma_residual(order: int, s: Scenario) -> float:
    lhs, rhs = lemma_sides(order, s)
    return abs(lhs.value - rhs.value)


# ---------------------------------------------------------------------------
# bounds
# ---------------------------------------------------------------------------

def _rhs(id: InequalityId, s: Scenario, h: HClass, alpha: float) -> Coefficient:
    spec = THEOREMS[InequalityId(id)]
    coef = theorem_coefficient(spec.id, h, alpha, s.p, s.quad_cfg)
    scale = s.step ** spec.order * derivative_factor(spec.id, s)
    return Coefficient(scale * coef.value, scale * coef.error, coef.converged)


def eval_inequality(id: InequalityId, s: Scenario, waive: bool = False) -> BoundReport:
    spec = THEOREMS[InequalityId(id)]
    if not waive and spec.tag not in s.certified:
        raise CertificationMissingError(
            f"{spec.id.value} needs certificate {spec.tag!r}; scenario has {sorted(s.certified)}"
        )
    lhs_c = identity_lhs(s)
    rhs_c = _rhs(spec.id, s, s.h, s.alpha)
    lhs = abs(lhs_c.value)
    quad_error = lhs_c.error + rhs_c.error
    notes = [LAMBDA_NOTE, *spec.notes]
    if waive:
        notes.append("certification waived")
    if not (lhs_c.converged and rhs_c.converged):
        notes.append("quadrature not converged")
    holds = lhs <= rhs_c.value + BoundReport.tolerance(rhs_c.value, quad_error)
    return BoundReport(
        id=spec.id.value,
        scenario_digest=s.digest(),
        lhs=lhs,
        rhs=rhs_c.value,
        margin=rhs_c.value - lhs,
        quad_error=quad_error,
        holds=holds,
        waived=waive,
        notes=notes,
    )


class TriangleChain(NamedTuple):
    lhs: float
    middle: float
    rhs: float
    error: float


def triangle_chain(s: Scenario) -> TriangleChain:
    """Links of the first-order estimate: lhs ≤ L∫|Δ(t)||f'(a+tL)|dt ≤ rhs(T3.2)."""
    d1 = s.f.d(1)
    alpha, a, length = s.alpha, s.a, s.step

    def integrand(t):
        return np.abs(t ** alpha - (1.0 - t) ** alpha) * np.abs(d1(a + t * length))

    mid = integrate(integrand, 0.0, 1.0, s.quad_cfg.with_breakpoints(0.5))
    lhs = identity_lhs(s)
    rhs = _rhs(InequalityId.T3_2, s, s.h, s.alpha)
    return TriangleChain(
        lhs=abs(lhs.value),
        middle=length * mid.value,
        rhs=rhs.value,
        error=lhs.error + length * mid.abs_error_estimate + rhs.error,
    )


def classical_trapezoid_gap(f: FunctionSpec, a: float, b: float, cfg: Optional[QuadConfig] = None) -> QuadResult:
    """|f(a) + f(b) - (2/(b-a)) ∫ₐᵇ f|."""
    if not b > a:
        raise DomainError(f"needs a < b, got a={a}, b={b}")
    r = integrate(f.d(0), a, b, cfg or QuadConfig())
    scale = 2.0 / (b - a)
    return QuadResult(
        value=abs(f.value(a) + f.value(b) - scale * r.value),
        abs_error_estimate=scale * r.abs_error_estimate,
        subdivisions=r.subdivisions,
        converged=r.converged,
    )


# ---------------------------------------------------------------------------
# corollaries
# ---------------------------------------------------------------------------

class CorollaryId(str, Enum):
    C3_3 = "C3.3"
    C3_4 = "C3.4"
    C3_5 = "C3.5"
    C3_7 = "C3.7"
    C3_8 = "C3.8"
    C3_9 = "C3.9"
    C3_11 = "C3.11"
    C3_12 = "C3.12"
    C3_13 = "C3.13"
    C3_16 = "C3.16"
    C3_17 = "C3.17"
    C3_18 = "C3.18"
    C3_20 = "C3.20"
    C3_21 = "C3.21"
    C3_22 = "C3.22"
    C3_24 = "C3.24"
    C3_25 = "C3.25"
    C3_26 = "C3.26"


HCase = Literal["identity", "power_s", "one"]


def _b_half(p: float, q: float) -> float:
    return incomplete_beta_lower(0.5, p, q).value


def _c3_3(alpha, s, q):
    return (1.0 / (alpha + 2.0)) * (1.0 - 2.0 ** (-(alpha + 2.0)))


def _c3_4(alpha, s, q):
    return (_b_half(alpha + 1.0, s + 1.0) - _b_half(s + 1.0, alpha + 1.0)
            + (1.0 - 2.0 ** (-(s + alpha))) / (alpha + s + 1.0))


def _c3_17(alpha, s, q):
    return 1.0 / ((alpha + s + 2.0) * (s + 1.0)) - _b_half(s + 1.0, alpha) / (alpha + 1.0)


def _t3_19_front(alpha: float) -> float:
    return (1.0 - 2.0 ** (-alpha)) / (alpha + 1.0)


# printed closed forms; arguments (alpha, s, q) with q = p/(p-1)
_PRINTED: Dict[CorollaryId, Callable[[float, Optional[float], Optional[float]], float]] = {
    CorollaryId.C3_3: _c3_3,
    CorollaryId.C3_4: _c3_4,
    CorollaryId.C3_5: lambda alpha, s, q: w1_one_closed(alpha),
    CorollaryId.C3_7: lambda alpha, s, q: holder_prefactor(alpha, q / (q - 1.0)) * 0.5 ** (1.0 / q),
    CorollaryId.C3_8: lambda alpha, s, q: holder_prefactor(alpha, q / (q - 1.0)) * (1.0 / (s + 1.0)) ** (1.0 / q),
    CorollaryId.C3_9: lambda alpha, s, q: holder_prefactor(alpha, q / (q - 1.0)),
    CorollaryId.C3_11: lambda alpha, s, q: (w1_one_closed(alpha) ** (1.0 - 1.0 / q)
                                            * signed_root(_c3_3(alpha, s, q), 1.0 / q)),
    CorollaryId.C3_12: lambda alpha, s, q: ((2.0 ** (alpha + 1.0) - 2.0) / (2.0 ** alpha * (alpha + 1.0))
                                            * signed_root(_c3_4(alpha, s, q), 1.0 / q)),
    CorollaryId.C3_13: lambda alpha, s, q: w1_one_closed(alpha),
    CorollaryId.C3_16: lambda alpha, s, q: alpha / (2.0 * (alpha + 1.0) * (alpha + 2.0)),
    CorollaryId.C3_17: _c3_17,
    CorollaryId.C3_18: lambda alpha, s, q: w2_one_closed(alpha),
    CorollaryId.C3_20: lambda alpha, s, q: _t3_19_front(alpha) * 0.5 ** (1.0 / q),
    CorollaryId.C3_21: lambda alpha, s, q: _t3_19_front(alpha) * (1.0 / (s + 1.0)) ** (1.0 / q),
    CorollaryId.C3_22: lambda alpha, s, q: _t3_19_front(alpha),
    CorollaryId.C3_24: lambda alpha, s, q: 0.5 ** (1.0 / q) * w2_one_closed(alpha),
    CorollaryId.C3_25: lambda alpha, s, q: (w2_one_closed(alpha) ** (1.0 - 1.0 / q)
                                            * signed_root(_c3_17(alpha, s, q), 1.0 / q)),
    CorollaryId.C3_26: lambda alpha, s, q: w2_one_closed(alpha),
}


@dataclass(frozen=True)
class CorollarySpec:
    id: CorollaryId
    theorem: InequalityId
    h_case: HCase

    @property
    def uses_s(self) -> bool:
        return self.h_case == "power_s"

    @property
    def uses_p(self) -> bool:
        return THEOREMS[self.theorem].norm == "qnorm"


def _family(theorem: InequalityId, ids: Tuple[CorollaryId, CorollaryId, CorollaryId]) -> Dict[CorollaryId, CorollarySpec]:
    cases: Tuple[HCase, ...] = ("identity", "power_s", "one")
    return {cid: CorollarySpec(cid, theorem, case) for cid, case in zip(ids, cases)}


COROLLARIES: Dict[CorollaryId, CorollarySpec] = {
    **_family(InequalityId.T3_2, (CorollaryId.C3_3, CorollaryId.C3_4, CorollaryId.C3_5)),
    **_family(InequalityId.T3_6, (CorollaryId.C3_7, CorollaryId.C3_8, CorollaryId.C3_9)),
    **_family(InequalityId.T3_10, (CorollaryId.C3_11, CorollaryId.C3_12, CorollaryId.C3_13)),
    **_family(InequalityId.T3_15, (CorollaryId.C3_16, CorollaryId.C3_17, CorollaryId.C3_18)),
    **_family(InequalityId.T3_19, (CorollaryId.C3_20, CorollaryId.C3_21, CorollaryId.C3_22)),
    **_family(InequalityId.T3_23, (CorollaryId.C3_24, CorollaryId.C3_25, CorollaryId.C3_26)),
}


def h_for_case(case: HCase, s: Optional[float] = None) -> HClass:
    if case == "identity":
        return IdentityH()
    if case == "one":
        return OneH()
    if s is None:
        raise MissingParameterError("the t^s case needs s")
    return PowerH(s=s)


def _validate_params(spec: CorollarySpec, s: Optional[float], p: Optional[float]) -> None:
    if spec.uses_s:
        if s is None:
            raise MissingParameterError(f"{spec.id.value} needs s")
        if not (0.0 < s <= 1.0):
            raise DomainError(f"s must lie in (0, 1], got {s}")
    if spec.uses_p:
        if p is None:
            raise MissingParameterError(f"{spec.id.value} needs p")
        if not p > 1.0:
            raise DomainError(f"p must be > 1, got {p}")


def corollary_constant(id: CorollaryId, alpha: float, s: Optional[float] = None, p: Optional[float] = None) -> float:
    """The closed-form constant exactly as printed."""
    spec = COROLLARIES[CorollaryId(id)]
    alpha = _check_alpha(alpha)
    _validate_params(spec, s, p)
    q = p / (p - 1.0) if spec.uses_p else None
    return float(_PRINTED[spec.id](alpha, s, q))


def corollary_oracle(id: CorollaryId, alpha: float, s: Optional[float] = None, p: Optional[float] = None,
                     cfg: Optional[QuadConfig] = None) -> Coefficient:
    """The generic theorem coefficient evaluated numerically for the corollary's h."""
    spec = COROLLARIES[CorollaryId(id)]
    alpha = _check_alpha(alpha)
    _validate_params(spec, s, p)
    h = h_for_case(spec.h_case, s)
    return theorem_coefficient(spec.theorem, h, alpha, p if spec.uses_p else 2.0, cfg)


# ---------------------------------------------------------------------------
# reductions
# ---------------------------------------------------------------------------

def _pinned(s: Scenario, alpha: Optional[float] = None, lam: Optional[float] = None,
            difference: bool = False) -> Scenario:
    map_update = {}
    if lam is not None:
        map_update["lam"] = lam
    if difference:
        map_update["eta"] = DifferenceEta()
    return Scenario(
        f=s.f,
        a=s.a,
        b=s.b,
        alpha=s.alpha if alpha is None else alpha,
        p=s.p,
        h=s.h,
        map=s.map.model_copy(update=map_update) if map_update else s.map,
        quad_cfg=s.quad_cfg,
        certified=s.certified,
    )


def _identity_entries(s: Scenario, scale: float) -> Tuple[List[ReductionEntry], List[str]]:
    entries, notes = [], []
    for order in (1, 2):
        try:
            lhs, rhs = lemma_sides(order, s)
        except UnavailableDerivativeError as exc:
            notes.append(str(exc))
            continue
        disc = abs(lhs.value - rhs.value)
        tol = lhs.error + rhs.error + settings.BOUND_REL_TOL * scale
        entries.append(ReductionEntry(label=f"lemma order {order}", generic=lhs.value,
                                      closed_form=rhs.value, discrepancy=disc, tolerance=tol,
                                      within=disc <= tol))
    return entries, notes


def reduction_check(kind: Literal["alpha_one", "phi_zero", "both"], s: Scenario) -> ReductionReport:
    """Consistency of the α = 1 and φ = 0 specializations on one scenario.

    alpha_one compares every corollary's closed form with the generic bound at α = 1;
    phi_zero re-checks both identities at λ = 1; both additionally pins η to the
    difference map and compares the bound's left side with the classical trapezoid gap.
    """
    entries: List[ReductionEntry] = []
    notes: List[str] = [LAMBDA_NOTE]
    inconsistent = False

    if kind == "alpha_one":
        pinned = _pinned(s, alpha=1.0)
        s_param = s.h.s if isinstance(s.h, PowerH) else 0.5
        for cid, spec in COROLLARIES.items():
            th = THEOREMS[spec.theorem]
            try:
                scale = pinned.step ** th.order * derivative_factor(th.id, pinned)
            except UnavailableDerivativeError as exc:
                notes.append(str(exc))
                continue
            coef = theorem_coefficient(th.id, h_for_case(spec.h_case, s_param), 1.0, pinned.p, pinned.quad_cfg)
            generic = scale * coef.value
            closed = scale * corollary_constant(cid, 1.0, s_param if spec.uses_s else None,
                                                pinned.p if spec.uses_p else None)
            tol = scale * coef.error + settings.BOUND_REL_TOL * max(1.0, abs(generic))
            disc = abs(closed - generic)
            entries.append(ReductionEntry(label=f"{th.id.value}/{cid.value}", generic=generic,
                                          closed_form=closed, discrepancy=disc, tolerance=tol,
                                          within=disc <= tol))
            inconsistent = inconsistent or closed < generic - tol
        digest = pinned.digest()
    elif kind in ("phi_zero", "both"):
        pinned = _pinned(s, lam=1.0) if kind == "phi_zero" else _pinned(s, alpha=1.0, lam=1.0, difference=True)
        scale = max(1.0, abs(pinned.f.value(pinned.a)) + abs(pinned.f.value(pinned.end)))
        entries, extra = _identity_entries(pinned, scale)
        notes.extend(extra)
        if kind == "both":
            lhs = identity_lhs(pinned)
            gap = classical_trapezoid_gap(pinned.f, pinned.a, pinned.b, pinned.quad_cfg)
            disc = abs(abs(lhs.value) - gap.value)
            tol = lhs.error + gap.abs_error_estimate + settings.BOUND_REL_TOL * scale
            entries.append(ReductionEntry(label="trapezoid", generic=abs(lhs.value), closed_form=gap.value,
                                          discrepancy=disc, tolerance=tol, within=disc <= tol))
        # identities have no looser side: any miss is an inconsistency
        inconsistent = any(not e.within for e in entries)
        digest = pinned.digest()
    else:
        raise DomainError(f"unknown reduction kind {kind!r}")

    if inconsistent:
        logger.warning(f"reduction {kind} inconsistent on {digest}")
    return ReductionReport(
        kind=kind,
        scenario_digest=digest,
        max_abs_discrepancy=max((e.discrepancy for e in entries), default=0.0),
        inconsistent=inconsistent,
        entries=entries,
        notes=notes,
    )


__all__ = [
    "InequalityId",
    "CorollaryId",
    "PROOF_FINAL_IDS",
    "THEOREMS",
    "COROLLARIES",
    "Coefficient",
    "weight_integral_W1",
    "weight_integral_W2",
    "h_integral",
    "theorem_coefficient",
    "derivative_factor",
    "identity_lhs",
    "identity_rhs",
    "lemma_sides",
    "lemma_residual",
    "eval_inequality",
    "triangle_chain",
    "classical_trapezoid_gap",
    "corollary_constant",
    "corollary_oracle",
    "h_for_case",
    "signed_root",
    "reduction_check",
    "w1_one_closed",
    "w2_one_closed",
    "holder_prefactor",
]
