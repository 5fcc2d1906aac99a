"""
Left and right Riemann–Liouville fractional integrals

    J_{a+}^α f(x) = 1/Γ(α) ∫_a^x (x-t)^(α-1) f(t) dt,   x > a
    J_{b-}^α f(x) = 1/Γ(α) ∫_x^b (t-x)^(α-1) f(t) dt,   x < b

with J^0 the identity.
"""
from __future__ import annotations
import math
from typing import Callable, Literal, Optional
import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from ..common.errors import DomainError
from ..common.schemas import QuadConfig, QuadResult
from .quad import as_vectorized, integrate_power_kernel
from .specfun import log_gamma


class FracOperatorSpec(BaseModel):
    """A bound fractional operator: order, side, and the fixed end of its interval."""
    model_config = ConfigDict(frozen=True)

    alpha: float = Field(..., ge=0.0, description="Order; 0 is the identity")
    side: Literal["left", "right"]
    anchor: float = Field(..., description="a for the left operator, b for the right one")

    def apply(self, f: Callable, x: float, cfg: Optional[QuadConfig] = None) -> QuadResult:
        if self.side == "left":
            return rl_left(f, self.anchor, x, self.alpha, cfg)
        return rl_right(f, x, self.anchor, self.alpha, cfg)


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not math.isfinite(alpha) or alpha < 0.0:
        raise DomainError(f"alpha must be >= 0, got {alpha}")
    return alpha


def _identity(f: Callable, x: float) -> QuadResult:
    value = float(as_vectorized(f)(np.array([x]))[0])
    return QuadResult(value=value, abs_error_estimate=0.0, subdivisions=0, converged=True)


def rl_left(f: Callable, a: float, x: float, alpha: float, cfg: Optional[QuadConfig] = None) -> QuadResult:
    alpha = _check_alpha(alpha)
    a, x = float(a), float(x)
    if not x > a:
        raise DomainError(f"left operator needs x > a, got a={a}, x={x}")
    if alpha == 0.0:
        return _identity(f, x)
    raw = integrate_power_kernel(f, x, a, alpha, "left", cfg)
    return raw.scaled(math.exp(-log_gamma(alpha).value))


def rl_right(f: Callable, x: float, b: float, alpha: float, cfg: Optional[QuadConfig] = None) -> QuadResult:
    alpha = _check_alpha(alpha)
    x, b = float(x), float(b)
    if not x < b:
        raise DomainError(f"right operator needs x < b, got x={x}, b={b}")
    if alpha == 0.0:
        return _identity(f, x)
    raw = integrate_power_kernel(f, x, b, alpha, "right", cfg)
    return raw.scaled(math.exp(-log_gamma(alpha).value))


def rl_monomial(k: float, alpha: float, a: float, x: float) -> float:
    """Closed form of J_{a+}^α (t-a)^k at x: Γ(k+1)/Γ(k+1+α)·(x-a)^(k+α)."""
    alpha = _check_alpha(alpha)
    if k <= -1.0:
        raise DomainError(f"monomial power must exceed -1, got {k}")
    if x <= a:
        raise DomainError(f"needs x > a, got a={a}, x={x}")
    log_ratio = log_gamma(k + 1.0).value - log_gamma(k + 1.0 + alpha).value
    return math.exp(log_ratio + (k + alpha) * math.log(x - a))


__all__ = ["FracOperatorSpec", "rl_left", "rl_right", "rl_monomial"]
