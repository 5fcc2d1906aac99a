"""
Adaptive Gauss–Kronrod (7/15) quadrature with caller-supplied breakpoints and a
power substitution for the weakly singular kernels (x-t)^(alpha-1), 0 < alpha < 1.
"""
from __future__ import annotations
import heapq
import math
from typing import Callable, List, Literal, Tuple
import numpy as np
from ..common.errors import DomainError, InvalidIntervalError
from ..common.logging import logger
from ..common.schemas import QuadConfig, QuadResult

# 15-point Kronrod abscissae (non-negative half) and weights, QUADPACK qk15 values.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
# 7-point Gauss weights for _XGK[1], _XGK[3], _XGK[5], _XGK[7]
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

# Full symmetric node set: -x_0..-x_6, 0, x_6..x_0
_NODES = np.concatenate([-_XGK[:7], _XGK[7:], _XGK[6::-1]])
_KRONROD_W = np.concatenate([_WGK[:7], _WGK[7:], _WGK[6::-1]])
_GAUSS_W = np.zeros(15)
_GAUSS_W[[1, 3, 5]] = _WG[:3]
_GAUSS_W[7] = _WG[3]
_GAUSS_W[[13, 11, 9]] = _WG[:3]

_EPS4 = 4.0 * float(np.finfo(float).eps)

Integrand = Callable[[np.ndarray], np.ndarray]
Side = Literal["left", "right"]


def as_vectorized(f: Callable) -> Integrand:
    """Wrap f so it maps a float array to a float array of the same shape.

    Scalar-only callables (math.exp, closures returning constants) fall back to
    element-wise evaluation.
    """
    def wrapped(x: np.ndarray) -> np.ndarray:
        try:
            y = np.asarray(f(x), dtype=float)
        except (TypeError, ValueError):
            y = None
        if y is None or y.shape != x.shape:
            y = np.array([float(f(float(xi))) for xi in x], dtype=float)
        return y
    return wrapped


def _gk15(f: Integrand, lo: float, hi: float) -> Tuple[float, float]:
    center = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    fx = f(center + half * _NODES)
    kronrod = half * float(np.dot(_KRONROD_W, fx))
    gauss = half * float(np.dot(_GAUSS_W, fx))
    return kronrod, abs(kronrod - gauss)


def _split_points(lo: float, hi: float, cfg: QuadConfig) -> List[float]:
    points = [lo]
    for bp in sorted(cfg.forced_breakpoints):
        if bp < lo or bp > hi:
            raise InvalidIntervalError(f"breakpoint {bp} outside [{lo}, {hi}]")
        if lo < bp < hi and bp != points[-1]:
            points.append(bp)
    points.append(hi)
    return points


def integrate(f: Callable, lo: float, hi: float, cfg: QuadConfig | None = None) -> QuadResult:
    """Integrate f over [lo, hi] by globally adaptive bisection.

    The interval is first split at every forced breakpoint; the subinterval with the
    largest error estimate is then bisected until the summed estimate drops below
    max(abs_tol, rel_tol·|value|) or the subdivision budget runs out. Non-convergence is
    reported through ``converged=False``, never raised.
    """
    cfg = cfg or QuadConfig()
    lo, hi = float(lo), float(hi)
    if lo > hi:
        raise InvalidIntervalError(f"lo={lo} > hi={hi}")
    if lo == hi:
        return QuadResult(value=0.0, abs_error_estimate=0.0, subdivisions=0, converged=True)

    fv = as_vectorized(f)
    heap: List[Tuple[float, int, float, float, float]] = []
    frozen: List[Tuple[float, float]] = []
    counter = 0
    points = _split_points(lo, hi, cfg)
    for left, right in zip(points[:-1], points[1:]):
        val, err = _gk15(fv, left, right)
        heapq.heappush(heap, (-err, counter, left, right, val))
        counter += 1

    subdivisions = 0
    finite = True
    while True:
        total = math.fsum(item[4] for item in heap) + math.fsum(v for v, _ in frozen)
        err_total = math.fsum(-item[0] for item in heap) + math.fsum(e for _, e in frozen)
        if not (math.isfinite(total) and math.isfinite(err_total)):
            finite = False
            break
        if err_total <= max(cfg.abs_tol, cfg.rel_tol * abs(total)):
            break
        if not heap or subdivisions >= cfg.max_subdivisions:
            break
        neg_err, _, left, right, val = heapq.heappop(heap)
        mid = 0.5 * (left + right)
        # no further resolution available in double precision
        if not (left < mid < right) or right - left <= _EPS4 * max(abs(left), abs(right)):
            frozen.append((val, -neg_err))
            continue
        for a, b in ((left, mid), (mid, right)):
            v, e = _gk15(fv, a, b)
            heapq.heappush(heap, (-e, counter, a, b, v))
            counter += 1
        subdivisions += 1

    converged = finite and err_total <= max(cfg.abs_tol, cfg.rel_tol * abs(total))
    if not converged:
        logger.warning(f"quadrature on [{lo}, {hi}] not converged: value={total} err={err_total} after {subdivisions} bisections")
    return QuadResult(
        value=total,
        abs_error_estimate=err_total if math.isfinite(err_total) else float(np.finfo(float).max),
        subdivisions=subdivisions,
        converged=converged,
    )


def integrate_power_kernel(
    g: Callable,
    x: float,
    endpoint: float,
    alpha: float,
    side: Side,
    cfg: QuadConfig | None = None,
) -> QuadResult:
    """Integrate (x-t)^(alpha-1) g(t) over [endpoint, x] (left) or
    (t-x)^(alpha-1) g(t) over [x, endpoint] (right).

    For alpha < 1 the substitution w = |x-t|^alpha turns the kernel into the constant
    1/alpha, so the transformed integrand is bounded. Forced breakpoints refer to the
    original variable and are dropped on that path.
    """
    cfg = cfg or QuadConfig()
    if alpha <= 0:
        raise DomainError(f"alpha must be > 0, got {alpha}")
    x, endpoint = float(x), float(endpoint)
    if side == "left":
        if endpoint >= x:
            raise InvalidIntervalError(f"left kernel needs endpoint < x, got [{endpoint}, {x}]")
        length = x - endpoint
        sign = -1.0
    elif side == "right":
        if endpoint <= x:
            raise InvalidIntervalError(f"right kernel needs x < endpoint, got [{x}, {endpoint}]")
        length = endpoint - x
        sign = 1.0
    else:
        raise DomainError(f"side must be 'left' or 'right', got {side!r}")

    gv = as_vectorized(g)
    if alpha >= 1.0:
        def kernel(t: np.ndarray) -> np.ndarray:
            return np.abs(x - t) ** (alpha - 1.0) * gv(t)
        lo, hi = (endpoint, x) if side == "left" else (x, endpoint)
        return integrate(kernel, lo, hi, cfg)

    inv = 1.0 / alpha

    def transformed(w: np.ndarray) -> np.ndarray:
        return gv(x + sign * w ** inv) * inv

    return integrate(transformed, 0.0, length ** alpha, cfg.without_breakpoints())


__all__ = ["integrate", "integrate_power_kernel", "as_vectorized"]
