"""
h-preinvex function classes: multiplier functions h, invexity maps (η, λ), the
test-function library, verification scenarios and grid certification.

The rotation factor e^{iφ} of the displacement u + t·e^{iφ}·η(v, u) is modelled as a
real factor λ in (0, 1]; λ = 1 is φ = 0.

Text grammar (CLI):
    f:    poly:c0,c1,...   exp:k   powabs:k
    h:    id   pow:s   one   tab:t0=v0,t1=v1,...
    eta:  diff   affine:c
"""
from __future__ import annotations
import hashlib
import math
from typing import Annotated, Any, Callable, FrozenSet, Iterable, Literal, Optional, Tuple, Union
import numpy as np
import orjson
from numpy.polynomial import Polynomial
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from ..common.config import settings
from ..common.errors import DomainError, UnavailableDerivativeError
from ..common.schemas import Certification, QuadConfig
from ..numerics.quad import as_vectorized

CertTag = Literal["d1", "d1q", "d2", "d2q"]


def _fmt(x: float) -> str:
    return repr(float(x))


# ---------------------------------------------------------------------------
# h classes
# ---------------------------------------------------------------------------

class IdentityH(BaseModel):
    model_config = ConfigDict(frozen=True)
    kind: Literal["identity"] = "identity"

    def __call__(self, t: np.ndarray) -> np.ndarray:
        return np.asarray(t, dtype=float)

    @property
    def label(self) -> str:
        return "id"

    @property
    def knots(self) -> Tuple[float, ...]:
        return ()


class PowerH(BaseModel):
    """h(t) = t^s, the s-preinvex class."""
    model_config = ConfigDict(frozen=True)
    kind: Literal["power"] = "power"
    s: float = Field(..., gt=0.0, le=1.0)

    def __call__(self, t: np.ndarray) -> np.ndarray:
        return np.asarray(t, dtype=float) ** self.s

    @property
    def label(self) -> str:
        return f"pow:{_fmt(self.s)}"

    @property
    def knots(self) -> Tuple[float, ...]:
        return ()


class OneH(BaseModel):
    """h ≡ 1, the P-preinvex class."""
    model_config = ConfigDict(frozen=True)
    kind: Literal["one"] = "one"

    def __call__(self, t: np.ndarray) -> np.ndarray:
        return np.ones_like(np.asarray(t, dtype=float))

    @property
    def label(self) -> str:
        return "one"

    @property
    def knots(self) -> Tuple[float, ...]:
        return ()


class TabulatedH(BaseModel):
    """Piecewise-linear h through (t, value) knots spanning [0, 1]."""
    model_config = ConfigDict(frozen=True)
    kind: Literal["tabulated"] = "tabulated"
    points: Tuple[Tuple[float, float], ...] = Field(..., min_length=2)

    @field_validator("points")
    @classmethod
    def _check_points(cls, v: Tuple[Tuple[float, float], ...]) -> Tuple[Tuple[float, float], ...]:
        ts = [p[0] for p in v]
        if ts[0] != 0.0 or ts[-1] != 1.0:
            raise ValueError("tabulated knots must start at t=0 and end at t=1")
        if any(t1 <= t0 for t0, t1 in zip(ts[:-1], ts[1:])):
            raise ValueError("tabulated knots must be strictly increasing in t")
        if any(p[1] < 0.0 or not math.isfinite(p[1]) for p in v):
            raise ValueError("tabulated values must be finite and nonnegative")
        return v

    def __call__(self, t: np.ndarray) -> np.ndarray:
        ts = np.array([p[0] for p in self.points])
        vs = np.array([p[1] for p in self.points])
        return np.interp(np.asarray(t, dtype=float), ts, vs)

    @property
    def label(self) -> str:
        return "tab:" + ",".join(f"{_fmt(t)}={_fmt(v)}" for t, v in self.points)

    @property
    def knots(self) -> Tuple[float, ...]:
        return tuple(p[0] for p in self.points[1:-1])


HClass = Annotated[Union[IdentityH, PowerH, OneH, TabulatedH], Field(discriminator="kind")]


def h_eval(h: HClass, t: float) -> float:
    t = float(t)
    if not (0.0 <= t <= 1.0):
        raise DomainError(f"h is defined on [0, 1], got t={t}")
    return float(h(np.array([t]))[0])


# ---------------------------------------------------------------------------
# invexity maps
# ---------------------------------------------------------------------------

class DifferenceEta(BaseModel):
    model_config = ConfigDict(frozen=True)
    kind: Literal["difference"] = "difference"

    def __call__(self, v, u):
        return np.asarray(v, dtype=float) - np.asarray(u, dtype=float)

    @property
    def label(self) -> str:
        return "diff"


class AffineEta(BaseModel):
    """η(v, u) = c·(v - u)."""
    model_config = ConfigDict(frozen=True)
    kind: Literal["affine"] = "affine"
    c: float = Field(..., gt=0.0)

    def __call__(self, v, u):
        return self.c * (np.asarray(v, dtype=float) - np.asarray(u, dtype=float))

    @property
    def label(self) -> str:
        return f"affine:{_fmt(self.c)}"


class CustomEta(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)
    kind: Literal["custom"] = "custom"
    name: str = "custom"
    fn: Callable[[float, float], float]

    def __call__(self, v, u):
        v_arr, u_arr = np.broadcast_arrays(np.asarray(v, dtype=float), np.asarray(u, dtype=float))
        try:
            out = np.asarray(self.fn(v_arr, u_arr), dtype=float)
            if out.shape == v_arr.shape:
                return out
        except (TypeError, ValueError):
            pass
        flat = [float(self.fn(float(vi), float(ui))) for vi, ui in zip(v_arr.ravel(), u_arr.ravel())]
        return np.array(flat, dtype=float).reshape(v_arr.shape)

    @property
    def label(self) -> str:
        return f"custom:{self.name}"


EtaKind = Annotated[Union[DifferenceEta, AffineEta, CustomEta], Field(discriminator="kind")]


class InvexityMap(BaseModel):
    model_config = ConfigDict(frozen=True)

    eta: EtaKind = Field(default_factory=DifferenceEta)
    lam: float = Field(1.0, gt=0.0, le=1.0, description="Real stand-in for e^{iφ}; 1 is φ = 0")

    def eta_value(self, v: float, u: float) -> float:
        return float(np.asarray(self.eta(v, u)).reshape(-1)[0])

    def step(self, a: float, b: float) -> float:
        """λ·η(b, a), the length of the displaced interval."""
        eta = self.eta_value(b, a)
        if not eta > 0.0:
            raise DomainError(f"eta(b, a) must be > 0, got {eta} for a={a}, b={b}")
        return self.lam * eta


def displaced_point(map: InvexityMap, a: float, b: float, t: float) -> float:
    t = float(t)
    if not (0.0 <= t <= 1.0):
        raise DomainError(f"t must lie in [0, 1], got {t}")
    step = map.step(a, b)
    if t == 1.0:
        return a + step
    return a + t * step


# ---------------------------------------------------------------------------
# test functions
# ---------------------------------------------------------------------------

class PolyFamily(BaseModel):
    """f(x) = Σ c_i x^i."""
    model_config = ConfigDict(frozen=True)
    kind: Literal["poly"] = "poly"
    coeffs: Tuple[float, ...] = Field(..., min_length=1)

    def derivative(self, order: int) -> Callable:
        poly = Polynomial(self.coeffs)
        return poly.deriv(order) if order else poly

    @property
    def label(self) -> str:
        return "poly:" + ",".join(_fmt(c) for c in self.coeffs)


class ExpScaledFamily(BaseModel):
    """f(x) = e^{kx}."""
    model_config = ConfigDict(frozen=True)
    kind: Literal["exp_scaled"] = "exp_scaled"
    k: float

    def derivative(self, order: int) -> Callable:
        k, scale = self.k, self.k ** order
        return lambda x: scale * np.exp(k * np.asarray(x, dtype=float))

    @property
    def label(self) -> str:
        return f"exp:{_fmt(self.k)}"


class PowerAbsFamily(BaseModel):
    """f(x) = |x|^k, k ≥ 2 so f'' is finite at 0."""
    model_config = ConfigDict(frozen=True)
    kind: Literal["power_abs"] = "power_abs"
    k: float = Field(..., ge=2.0)

    def derivative(self, order: int) -> Callable:
        k = self.k
        if order == 0:
            return lambda x: np.abs(np.asarray(x, dtype=float)) ** k
        if order == 1:
            return lambda x: k * np.abs(np.asarray(x, dtype=float)) ** (k - 1.0) * np.sign(x)
        return lambda x: k * (k - 1.0) * np.abs(np.asarray(x, dtype=float)) ** (k - 2.0)

    @property
    def label(self) -> str:
        return f"powabs:{_fmt(self.k)}"


class CustomFamily(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)
    kind: Literal["custom"] = "custom"
    name: str = "custom"
    f: Callable[..., Any]
    f1: Optional[Callable[..., Any]] = None
    f2: Optional[Callable[..., Any]] = None

    def derivative(self, order: int) -> Callable:
        fn = (self.f, self.f1, self.f2)[order]
        if fn is None:
            raise UnavailableDerivativeError(f"custom function {self.name!r} has no derivative of order {order}")
        return fn

    @property
    def label(self) -> str:
        return f"custom:{self.name}"


Family = Annotated[Union[PolyFamily, ExpScaledFamily, PowerAbsFamily, CustomFamily], Field(discriminator="kind")]


class FunctionSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    family: Family
    domain: Tuple[float, float] = (-math.inf, math.inf)

    @model_validator(mode="after")
    def _check_domain(self) -> "FunctionSpec":
        if not self.domain[0] < self.domain[1]:
            raise ValueError(f"empty domain {self.domain}")
        return self

    def d(self, order: int) -> Callable[[np.ndarray], np.ndarray]:
        """Vectorized f (order 0), f' or f''."""
        if order not in (0, 1, 2):
            raise DomainError(f"derivative order must be 0, 1 or 2, got {order}")
        return as_vectorized(self.family.derivative(order))

    def __call__(self, x):
        arr = np.asarray(x, dtype=float)
        out = self.d(0)(np.atleast_1d(arr))
        return out.reshape(arr.shape) if arr.ndim else float(out[0])

    def value(self, x: float) -> float:
        return float(self(float(x)))

    def derivative_at(self, order: int, x: float) -> float:
        return float(self.d(order)(np.array([float(x)]))[0])

    @property
    def label(self) -> str:
        return self.family.label


def derivative_magnitude_power(spec: FunctionSpec, order: int, q_exp: float) -> Callable[[np.ndarray], np.ndarray]:
    if order not in (1, 2):
        raise DomainError(f"order must be 1 or 2, got {order}")
    if q_exp < 1.0:
        raise DomainError(f"q_exp must be >= 1, got {q_exp}")
    d = spec.d(order)

    def magnitude(t):
        arr = np.asarray(t, dtype=float)
        out = np.abs(d(np.atleast_1d(arr))) ** q_exp
        return out.reshape(arr.shape) if arr.ndim else float(out[0])
    return magnitude


# ---------------------------------------------------------------------------
# scenarios
# ---------------------------------------------------------------------------

class Scenario(BaseModel):
    """One fully bound verification instance."""
    model_config = ConfigDict(frozen=True)

    f: FunctionSpec
    a: float
    b: float
    alpha: float = Field(..., gt=0.0)
    p: float = Field(2.0, gt=1.0, description="Hölder exponent; q = p/(p-1)")
    h: HClass = Field(default_factory=IdentityH)
    map: InvexityMap = Field(default_factory=InvexityMap)
    quad_cfg: QuadConfig = Field(default_factory=QuadConfig)
    certified: FrozenSet[str] = Field(default_factory=frozenset)

    @model_validator(mode="after")
    def _check_geometry(self) -> "Scenario":
        step = self.map.step(self.a, self.b)
        lo, hi = self.f.domain
        if not (lo <= self.a and self.a + step <= hi):
            raise ValueError(f"[{self.a}, {self.a + step}] not inside domain {self.f.domain}")
        return self

    @property
    def q(self) -> float:
        return self.p / (self.p - 1.0)

    @property
    def step(self) -> float:
        return self.map.step(self.a, self.b)

    @property
    def end(self) -> float:
        return self.a + self.step

    def digest(self) -> str:
        payload = {
            "f": self.f.label,
            "a": self.a,
            "b": self.b,
            "alpha": self.alpha,
            "p": self.p,
            "h": self.h.label,
            "eta": self.map.eta.label,
            "lambda": self.map.lam,
            "quad": [self.quad_cfg.abs_tol, self.quad_cfg.rel_tol, self.quad_cfg.max_subdivisions],
        }
        return hashlib.sha256(orjson.dumps(payload)).hexdigest()[:16]

    def describe(self) -> str:
        return (f"f={self.f.label} [{_fmt(self.a)}, {_fmt(self.b)}] alpha={_fmt(self.alpha)} p={_fmt(self.p)} "
                f"h={self.h.label} eta={self.map.eta.label} lambda={_fmt(self.map.lam)}")


# ---------------------------------------------------------------------------
# certification
# ---------------------------------------------------------------------------

def certify_h_preinvex(
    g: Callable,
    h: HClass,
    map: InvexityMap,
    interval: Tuple[float, float],
    grid_n: int,
    extra_points: Iterable[float] = (),
    tol: float = settings.CERT_TOL,
) -> Certification:
    """Check g(u + t·λ·η(v,u)) ≤ h(1-t)g(u) + h(t)g(v) on a (u, v, t) grid.

    Only pairs with η(v, u) > 0 take part. A displaced point leaving the interval
    counts as a violation of size equal to its excursion.
    """
    if grid_n < 3:
        raise DomainError(f"grid_n must be >= 3, got {grid_n}")
    lo, hi = float(interval[0]), float(interval[1])
    if not lo < hi:
        raise DomainError(f"empty certification interval [{lo}, {hi}]")
    nodes = np.linspace(lo, hi, grid_n)
    extra = [float(x) for x in extra_points if lo <= float(x) <= hi]
    if extra:
        nodes = np.unique(np.concatenate([nodes, extra]))
    ts = np.linspace(0.0, 1.0, grid_n)

    U, V, T = np.meshgrid(nodes, nodes, ts, indexing="ij")
    eta = np.asarray(map.eta(V, U), dtype=float)
    mask = eta > 0.0
    if not mask.any():
        return Certification(holds=True, worst_violation=-math.inf, witness=None, points_checked=0)
    u, v, t, e = U[mask], V[mask], T[mask], eta[mask]
    x = u + t * map.lam * e

    gv = as_vectorized(g)
    inside = (x >= lo) & (x <= hi)
    excursion = np.where(x < lo, lo - x, x - hi)
    gx = np.full_like(x, np.nan)
    if inside.any():
        gx[inside] = gv(x[inside])
    gu = gv(u)
    gw = gv(v)
    rhs = h(1.0 - t) * gu + h(t) * gw
    diff = np.where(inside, gx - rhs, excursion)
    diff = np.where(np.isnan(diff), math.inf, diff)

    worst_idx = int(np.argmax(diff))
    worst = float(diff[worst_idx])
    return Certification(
        holds=bool(worst <= tol),
        worst_violation=worst,
        witness=(float(u[worst_idx]), float(v[worst_idx]), float(t[worst_idx])),
        points_checked=int(mask.sum()),
    )


CERT_TAGS: Tuple[str, ...] = ("d1", "d1q", "d2", "d2q")


def certification_target(s: Scenario, tag: str) -> Tuple[int, float]:
    """(derivative order, exponent) whose magnitude power the tag certifies."""
    if tag == "d1":
        return 1, 1.0
    if tag == "d1q":
        return 1, s.q
    if tag == "d2":
        return 2, 1.0
    if tag == "d2q":
        return 2, s.q
    raise DomainError(f"unknown certification tag {tag!r}")


def certification_interval(s: Scenario) -> Tuple[float, float]:
    pts = (s.a, s.b, s.end)
    return min(pts), max(pts)


def certify_scenario(s: Scenario, tags: Iterable[str] = CERT_TAGS, grid_n: Optional[int] = None) -> Scenario:
    """Return a copy of s whose ``certified`` set lists every tag that passed."""
    grid_n = grid_n or settings.CERT_GRID
    interval = certification_interval(s)
    passed = set()
    for tag in tags:
        order, q_exp = certification_target(s, tag)
        try:
            g = derivative_magnitude_power(s.f, order, q_exp)
        except UnavailableDerivativeError:
            continue
        cert = certify_h_preinvex(g, s.h, s.map, interval, grid_n, extra_points=(s.a, s.b))
        if cert.holds:
            passed.add(tag)
    return s.model_copy(update={"certified": frozenset(passed)})


# ---------------------------------------------------------------------------
# grammar
# ---------------------------------------------------------------------------

def _floats(body: str, text: str) -> Tuple[float, ...]:
    try:
        return tuple(float(x) for x in body.split(",") if x.strip() != "")
    except ValueError as exc:
        raise DomainError(f"cannot parse numbers in {text!r}") from exc


def parse_function_spec(text: str) -> FunctionSpec:
    kind, _, body = text.strip().partition(":")
    try:
        if kind == "poly":
            coeffs = _floats(body, text)
            if not coeffs:
                raise DomainError(f"poly needs at least one coefficient: {text!r}")
            return FunctionSpec(family=PolyFamily(coeffs=coeffs))
        if kind == "exp":
            return FunctionSpec(family=ExpScaledFamily(k=float(body)))
        if kind == "powabs":
            return FunctionSpec(family=PowerAbsFamily(k=float(body)))
    except ValueError as exc:
        if isinstance(exc, DomainError):
            raise
        raise DomainError(f"invalid function spec {text!r}: {exc}") from exc
    raise DomainError(f"unknown function family in {text!r}; expected poly:, exp: or powabs:")


def parse_hclass(text: str) -> HClass:
    kind, _, body = text.strip().partition(":")
    try:
        if kind == "id" and not body:
            return IdentityH()
        if kind == "one" and not body:
            return OneH()
        if kind == "pow":
            return PowerH(s=float(body))
        if kind == "tab":
            pairs = []
            for item in body.split(","):
                t, sep, v = item.partition("=")
                if not sep:
                    raise DomainError(f"tabulated knot {item!r} is not t=v")
                pairs.append((float(t), float(v)))
            return TabulatedH(points=tuple(pairs))
    except ValueError as exc:
        if isinstance(exc, DomainError):
            raise
        raise DomainError(f"invalid h class {text!r}: {exc}") from exc
    raise DomainError(f"unknown h class {text!r}; expected id, pow:s, one or tab:...")


def parse_eta(text: str) -> EtaKind:
    kind, _, body = text.strip().partition(":")
    try:
        if kind == "diff" and not body:
            return DifferenceEta()
        if kind == "affine":
            return AffineEta(c=float(body))
    except ValueError as exc:
        raise DomainError(f"invalid eta {text!r}: {exc}") from exc
    raise DomainError(f"unknown eta {text!r}; expected diff or affine:c")


def make_map(eta: str = "diff", lam: float = 1.0) -> InvexityMap:
    try:
        return InvexityMap(eta=parse_eta(eta), lam=lam)
    except ValueError as exc:
        if isinstance(exc, DomainError):
            raise
        raise DomainError(f"invalid lambda {lam}: must lie in (0, 1]") from exc


__all__ = [
    "IdentityH",
    "PowerH",
    "OneH",
    "TabulatedH",
    "HClass",
    "h_eval",
    "DifferenceEta",
    "AffineEta",
    "CustomEta",
    "InvexityMap",
    "displaced_point",
    "PolyFamily",
    "ExpScaledFamily",
    "PowerAbsFamily",
    "CustomFamily",
    "FunctionSpec",
    "derivative_magnitude_power",
    "Scenario",
    "certify_h_preinvex",
    "certify_scenario",
    "certification_interval",
    "CERT_TAGS",
    "parse_function_spec",
    "parse_hclass",
    "parse_eta",
    "make_map",
]
