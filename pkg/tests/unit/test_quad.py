"""
Unit tests for adaptive Gauss–Kronrod quadrature and the power-kernel integrator.
"""
import math
import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

# Add parent to path
sys.path.append(str(Path(__file__).parent.parent.parent))

from src.common.errors import DomainError, InvalidIntervalError
from src.common.schemas import QuadConfig
from src.numerics.quad import as_vectorized, integrate, integrate_power_kernel

TIGHT = QuadConfig(abs_tol=1e-13, rel_tol=1e-12, max_subdivisions=4000)


class TestIntegrate:
    """Plain adaptive integration."""

    def test_constant(self):
        r = integrate(lambda t: np.ones_like(t), 0.0, 1.0)
        assert r.converged
        assert abs(r.value - 1.0) <= 1e-12

    def test_kink_with_breakpoint(self):
        r = integrate(lambda t: np.abs(1.0 - 2.0 * t), 0.0, 1.0, QuadConfig().with_breakpoints(0.5))
        assert r.converged
        assert abs(r.value - 0.5) <= 1e-12
        assert r.subdivisions == 0

    def test_inverse_sqrt_singularity(self):
        r = integrate(lambda t: t ** -0.5, 0.0, 1.0)
        assert r.converged
        assert abs(r.value - 2.0) <= 1e-8

    def test_scalar_only_callable(self):
        r = integrate(math.exp, 0.0, 1.0)
        assert abs(r.value - (math.e - 1.0)) <= 1e-12

    def test_empty_interval(self):
        r = integrate(math.exp, 2.0, 2.0)
        assert r.value == 0.0
        assert r.converged

    def test_reversed_interval_rejected(self):
        with pytest.raises(InvalidIntervalError):
            integrate(math.exp, 1.0, 0.0)

    def test_breakpoint_outside_rejected(self):
        with pytest.raises(InvalidIntervalError):
            integrate(math.exp, 0.0, 1.0, QuadConfig().with_breakpoints(1.5))

    def test_non_convergence_is_flagged(self):
        r = integrate(lambda t: 1.0 / t, 0.0, 1.0, QuadConfig(max_subdivisions=50))
        assert not r.converged
        assert r.subdivisions <= 50

    @settings(max_examples=60, deadline=None)
    @given(st.floats(min_value=-3.0, max_value=3.0), st.floats(min_value=-3.0, max_value=3.0))
    def test_linearity(self, c1, c2):
        f = np.sin
        g = np.exp
        combined = integrate(lambda t: c1 * f(t) + c2 * g(t), 0.0, 2.0)
        rf = integrate(f, 0.0, 2.0)
        rg = integrate(g, 0.0, 2.0)
        bound = (combined.abs_error_estimate + abs(c1) * rf.abs_error_estimate
                 + abs(c2) * rg.abs_error_estimate + 1e-12)
        assert abs(combined.value - (c1 * rf.value + c2 * rg.value)) <= bound

    @settings(max_examples=60, deadline=None)
    @given(st.floats(min_value=0.01, max_value=0.99))
    def test_additivity(self, c):
        f = lambda t: np.cos(3.0 * t) + t ** 2
        whole = integrate(f, 0.0, 1.0)
        left = integrate(f, 0.0, c)
        right = integrate(f, c, 1.0)
        bound = 2.0 * (whole.abs_error_estimate + left.abs_error_estimate + right.abs_error_estimate) + 1e-12
        assert abs(whole.value - (left.value + right.value)) <= bound


class TestPowerKernel:
    """Integrals of |x-t|^(α-1) g(t)."""

    def test_left_constant(self):
        ones = lambda t: np.ones_like(t)
        assert abs(integrate_power_kernel(ones, 1.0, 0.0, 0.5, "left").value - 2.0) <= 1e-10
        assert abs(integrate_power_kernel(ones, 1.0, 0.0, 2.0, "left").value - 0.5) <= 1e-10

    def test_left_linear(self):
        r = integrate_power_kernel(lambda t: t, 1.0, 0.0, 0.5, "left")
        assert abs(r.value - 4.0 / 3.0) <= 1e-10

    def test_right_mirror(self):
        ones = lambda t: np.ones_like(t)
        assert abs(integrate_power_kernel(ones, 0.0, 1.0, 0.5, "right").value - 2.0) <= 1e-10

    def test_argument_checks(self):
        ones = lambda t: np.ones_like(t)
        with pytest.raises(DomainError):
            integrate_power_kernel(ones, 1.0, 0.0, 0.0, "left")
        with pytest.raises(InvalidIntervalError):
            integrate_power_kernel(ones, 0.0, 1.0, 0.5, "left")
        with pytest.raises(InvalidIntervalError):
            integrate_power_kernel(ones, 1.0, 0.0, 0.5, "right")
        with pytest.raises(DomainError):
            integrate_power_kernel(ones, 1.0, 0.0, 0.5, "middle")

    @pytest.mark.parametrize("alpha", [0.3, 0.5, 0.8])
    def test_substitution_matches_truncated_kernel(self, alpha):
        # naive integration stopped eps short of the singularity, plus the
        # analytic tail g(1)·eps^α/α
        g = lambda t: np.cos(t) + t
        eps = 1e-6
        cfg = QuadConfig(abs_tol=1e-9, rel_tol=1e-9, max_subdivisions=4000)
        naive = integrate(lambda t: (1.0 - t) ** (alpha - 1.0) * g(t), 0.0, 1.0 - eps, cfg)
        tail = float(g(np.array([1.0]))[0]) * eps ** alpha / alpha
        smooth = integrate_power_kernel(g, 1.0, 0.0, alpha, "left", TIGHT)
        assert abs(smooth.value - (naive.value + tail)) <= 1e-4


class TestVectorized:
    """as_vectorized wrapper."""

    def test_constant_closure_broadcasts(self):
        f = as_vectorized(lambda t: 3.0)
        out = f(np.array([0.0, 0.5, 1.0]))
        assert out.shape == (3,)
        assert np.all(out == 3.0)

    def test_numpy_function_passes_through(self):
        x = np.linspace(0.0, 1.0, 5)
        assert np.allclose(as_vectorized(np.exp)(x), np.exp(x))
