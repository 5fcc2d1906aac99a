"""
Unit tests for Gamma and incomplete Beta.
"""
import math
import sys
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

# Add parent to path
sys.path.append(str(Path(__file__).parent.parent.parent))

from src.common.errors import DomainError, SpecfunOverflowError
from src.common.schemas import QuadConfig
from src.numerics.quad import integrate
from src.numerics.specfun import complete_beta, gamma, incomplete_beta_lower, log_gamma


class TestGamma:
    """Gamma and log-Gamma values and domain handling."""

    def test_known_values(self):
        assert gamma(1.0).value == pytest.approx(1.0, rel=1e-14)
        assert gamma(5.0).value == pytest.approx(24.0, rel=1e-14)
        assert gamma(0.5).value == pytest.approx(math.sqrt(math.pi), rel=1e-12)

    def test_log_gamma_known_values(self):
        assert abs(log_gamma(1.0).value) < 1e-15
        assert abs(log_gamma(2.0).value) < 1e-15
        assert log_gamma(0.5).value == pytest.approx(0.5723649429247001, rel=1e-12)

    def test_log_gamma_past_overflow(self):
        # Γ(200) overflows a double but its logarithm does not
        assert log_gamma(200.0).value == pytest.approx(math.lgamma(200.0), rel=1e-13)

    @pytest.mark.parametrize("x", [0.0, -1.0, -0.5, float("nan")])
    def test_non_positive_rejected(self, x):
        with pytest.raises(DomainError):
            gamma(x)
        with pytest.raises(DomainError):
            log_gamma(x)

    def test_overflow(self):
        with pytest.raises(SpecfunOverflowError):
            gamma(172.0)

    @settings(max_examples=200, deadline=None)
    @given(st.floats(min_value=0.1, max_value=50.0))
    def test_recurrence(self, x):
        assert gamma(x + 1.0).value == pytest.approx(x * gamma(x).value, rel=1e-11)


class TestIncompleteBeta:
    """Lower unregularized incomplete Beta."""

    def test_known_values(self):
        assert incomplete_beta_lower(0.7, 1.0, 1.0).value == pytest.approx(0.7, rel=1e-12)
        assert incomplete_beta_lower(0.5, 2.0, 1.0).value == pytest.approx(0.125, rel=1e-12)
        assert incomplete_beta_lower(1.0, 2.0, 3.0).value == pytest.approx(1.0 / 12.0, rel=1e-12)

    def test_zero_endpoint(self):
        r = incomplete_beta_lower(0.0, 2.5, 0.7)
        assert r.value == 0.0
        assert r.abs_error_estimate == 0.0

    def test_full_interval_is_complete_beta(self):
        assert incomplete_beta_lower(1.0, 2.5, 0.7).value == pytest.approx(complete_beta(2.5, 0.7), rel=1e-12)

    @pytest.mark.parametrize("x,p,q", [(-0.1, 1.0, 1.0), (1.1, 1.0, 1.0), (0.5, 0.0, 1.0), (0.5, 1.0, -2.0)])
    def test_domain(self, x, p, q):
        with pytest.raises(DomainError):
            incomplete_beta_lower(x, p, q)

    def test_small_shape_closed_forms(self):
        # B_1(p, 2) = 1/(p(p+1)) and B_x(p, 1) = x^p/p
        assert incomplete_beta_lower(1.0, 0.01, 2.0).value == pytest.approx(1.0 / (0.01 * 1.01), rel=1e-9)
        assert incomplete_beta_lower(0.5, 0.02, 1.0).value == pytest.approx(0.5 ** 0.02 / 0.02, rel=1e-9)
        assert incomplete_beta_lower(0.8, 1.0, 0.02).value == pytest.approx((1.0 - 0.2 ** 0.02) / 0.02, rel=1e-9)

    @settings(max_examples=100, deadline=None)
    @given(st.floats(min_value=0.1, max_value=8.0), st.floats(min_value=0.1, max_value=8.0))
    def test_complete_symmetry(self, p, q):
        assert incomplete_beta_lower(1.0, p, q).value == pytest.approx(incomplete_beta_lower(1.0, q, p).value, rel=1e-11)

    @settings(max_examples=150, deadline=None)
    @given(
        st.floats(min_value=0.0, max_value=1.0),
        st.floats(min_value=0.1, max_value=8.0),
        st.floats(min_value=0.1, max_value=8.0),
    )
    def test_complement_split(self, x, p, q):
        # ∫_x^1 t^(p-1)(1-t)^(q-1) dt is B_{1-x}(q, p)
        full = incomplete_beta_lower(1.0, p, q).value
        lower = incomplete_beta_lower(x, p, q).value
        upper = incomplete_beta_lower(1.0 - x, q, p).value
        assert abs(lower + upper - full) <= 1e-11 * max(1.0, full)

    @settings(max_examples=60, deadline=None)
    @given(
        st.floats(min_value=0.0, max_value=1.0),
        st.floats(min_value=1.0, max_value=5.0),
        st.floats(min_value=1.0, max_value=5.0),
    )
    def test_agrees_with_quadrature(self, x, p, q):
        cfg = QuadConfig(abs_tol=1e-14, rel_tol=1e-13, max_subdivisions=4000)
        direct = integrate(lambda t: t ** (p - 1.0) * (1.0 - t) ** (q - 1.0), 0.0, x, cfg)
        assert abs(incomplete_beta_lower(x, p, q).value - direct.value) <= 1e-10

    @settings(max_examples=60, deadline=None)
    @given(
        st.floats(min_value=0.0, max_value=0.99),
        st.floats(min_value=0.01, max_value=0.99),
        st.floats(min_value=0.2, max_value=6.0),
        st.floats(min_value=0.2, max_value=6.0),
    )
    def test_monotone_in_x(self, x, dx, p, q):
        y = min(1.0, x + dx)
        lo = incomplete_beta_lower(x, p, q)
        hi = incomplete_beta_lower(y, p, q)
        assert lo.value <= hi.value + lo.abs_error_estimate + hi.abs_error_estimate
