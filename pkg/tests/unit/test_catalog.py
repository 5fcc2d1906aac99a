"""
Unit tests for kernel weights, identities, bounds, corollary constants and reductions.
"""
import math
import sys
from pathlib import Path

import numpy as np
import pytest

# Add parent to path
sys.path.append(str(Path(__file__).parent.parent.parent))

from src.common.errors import CertificationMissingError, DomainError, MissingParameterError
from src.common.schemas import QuadConfig
from src.inequalities.catalog import (
    CorollaryId,
    InequalityId,
    classical_trapezoid_gap,
    corollary_constant,
    eval_inequality,
    h_integral,
    identity_lhs,
    lemma_residual,
    reduction_check,
    signed_root,
    theorem_coefficient,
    triangle_chain,
    w1_one_closed,
    w2_one_closed,
    weight_integral_W1,
    weight_integral_W2,
)
from src.inequalities.funclasses import (
    IdentityH,
    OneH,
    PowerH,
    Scenario,
    TabulatedH,
    certify_scenario,
    make_map,
    parse_function_spec,
    parse_hclass,
)
from src.numerics.quad import integrate

TIGHT = QuadConfig(abs_tol=1e-13, rel_tol=1e-12, max_subdivisions=4000)


def square_scenario(**kw):
    base = dict(f=parse_function_spec("poly:0,0,1"), a=0.0, b=1.0, alpha=1.0)
    base.update(kw)
    return certify_scenario(Scenario(**base))


class TestKernelWeights:
    """W1, W2 and ∫h."""

    def test_w1_values(self):
        assert weight_integral_W1(OneH(), 1.0).value == pytest.approx(0.5, abs=1e-10)
        assert weight_integral_W1(IdentityH(), 1.0).value == pytest.approx(0.25, abs=1e-10)
        assert weight_integral_W1(IdentityH(), 2.0).value == pytest.approx(0.25, abs=1e-10)

    def test_w2_values(self):
        assert weight_integral_W2(OneH(), 1.0).value == pytest.approx(1.0 / 6.0, abs=1e-10)
        assert weight_integral_W2(IdentityH(), 1.0).value == pytest.approx(1.0 / 12.0, abs=1e-10)
        assert weight_integral_W2(PowerH(s=1.0), 1.0).value == pytest.approx(1.0 / 12.0, abs=1e-10)

    def test_h_integral(self):
        assert h_integral(PowerH(s=0.5)).value == pytest.approx(2.0 / 3.0, abs=1e-10)
        assert h_integral(TabulatedH(points=((0.0, 0.0), (0.5, 1.0), (1.0, 0.0)))).value == pytest.approx(0.5, abs=1e-12)

    def test_closed_forms_match(self):
        for alpha in (0.3, 1.0, 2.7):
            assert weight_integral_W1(OneH(), alpha, TIGHT).value == pytest.approx(w1_one_closed(alpha), abs=1e-11)
            assert weight_integral_W2(OneH(), alpha, TIGHT).value == pytest.approx(w2_one_closed(alpha), abs=1e-11)

    def test_reflected_h_sum(self):
        # W1 and W2 kernels are symmetric in t <-> 1-t, so h and its mirror image
        # together weigh the kernel by h(t) + h(1-t)
        h = TabulatedH(points=((0.0, 0.1), (0.3, 0.9), (1.0, 0.4)))
        mirror = TabulatedH(points=((0.0, 0.4), (0.7, 0.9), (1.0, 0.1)))
        alpha = 0.7
        total = weight_integral_W1(h, alpha, TIGHT).value + weight_integral_W1(mirror, alpha, TIGHT).value
        direct = integrate(
            lambda t: np.abs((1.0 - t) ** alpha - t ** alpha) * (h(t) + h(1.0 - t)),
            0.0, 1.0, TIGHT.with_breakpoints(0.3, 0.5, 0.7),
        ).value
        assert total == pytest.approx(direct, abs=1e-10)
        assert (weight_integral_W2(h, alpha, TIGHT).value
                == pytest.approx(weight_integral_W2(mirror, alpha, TIGHT).value, abs=1e-10))

    def test_w1_one_vanishes_at_both_ends(self):
        assert weight_integral_W1(OneH(), 0.01, TIGHT).value < 0.01
        assert weight_integral_W1(OneH(), 50.0, TIGHT).value == pytest.approx(2.0 / 51.0, rel=1e-9)
        values = [weight_integral_W1(OneH(), a, TIGHT).value for a in np.linspace(0.05, 6.0, 12)]
        assert max(values) < 0.52

    def test_alpha_domain(self):
        with pytest.raises(DomainError):
            weight_integral_W1(OneH(), 0.0)
        with pytest.raises(DomainError):
            theorem_coefficient(InequalityId.T3_6, OneH(), 1.0, p=1.0)


class TestIdentities:
    """Both fractional identities."""

    def test_first_order_square(self):
        s = square_scenario()
        assert identity_lhs(s).value == pytest.approx(1.0 / 3.0, abs=1e-9)
        assert lemma_residual(1, s) <= 1e-9

    def test_second_order_square(self):
        assert lemma_residual(2, square_scenario()) <= 1e-9

    def test_cubic_fractional(self):
        s = Scenario(f=parse_function_spec("poly:0,0,0,1"), a=0.5, b=2.0, alpha=0.5)
        assert lemma_residual(1, s) <= 1e-7
        assert lemma_residual(2, s) <= 1e-7

    def test_constant_function(self):
        s = Scenario(f=parse_function_spec("poly:3"), a=0.0, b=2.0, alpha=0.7)
        assert abs(identity_lhs(s).value) <= 1e-12
        assert lemma_residual(1, s) <= 1e-12

    def test_invariant_under_matching_reparametrization(self):
        # same a and same λ·η(b, a): the identity sees the same interval
        f = parse_function_spec("exp:0.5")
        s1 = Scenario(f=f, a=0.0, b=1.0, alpha=1.3)
        s2 = Scenario(f=f, a=0.0, b=0.5, alpha=1.3, map=make_map("affine:2", 1.0))
        assert identity_lhs(s1).value == pytest.approx(identity_lhs(s2).value, abs=1e-12)
        assert lemma_residual(1, s2) <= 1e-8
        assert lemma_residual(2, s2) <= 1e-8


class TestEvalInequality:
    """Bounds on single scenarios."""

    def test_worked_first_order(self):
        r = eval_inequality(InequalityId.T3_2, square_scenario())
        assert r.lhs == pytest.approx(1.0 / 3.0, abs=1e-9)
        assert r.rhs == pytest.approx(0.5, abs=1e-9)
        assert r.margin == pytest.approx(1.0 / 6.0, abs=1e-9)
        assert r.holds
        assert any("lambda-model" in n for n in r.notes)

    def test_worked_second_order(self):
        r = eval_inequality(InequalityId.T3_15, square_scenario(h=OneH()))
        assert r.lhs == pytest.approx(1.0 / 3.0, abs=1e-9)
        assert r.rhs == pytest.approx(2.0 / 3.0, abs=1e-9)
        assert r.holds

    def test_constant_function_all_bounds(self):
        s = certify_scenario(Scenario(f=parse_function_spec("poly:2"), a=0.0, b=1.0, alpha=0.5))
        for id in (InequalityId.T3_2, InequalityId.T3_6, InequalityId.T3_10,
                   InequalityId.T3_15, InequalityId.T3_19, InequalityId.T3_23):
            r = eval_inequality(id, s)
            assert r.holds
            assert r.lhs <= 1e-12

    def test_missing_certificate(self):
        s = Scenario(f=parse_function_spec("poly:0,0,1"), a=0.0, b=1.0, alpha=1.0)
        with pytest.raises(CertificationMissingError):
            eval_inequality(InequalityId.T3_2, s)
        r = eval_inequality(InequalityId.T3_2, s, waive=True)
        assert r.waived
        assert "certification waived" in r.notes

    @pytest.mark.parametrize("alpha", [0.4, 1.0, 2.5])
    def test_printed_statement_ratio(self, alpha):
        s = square_scenario(f=parse_function_spec("exp:1"), alpha=alpha, p=3.0, h=PowerH(s=0.5))
        final = eval_inequality(InequalityId.T3_19, s)
        printed = eval_inequality(InequalityId.T3_19_printed, s)
        assert printed.rhs / final.rhs == pytest.approx(alpha + 1.0, rel=1e-10)
        assert "generic-h binding: header class read as the displayed h" in final.notes

    @pytest.mark.parametrize("f,h,alpha", [
        ("poly:0,0,1", "id", 1.0),
        ("exp:1", "one", 0.5),
        ("poly:1,1,1,1", "pow:0.5", 2.5),
    ])
    def test_triangle_chain(self, f, h, alpha):
        s = square_scenario(f=parse_function_spec(f), h=parse_hclass(h), alpha=alpha, a=0.5, b=2.0)
        chain = triangle_chain(s)
        slack = chain.error + 1e-9
        assert chain.lhs <= chain.middle + slack
        assert chain.middle <= chain.rhs + slack

    @pytest.mark.parametrize("a,b,expected", [(0.0, 1.0, 1.0 / 3.0), (1.0, 3.0, 4.0 / 3.0)])
    def test_trapezoid_gap_square(self, a, b, expected):
        r = classical_trapezoid_gap(parse_function_spec("poly:0,0,1"), a, b)
        assert r.converged
        assert r.value == pytest.approx(expected, abs=1e-10)
        with pytest.raises(DomainError):
            classical_trapezoid_gap(parse_function_spec("poly:0,0,1"), b, a)


class TestCorollaryConstants:
    """Printed closed forms."""

    def test_examples(self):
        assert corollary_constant(CorollaryId.C3_3, 1.0) == pytest.approx(7.0 / 24.0, abs=1e-15)
        assert corollary_constant(CorollaryId.C3_5, 1.0) == pytest.approx(0.5, abs=1e-15)
        assert corollary_constant(CorollaryId.C3_18, 1.0) == pytest.approx(1.0 / 6.0, abs=1e-15)
        assert corollary_constant(CorollaryId.C3_16, 1.0) == pytest.approx(1.0 / 12.0, abs=1e-15)

    def test_hand_computed_s_cases(self):
        # α = 1, s = 1: B_{1/2}(2, 1) = 1/8
        assert corollary_constant(CorollaryId.C3_17, 1.0, s=1.0) == pytest.approx(1.0 / 16.0, abs=1e-12)
        # α = s: the incomplete Beta terms cancel
        third = (1.0 - 2.0 ** -1.0) / 2.0
        assert corollary_constant(CorollaryId.C3_4, 0.5, s=0.5) == pytest.approx(third, abs=1e-12)

    def test_missing_parameters(self):
        with pytest.raises(MissingParameterError):
            corollary_constant(CorollaryId.C3_4, 1.0)
        with pytest.raises(MissingParameterError):
            corollary_constant(CorollaryId.C3_7, 1.0)
        with pytest.raises(DomainError):
            corollary_constant(CorollaryId.C3_8, 1.0, s=1.5, p=2.0)
        with pytest.raises(DomainError):
            corollary_constant(CorollaryId.C3_9, 1.0, p=0.5)

    def test_signed_root(self):
        assert signed_root(-8.0, 1.0 / 3.0) == pytest.approx(-2.0)
        assert signed_root(4.0, 0.5) == pytest.approx(2.0)


class TestReductions:
    """α = 1 and φ = 0 specializations."""

    def test_alpha_one_exact_entries(self):
        rep = reduction_check("alpha_one", square_scenario(h=OneH()))
        by_label = {e.label: e for e in rep.entries}
        assert by_label["T3.15/C3.18"].discrepancy <= 1e-10
        assert by_label["T3.2/C3.5"].discrepancy <= 1e-10
        assert len(rep.entries) == 18

    def test_phi_zero_identities(self):
        s = square_scenario(f=parse_function_spec("exp:1"), alpha=0.6, map=make_map("diff", 0.5))
        rep = reduction_check("phi_zero", s)
        assert not rep.inconsistent
        assert [e.label for e in rep.entries] == ["lemma order 1", "lemma order 2"]

    def test_both_matches_trapezoid(self):
        s = square_scenario(f=parse_function_spec("exp:1"), alpha=2.0, map=make_map("affine:0.5", 0.5))
        rep = reduction_check("both", s)
        assert not rep.inconsistent
        trap = [e for e in rep.entries if e.label == "trapezoid"][0]
        # classical gap of e^x on [0, 1]
        expected = abs(1.0 + math.e - 2.0 * (math.e - 1.0))
        assert trap.closed_form == pytest.approx(expected, abs=1e-10)
        assert trap.within

    def test_unknown_kind(self):
        with pytest.raises(DomainError):
            reduction_check("alpha_two", square_scenario())
