import math
from fractions import Fraction

import numpy as np
import pytest

from flrwlab.errors import DomainError, RegimeError
from flrwlab.exponents import (
    abbicco_rate,
    beta_critical,
    beta_star,
    d_exponent,
    fujita_effective,
    fujita_exponent,
    linear_rate,
    q_bar,
    q_sharp,
    r_of_q,
    strauss_classic,
    strauss_generalized,
    theorem1_rate,
    theorem2_beta_threshold,
    theorem2_rate,
)

ELL_GRID = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]
N_GRID = list(range(1, 9))


def brute_positive_root(a, b, c):
    # independent oracle: numpy polynomial roots
    roots = np.roots([a, b, c])
    real = [r.real for r in roots if abs(r.imag) < 1e-12 and r.real > 0]
    assert len(real) == 1
    return real[0]


class TestFujita:
    def test_values(self):
        assert fujita_exponent(2.0) == 2.0
        assert fujita_exponent(2 * (1 - 2 / 3)) == pytest.approx(4.0, abs=1e-14)
        assert fujita_exponent(1.0) == 3.0

    def test_domain(self):
        with pytest.raises(DomainError):
            fujita_exponent(0.0)
        with pytest.raises(DomainError):
            fujita_exponent(-1.0)


class TestStrauss:
    def test_generalized_examples(self):
        # 3p^2 - 5p - 2 = 0 has positive root 2
        assert strauss_generalized(2, 0.0, 2.0) == pytest.approx(2.0, abs=1e-14)
        # classical Strauss in 3d: p^2 - 2p - 1 = 0
        assert strauss_generalized(3, 0.0, 0.0) == pytest.approx(1 + math.sqrt(2), abs=1e-14)

    def test_generalized_vs_brute_roots(self):
        for n in N_GRID:
            for ell in ELL_GRID:
                for beta in [0.5, 1.0, 1.5, 2.0, 3.0, 10.0]:
                    a = n - 1 + (beta - ell) / (1 - ell)
                    if a <= 0:
                        continue
                    b = -(n + 1 + (beta + 3 * ell) / (1 - ell))
                    expected = brute_positive_root(a, b, -2.0)
                    assert strauss_generalized(n, ell, beta) == pytest.approx(
                        expected, rel=1e-12)

    def test_critical_identity(self):
        # p_S(n, ell, beta_c(n, ell)) = p_F(n (1-ell))
        for n in N_GRID:
            for ell in ELL_GRID:
                lhs = strauss_generalized(n, ell, beta_critical(n, ell))
                rhs = fujita_exponent(n * (1 - ell))
                assert abs(lhs - rhs) < 1e-12

    def test_classic_examples(self):
        assert strauss_classic(2.0) == pytest.approx((3 + math.sqrt(17)) / 2, abs=1e-14)
        assert strauss_classic(3.0) == pytest.approx(1 + math.sqrt(2), abs=1e-14)
        with pytest.raises(DomainError):
            strauss_classic(1.0)

    def test_classic_beta_star_identity(self):
        for n in N_GRID:
            assert abs(strauss_classic(n + beta_star(n)) - fujita_exponent(n)) < 1e-12

    def test_monotone_in_beta(self):
        for n in [1, 2, 3, 5]:
            for ell in [0.0, 0.3, 0.6]:
                betas = np.linspace(1.0, 8.0, 30)
                vals = [strauss_generalized(n, ell, b) for b in betas]
                assert all(x > y for x, y in zip(vals, vals[1:]))

    def test_regime_error(self):
        # n=1, ell=0, beta=0 gives leading coefficient 0
        with pytest.raises(RegimeError):
            strauss_generalized(1, 0.0, 0.0)


class TestBetaThresholds:
    def test_beta_star_values(self):
        assert beta_star(2) == pytest.approx(2.0)
        assert beta_star(1) == pytest.approx(4 / 3)
        assert beta_star(3) == pytest.approx(14 / 5)

    def test_beta_critical_values(self):
        assert beta_critical(2, 0.0) == pytest.approx(2.0, abs=1e-14)
        assert beta_critical(2, 2 / 3) == pytest.approx(1.5, abs=1e-13)

    def test_beta_critical_closed_forms_agree(self):
        for n in N_GRID:
            for ell in ELL_GRID:
                one = 1 - ell
                p_c = 1 + 2 / (n * one)
                form1 = ell + one * (n + 1 - 2 / p_c)
                form2 = (n**2 * one**2 + n * one * (1 + 2 * ell) + 2) / (2 + n * one)
                assert beta_critical(n, ell) == pytest.approx(form1, abs=1e-12)
                assert form1 == pytest.approx(form2, abs=1e-12)

    def test_theorem2_threshold_example(self):
        # at ell = 2/3 the threshold reads (1/3)(2 + 5n/3)
        for n in [2, 3, 4]:
            assert theorem2_beta_threshold(n, 2 / 3) == pytest.approx(
                (2 + 5 * n / 3) / 3, abs=1e-13)


class TestQIndices:
    def test_q_sharp(self):
        assert q_sharp(3) == pytest.approx(4.0)
        with pytest.raises(DomainError):
            q_sharp(1)

    def test_q_bar(self):
        assert q_bar(2, 0.0) == pytest.approx(2.0, abs=1e-14)
        assert q_bar(3, 0.0) == pytest.approx(2.0, abs=1e-14)

    def test_r_of_q(self):
        assert r_of_q(3, 4.0) == pytest.approx(4 / 3, abs=1e-14)
        assert r_of_q(2, 6.0) == pytest.approx(6 / 5, abs=1e-14)
        with pytest.raises(DomainError):
            r_of_q(2, 1.5)

    def test_qbar_fixed_point(self):
        # p_c * r(q_bar) = q_bar wherever q_bar >= 2
        for n in N_GRID:
            for ell in ELL_GRID:
                qb = q_bar(n, ell)
                if qb < 2:
                    continue
                p_c = fujita_effective(n, ell)
                assert abs(p_c * r_of_q(n, qb) - qb) < 1e-12

    def test_d_exponent_values(self):
        assert d_exponent(4 / 3, 4.0, 3) == pytest.approx(1.0, abs=1e-14)
        # direct substitution: both branches at n=1 give 1 - 0 - 1/2
        assert d_exponent(1.0, 2.0, 1) == pytest.approx(0.5, abs=1e-14)
        with pytest.raises(DomainError):
            d_exponent(3.0, 2.0, 2)

    def test_d_exponent_branch_agreement(self):
        for n in [1, 2, 3, 5]:
            for q in [2.0, 3.0, 6.0]:
                qp = q / (q - 1)
                lhs = n / qp - (n - 1) / 2 - 1 / q
                rhs = 1 / qp + (n - 1) / 2 - n / q
                assert lhs == pytest.approx(rhs, abs=1e-12)
                assert d_exponent(qp, q, n) == pytest.approx(lhs, abs=1e-12)

    def test_d_of_r_of_q_is_one(self):
        for n in range(2, 9):
            for q in np.linspace(2.0, q_sharp(n), 17):
                assert abs(d_exponent(r_of_q(n, q), q, n) - 1.0) < 1e-12

    def test_crucial_remark_threshold(self):
        # r(q) p_c < q_sharp for all q in [p_c, q_sharp] iff ell < 1 - (n-1)/(2n)
        for n in [2, 3, 4, 5]:
            thr = 1 - (n - 1) / (2 * n)
            for ell in [thr - 0.05, thr + 0.05]:
                if not (0 <= ell < 1):
                    continue
                p_c = fujita_effective(n, ell)
                qs = q_sharp(n)
                # r is increasing in q, so the binding check is at q_sharp;
                # sample within r_of_q's domain [2, q_sharp]
                qss = np.linspace(max(2.0, min(p_c, qs)), qs, 33)
                holds = all(r_of_q(n, q) * p_c < qs - 1e-12 for q in qss)
                assert holds == (ell < thr)


class TestLinearRate:
    def test_case_iii_example(self):
        pred = linear_rate(1, 0.5, 3.0, 2.0)
        assert pred.case_tag == "PropLq-iii"
        assert pred.t_exponent == pytest.approx(-0.25, abs=1e-14)
        assert pred.log_power == 0.0

    def test_case_i_example(self):
        pred = linear_rate(1, 0.5, 1.1, 6.0)
        assert pred.case_tag == "PropLq-i"
        assert pred.t_exponent == pytest.approx(-0.3, abs=1e-13)

    def test_case_ii_at_exact_threshold(self):
        n, q, k = 1, 6, 0
        ell = Fraction(1, 2)
        beta = ell + 2 * n * (1 - ell) * (1 - Fraction(1, q)) + 2 * k * (1 - ell)
        assert beta == Fraction(4, 3)
        pred = linear_rate(n, ell, beta, q, k)
        assert pred.case_tag == "PropLq-ii"
        assert pred.log_power == pytest.approx(1 - 1 / q)

    def test_case_ii_float_threshold(self):
        n, ell, q, k = 2, 0.25, 4.0, 0.0
        beta = ell + 2 * n * (1 - ell) * (1 - 1 / q)
        pred = linear_rate(n, ell, beta, q, k, m=2.0)
        assert pred.case_tag == "PropLq-ii"

    def test_boundary_consistency(self):
        # at the case boundary the case-i and case-iii t-exponents coincide
        for n in [1, 2, 3]:
            for ell in [0.0, 0.25, 0.5, 2 / 3]:
                for q in [2.0, 4.0, 6.0]:
                    for k in [0.0, 0.5]:
                        beta = ell + 2 * n * (1 - ell) * (1 - 1 / q) + 2 * k * (1 - ell)
                        lhs = (ell - beta) / 2
                        rhs = (ell - 1) * (n * (1 - 1 / q) + k)
                        assert lhs == pytest.approx(rhs, abs=1e-12)

    def test_hk_branch(self):
        pred = linear_rate(2, 0.5, 10.0, 2, k=2.0)
        assert pred.case_tag == "PropLq-iii"
        # (ell - 1)(n/2 + k) = -0.5 * 3
        assert pred.t_exponent == pytest.approx(-1.5, abs=1e-14)

    def test_q_infinity(self):
        pred = linear_rate(1, 0.5, 5.0, math.inf)
        assert pred.case_tag == "PropLq-iii"
        assert pred.t_exponent == pytest.approx(-0.5)

    def test_regime_and_domain_errors(self):
        with pytest.raises(RegimeError):
            linear_rate(1, 0.5, 1.0, 2.0)
        with pytest.raises(RegimeError):
            linear_rate(1, 0.5, 0.5, 2.0)
        with pytest.raises(DomainError):
            linear_rate(1, 0.5, 3.0, 1.5)
        with pytest.raises(DomainError):
            # m too small for n=2, q=inf, k=0
            linear_rate(2, 0.5, 3.0, math.inf)
        with pytest.raises(DomainError):
            linear_rate(1, 0.5, 3.0, 6.0, m=0.5)


class TestTheorem1Rate:
    def test_above_threshold(self):
        pred = theorem1_rate(2, 0.0, 3.0, 2.0)
        assert pred.case_tag == "Thm1-a"
        assert pred.t_exponent == pytest.approx(-1.0, abs=1e-14)

    def test_intermediate_band(self):
        eps = 0.01
        pred = theorem1_rate(2, 0.0, 2.0, 6.0, eps=eps)
        assert pred.case_tag == "Thm1-b"
        assert pred.t_exponent == pytest.approx(eps - 4 / 3, abs=1e-13)

    def test_variants_differ_only_for_positive_ell(self):
        pa = theorem1_rate(2, 0.0, 2.0, 6.0, variant="as_printed")
        pb = theorem1_rate(2, 0.0, 2.0, 6.0, variant="tau_consistent")
        assert pa.t_exponent == pytest.approx(pb.t_exponent, abs=1e-14)
        pa = theorem1_rate(2, 0.25, 2.0, 6.0, variant="as_printed")
        pb = theorem1_rate(2, 0.25, 2.0, 6.0, variant="tau_consistent")
        assert pa.t_exponent != pytest.approx(pb.t_exponent, abs=1e-3)
        # tau_consistent: (eps - (n-1)(1/2 - 1/q))(1-ell) - (beta-ell)/2
        assert pb.t_exponent == pytest.approx((0 - 1 / 3) * 0.75 - 1.75 / 2, abs=1e-13)
        assert pa.t_exponent == pytest.approx((0 - 1 / 3) * 0.75 - 1.75 / 1.5, abs=1e-13)

    def test_continuity_in_q_at_pc(self):
        n, ell, beta = 2, 0.0, 3.5
        p_c = fujita_effective(n, ell)
        vals = [theorem1_rate(n, ell, beta, q).t_exponent
                for q in [p_c, p_c + 1e-9]]
        assert vals[0] == pytest.approx(vals[1], abs=1e-7)

    def test_below_threshold_raises(self):
        with pytest.raises(RegimeError):
            theorem1_rate(2, 0.0, 1.5, 2.0)


class TestTheorem2Rate:
    def test_l2_example(self):
        pred = theorem2_rate(2, 2 / 3, 2.0, "L2")
        assert pred.case_tag == "Thm2-L2"
        assert pred.t_exponent == pytest.approx(-1 / 3, abs=1e-14)

    def test_hk_third_branch_via_kbar(self):
        # k_bar(2, 2/3, 2) = 1 < k = 5/3 selects the (ell-beta)/2 branch
        from flrwlab.params import DerivedSymbols
        sym = DerivedSymbols.from_params(2, 2 / 3, 2.0)
        k = 1 + 2 * (2 / 3) / 2
        assert sym.k_bar == pytest.approx(1.0, abs=1e-14)
        assert sym.k_bar < k
        pred = theorem2_rate(2, 2 / 3, 2.0, "Hk")
        assert pred.case_tag == "Thm2-Hk-c"
        assert pred.t_exponent == pytest.approx(-2 / 3, abs=1e-14)

    def test_hk_log_branch_at_equality(self):
        n, ell = 2, Fraction(2, 3)
        k = 1 + n * ell / 2
        beta = ell + n * (1 - ell) + 2 * k * (1 - ell)
        pred = theorem2_rate(n, ell, beta, "Hk", k=k)
        assert pred.case_tag == "Thm2-Hk-b"
        assert pred.log_power == 0.5

    def test_hypotheses_enforced(self):
        with pytest.raises(RegimeError):
            theorem2_rate(1, 0.5, 3.0, "L2")
        with pytest.raises(RegimeError):
            theorem2_rate(3, 0.1, 10.0, "L2")  # ell too small for n=3
        with pytest.raises(RegimeError):
            theorem2_rate(2, 2 / 3, 1.0, "L2")  # beta below threshold
        # relaxed evaluation still returns the closed form
        pred = theorem2_rate(1, 0.5, 3.0, "L2", enforce_hypotheses=False)
        assert pred.t_exponent == pytest.approx(-0.25)


class TestAbbiccoRate:
    def test_first_branch(self):
        pred = abbicco_rate(2, 4.0, 2.0)
        assert pred.case_tag == "Abbicco-a"
        assert pred.t_exponent == pytest.approx(-1.0, abs=1e-14)

    def test_second_branch(self):
        eps = 0.0
        pred = abbicco_rate(2, 2.0, 6.0, eps)
        assert pred.case_tag == "Abbicco-b"
        assert pred.t_exponent == pytest.approx(-4 / 3, abs=1e-13)

    def test_boundary_uses_second_branch(self):
        n, q = 2, 6
        mu = n + 1 - Fraction(2, q)
        pred = abbicco_rate(n, mu, q)
        assert pred.case_tag == "Abbicco-b"

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            abbicco_rate(2, 1.5, 2.0)
        with pytest.raises(DomainError):
            abbicco_rate(2, 4.0, 8.0)
        with pytest.raises(DomainError):
            abbicco_rate(3, 4.0, 5.0)
