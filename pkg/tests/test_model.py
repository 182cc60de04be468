import math

import numpy as np
import pytest
from pydantic import ValidationError

from neggamma.errors import DomainError
from neggamma.model import (
    C,
    GammaParams,
    PlanM1,
    PlanM2,
    TargetSpec,
    antithetic_log_cov,
    log_pair_cov_m2,
    m1_is_negative,
    m1_window,
    m2_is_negative,
    rho_m1,
    rho_m1_from_shapes,
    rho_m1_lower_bound,
    rho_m2,
    rho_m2_from_shapes,
    rho_m2_lower_bound,
    uniform_pair_corr,
)
from neggamma.stats import quad_1d, quad_2d


class TestAntitheticCovariance:
    def test_value(self):
        assert round(antithetic_log_cov(), 6) == -0.644934
        assert antithetic_log_cov() == C

    def test_matches_quadrature(self):
        value = quad_1d(lambda x: math.log(x) * math.log1p(-x), 0.0, 1.0) - 1.0
        assert value == pytest.approx(C, abs=1e-9)

    def test_matches_monte_carlo(self, stream):
        u = stream.uniforms(10**6)
        cov = np.cov(np.log(u), np.log1p(-u))[0, 1]
        assert abs(cov - C) < 0.005


class TestMethod1Correlation:
    @pytest.mark.parametrize(
        "alpha0, r, s, expected",
        [(0, 2, 3, -0.5266), (2, 5, 8, -0.1463), (7, 12, 18, -0.0339)],
    )
    def test_reference_values(self, alpha0, r, s, expected):
        assert rho_m1(alpha0, r, s) == pytest.approx(expected, abs=2e-4)

    def test_single_exponentials(self):
        assert rho_m1(0, 1, 1) == pytest.approx(C, abs=1e-15)

    def test_lower_bound(self):
        assert rho_m1_lower_bound(1, 1) == pytest.approx(-0.644934, abs=1e-6)
        assert rho_m1_lower_bound(2, 8) == pytest.approx(-0.322467, abs=1e-6)

    def test_lower_bound_is_alpha0_zero(self):
        for r in range(1, 21):
            for s in range(r, 21):
                assert rho_m1_lower_bound(r, s) == rho_m1(0, r, s)

    def test_shape_form_agrees(self):
        for alpha0 in (0.0, 0.5, 2.0, 7.0):
            for r in range(1, 13):
                for s in range(r, r + 7):
                    m, n = alpha0 + r, alpha0 + s
                    assert rho_m1_from_shapes(r, m, n) == pytest.approx(rho_m1(alpha0, r, s), abs=1e-12)

    def test_increases_with_alpha0_while_negative(self):
        for r in range(1, 10):
            alphas = np.linspace(0.0, -r * C, 40, endpoint=False)
            values = [rho_m1(a, r, r + 2) for a in alphas]
            assert all(v < 0 for v in values)
            assert all(b > a for a, b in zip(values, values[1:]))

    def test_sign_predicate(self):
        assert m1_is_negative(0, 1)
        assert not m1_is_negative(1, 1)
        assert m1_is_negative(2, 5)

    @pytest.mark.parametrize("args", [(-1, 1, 1), (0, 0, 1), (0, 3, 2)])
    def test_domain(self, args):
        with pytest.raises(DomainError):
            rho_m1(*args)

    def test_window(self):
        assert m1_window(2) == [2]
        assert m1_window(7) == [5, 6, 7]
        assert m1_window(19) == [12, 13, 14, 15, 16, 17, 18, 19]
        for m in range(1, 40):
            assert all(r <= m < r * (1 - C) for r in m1_window(m))


class TestMethod2Correlation:
    def test_reference_values(self):
        assert rho_m2(0, 4, 4, -1) == pytest.approx(-0.25, abs=1e-15)
        assert rho_m2(1, 6, 9, -0.945553) == pytest.approx(-0.05, abs=1e-4)
        assert rho_m2(0, 3, 5, 0) == 0.0

    def test_shape_form_agrees(self):
        for theta in (-1.0, -0.3, 0.0, 0.6):
            for r in range(1, 10):
                for alpha0 in (0.0, 1.0, 2.5):
                    s = r + 3
                    assert rho_m2_from_shapes(r, alpha0 + r, alpha0 + s, theta) == pytest.approx(
                        rho_m2(alpha0, r, s, theta), abs=1e-12
                    )

    def test_never_below_minus_quarter(self):
        for r in range(1, 15):
            for s in range(r, 20):
                for theta in (-1.0, -0.5):
                    assert rho_m2(0, r, s, theta) >= -0.25

    def test_lower_bound(self):
        assert rho_m2_lower_bound(7, 10) == pytest.approx(-0.0597, abs=1e-4)
        assert rho_m2_lower_bound(6, 6) == pytest.approx(-1 / 24, abs=1e-15)
        assert rho_m2_lower_bound(10**6, 10**6) == pytest.approx(-0.25, abs=1e-3)

    @pytest.mark.parametrize("m, n", [(5, 9), (7, 6)])
    def test_lower_bound_domain(self, m, n):
        with pytest.raises(DomainError):
            rho_m2_lower_bound(m, n)

    def test_sign_predicate(self):
        assert m2_is_negative(1, 6, -0.945553)
        assert not m2_is_negative(2, 6, -1)

    def test_theta_domain(self):
        with pytest.raises(DomainError):
            rho_m2(0, 1, 1, -1.5)
        with pytest.raises(DomainError):
            uniform_pair_corr(2)

    def test_uniform_pair_moments(self):
        assert uniform_pair_corr(-1) == pytest.approx(-1 / 3)
        assert log_pair_cov_m2(-0.8) == pytest.approx(-0.2)

    def test_log_pair_covariance_by_quadrature(self):
        theta = -0.8
        value = quad_2d(
            lambda x, y: math.log(x) * math.log(y) * (1 + theta * (1 - 2 * x) * (1 - 2 * y)),
            0.0, 1.0, lambda x: 0.0, lambda x: 1.0, tol=1e-10,
        ) - 1.0
        assert value == pytest.approx(log_pair_cov_m2(theta), abs=1e-7)


class TestModels:
    def test_gamma_params(self):
        params = GammaParams(rate=2.0, shape=3.0)
        assert params.mean == 1.5
        assert params.variance == 0.75
        assert params.cdf(0.0) == 0.0

    def test_target_is_normalized(self):
        spec = TargetSpec.normalized(10, 7, -0.05)
        assert (spec.m, spec.n, spec.swapped) == (7, 10, True)
        assert not TargetSpec.normalized(7, 10, -0.05).swapped

    @pytest.mark.parametrize("rho0", [0.0, 0.2, -1.0])
    def test_target_domain(self, rho0):
        with pytest.raises(DomainError):
            TargetSpec.normalized(7, 10, rho0)

    def test_plan_requires_r_not_above_s(self):
        with pytest.raises(ValidationError):
            PlanM1(r=4, s=3)

    def test_plan_theta_range(self):
        with pytest.raises(ValidationError):
            PlanM2(r=1, s=1, theta=-1.01)

    def test_plan_shapes_and_rate_neutrality(self):
        plan = PlanM1(r=5, s=8, alpha0=2.0)
        assert (plan.m, plan.n) == (7.0, 10.0)
        assert PlanM1(r=5, s=8, alpha0=2.0, rate=4.0).rho_theoretical == plan.rho_theoretical
        first, second = PlanM1(r=5, s=8, alpha0=2.0, rate=4.0).marginals()
        assert first.mean == pytest.approx(1.75)
        assert second.variance == pytest.approx(10 / 16)

    def test_plan_dump_carries_correlation(self):
        dumped = PlanM2(r=6, s=9, alpha0=1.0, theta=-0.945553).model_dump()
        assert dumped["rho_theoretical"] == pytest.approx(-0.05, abs=1e-4)

    def test_plan_sign(self):
        assert PlanM1(r=2, s=3).negative
        assert not PlanM1(r=1, s=1, alpha0=1.0).negative
        assert PlanM2(r=6, s=9, alpha0=1.0, theta=-0.945553).negative
        assert not PlanM2(r=2, s=4, alpha0=1.0, theta=-0.5).negative
