import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lindblad_tunneling import (
    BathSpec,
    DimensionlessConfig,
    GaussianState,
    ModelParams,
    RegimeViolation,
    check_positivity_constraint,
    dimensional_to_dimensionless,
    dimensionless_to_dimensional,
    gibbs_constraint_satisfied,
    thermal_coefficients,
)


class TestThermalCoefficients:
    def test_zero_temperature(self):
        assert thermal_coefficients(1, 1, 0.5, 0, 1, 1.0) == (0.25, 0.25, 0.0)

    def test_theta_scales_linearly(self):
        assert thermal_coefficients(1, 1, 0.5, 0, 1, 2.0) == (0.5, 0.5, 0.0)

    def test_with_mu(self):
        assert thermal_coefficients(1, 1, 1.0, 0.5, 1, 1.0) == (0.75, 0.25, 0.0)

    def test_rejects_lam_not_above_mu(self):
        with pytest.raises(ValueError, match="lam > mu"):
            thermal_coefficients(1, 1, 0.5, 0.5, 1, 1.0)
        with pytest.raises(ValueError, match="lam > mu"):
            thermal_coefficients(1, 1, 0.3, 0.5, 1, 1.0)

    def test_rejects_theta_below_one(self):
        with pytest.raises(ValueError, match="theta"):
            thermal_coefficients(1, 1, 0.5, 0, 1, 0.9)

    @given(
        lam=st.floats(0.05, 5.0),
        frac=st.floats(0.0, 0.95),
        theta=st.floats(1.0, 50.0),
        m=st.floats(0.2, 5.0),
        omega=st.floats(0.2, 5.0),
    )
    @settings(max_examples=100)
    def test_outputs_positive_cross_zero(self, lam, frac, theta, m, omega):
        d_pp, d_qq, d_pq = thermal_coefficients(m, omega, lam, frac * lam, 1.0, theta)
        assert d_pp > 0 and d_qq > 0 and d_pq == 0.0


class TestPositivityConstraint:
    def test_equality_case_at_t0(self):
        d_pp, d_qq, d_pq = thermal_coefficients(1, 1, 0.5, 0, 1, 1.0)
        p = ModelParams(m=1, omega=1, lam=0.5, hbar=1, d_qq=d_qq, d_pp=d_pp, d_pq=d_pq)
        rep = check_positivity_constraint(p)
        assert rep.passed and rep.margin == 0.0

    def test_t0_with_mu_fails(self):
        d_pp, d_qq, d_pq = thermal_coefficients(1, 1, 1.0, 0.5, 1, 1.0)
        p = ModelParams(m=1, omega=1, lam=1.0, mu=0.5, d_qq=d_qq, d_pp=d_pp, d_pq=d_pq)
        rep = check_positivity_constraint(p)
        assert not rep.passed
        assert rep.margin == pytest.approx(-0.0625, abs=1e-15)

    def test_plain_numbers(self):
        p = ModelParams(m=1, omega=1, lam=1.0, d_qq=1.0, d_pp=1.0)
        rep = check_positivity_constraint(p)
        assert rep.passed and rep.margin == pytest.approx(0.75)

    @given(
        lam=st.floats(0.1, 3.0),
        frac=st.floats(0.0, 0.95),
        theta=st.floats(1.0, 20.0),
    )
    @settings(max_examples=200)
    def test_gibbs_pass_iff_algebraic_condition(self, lam, frac, theta):
        # for Gibbs coefficients the bound reduces to (lam^2-mu^2) theta^2 >= lam^2
        mu = frac * lam
        d_pp, d_qq, d_pq = thermal_coefficients(1, 1, lam, mu, 1, theta)
        p = ModelParams(m=1, omega=1, lam=lam, mu=mu, d_qq=d_qq, d_pp=d_pp, d_pq=d_pq)
        expected = (lam**2 - mu**2) * theta**2 >= lam**2
        got = check_positivity_constraint(p).passed
        if abs((lam**2 - mu**2) * theta**2 - lam**2) > 1e-12 * lam**2:
            assert got == expected

    def test_dimensionless_variant_matches(self):
        cfg = DimensionlessConfig(z=-3, v=-0.5, eps=0.5, r=0.5, gamma=0.0, theta=1.0)
        assert gibbs_constraint_satisfied(cfg)
        cfg2 = DimensionlessConfig(z=-3, v=-0.5, eps=1.0, r=0.5, gamma=0.5, theta=1.0)
        assert not gibbs_constraint_satisfied(cfg2)
        cfg3 = DimensionlessConfig(z=-3, v=-0.5, eps=0.4, r=0.5, gamma=0.5, theta=1.0)
        assert not gibbs_constraint_satisfied(cfg3)  # eps <= gamma: undefined


class TestModelParams:
    def test_rejects_nonpositive_core(self):
        with pytest.raises(ValueError):
            ModelParams(m=0, omega=1, lam=0.5)
        with pytest.raises(ValueError):
            ModelParams(m=1, omega=-1, lam=0.5)
        with pytest.raises(ValueError):
            ModelParams(m=1, omega=1, lam=-0.1)
        with pytest.raises(ValueError):
            ModelParams(m=1, omega=1, lam=0.5, d_qq=-1)

    def test_frictionless_limit_constructible(self):
        # the oracle limits (lam = 0, no diffusion) must stay usable
        p = ModelParams(m=1, omega=1, lam=0.0)
        assert not p.is_strictly_physical()

    def test_nu(self):
        p = ModelParams(m=1, omega=3.0, lam=0.5, mu=4.0)
        assert p.nu == pytest.approx(5.0)

    def test_with_thermal_coefficients(self):
        p = ModelParams(m=1, omega=1, lam=0.5).with_thermal_coefficients(2.0)
        assert (p.d_pp, p.d_qq, p.d_pq) == (0.5, 0.5, 0.0)
        assert p.is_strictly_physical()


class TestBathSpec:
    def test_zero_temperature_is_theta_one(self):
        assert BathSpec.from_temperature(0.0, omega=1.0).theta == 1.0

    def test_round_trip(self):
        spec = BathSpec.from_temperature(2.5, omega=1.3)
        assert spec.theta > 1
        assert spec.temperature(omega=1.3) == pytest.approx(2.5, rel=1e-12)

    def test_rejects_theta_below_one(self):
        with pytest.raises(ValueError):
            BathSpec(theta=0.99)


class TestDimensionlessConfig:
    def test_window_mu_zero(self):
        DimensionlessConfig(z=-3, v=-0.5, eps=0.5, r=0.5).check_window()
        with pytest.raises(RegimeViolation, match="window"):
            DimensionlessConfig(z=-3, v=-0.5, eps=1.2, r=0.5).check_window()

    def test_window_mu_nonzero(self):
        cfg = DimensionlessConfig(z=-3, v=-0.5, eps=1.1, r=0.5, gamma=0.8)
        cfg.check_window()  # 0.8 < 1.1 < sqrt(1.64)
        with pytest.raises(RegimeViolation):
            DimensionlessConfig(z=-3, v=-0.5, eps=0.7, r=0.5, gamma=0.8).check_window()
        with pytest.raises(RegimeViolation):
            DimensionlessConfig(z=-3, v=-0.5, eps=1.3, r=0.5, gamma=0.8).check_window()

    def test_window_edges_excluded_with_margin(self):
        with pytest.raises(RegimeViolation):
            DimensionlessConfig(z=-3, v=-0.5, eps=1.0 - 1e-12, r=0.5).check_window()

    def test_constructor_validation(self):
        with pytest.raises(ValueError):
            DimensionlessConfig(z=-3, v=-0.5, eps=0.5, r=0.0)
        with pytest.raises(ValueError):
            DimensionlessConfig(z=-3, v=-0.5, eps=0.5, r=0.5, theta=0.5)
        with pytest.raises(ValueError):
            DimensionlessConfig(z=-3, v=-0.5, eps=0.5, r=0.5, gamma=-0.1)

    def test_g(self):
        cfg = DimensionlessConfig(z=-1, v=0, eps=0.5, r=0.5, gamma=0.0)
        assert cfg.g == 1.0


class TestDimensionlessMapping:
    def test_reference_values(self, fig1_config):
        params, s0 = dimensionless_to_dimensional(fig1_config)
        assert s0.sigma_qq == pytest.approx(2.0, rel=1e-15)
        assert s0.sigma_pp == pytest.approx(0.125, rel=1e-15)
        assert s0.sigma_q == pytest.approx(-3 * math.sqrt(2), rel=1e-15)
        assert s0.sigma_p == pytest.approx(1.5 * math.sqrt(2), rel=1e-15)
        assert s0.sigma_pq == 0.0
        assert params.lam == 0.5
        assert (params.d_pp, params.d_qq) == (0.25, 0.25)

    def test_z_zero_zeroes_first_moments(self):
        cfg = DimensionlessConfig(z=0.0, v=-0.7, eps=0.5, r=1.0)
        _, s0 = dimensionless_to_dimensional(cfg)
        assert s0.sigma_q == 0.0 and s0.sigma_p == 0.0
        assert s0.sigma_qq == pytest.approx(0.5, rel=1e-15)

    @given(
        z=st.floats(-9.0, -0.2),
        v=st.floats(-2.0, 1.0),
        eps=st.floats(0.05, 0.95),
        r=st.floats(0.1, 1.5),
        theta=st.floats(1.0, 10.0),
        m=st.floats(0.3, 3.0),
        omega=st.floats(0.3, 3.0),
    )
    @settings(max_examples=150)
    def test_round_trip_identity(self, z, v, eps, r, theta, m, omega):
        cfg = DimensionlessConfig(z=z, v=v, eps=eps, r=r, gamma=0.0, theta=theta)
        params, s0 = dimensionless_to_dimensional(cfg, m=m, omega=omega)
        back = dimensional_to_dimensionless(params, s0)
        for name in ("z", "v", "eps", "r", "gamma", "theta"):
            assert getattr(back, name) == pytest.approx(
                getattr(cfg, name), rel=1e-12, abs=1e-12
            )

    @given(
        r=st.floats(0.05, 2.0),
        m=st.floats(0.3, 3.0),
        omega=st.floats(0.3, 3.0),
        hbar=st.floats(0.5, 2.0),
    )
    @settings(max_examples=100)
    def test_minimum_uncertainty_product_exact(self, r, m, omega, hbar):
        cfg = DimensionlessConfig(z=-1.0, v=-0.5, eps=0.5, r=r)
        _, s0 = dimensionless_to_dimensional(cfg, m=m, omega=omega, hbar=hbar)
        assert s0.sigma_qq * s0.sigma_pp == pytest.approx(hbar**2 / 4, rel=1e-14)

    def test_window_enforced_by_default(self):
        cfg = DimensionlessConfig(z=-3, v=-0.5, eps=1.2, r=0.5)
        with pytest.raises(RegimeViolation):
            dimensionless_to_dimensional(cfg)
        params, _ = dimensionless_to_dimensional(cfg, check_window=False)
        assert params.lam == pytest.approx(1.2)

    def test_non_gibbs_coefficients_rejected_on_inversion(self):
        params = ModelParams(m=1, omega=1, lam=0.5, d_qq=0.25, d_pp=0.25, d_pq=0.1)
        s0 = GaussianState.minimum_uncertainty(-1.0, 0.5, 0.5)
        with pytest.raises(ValueError, match="Gibbs"):
            dimensional_to_dimensionless(params, s0)
