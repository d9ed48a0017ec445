"""Dispersion maps: closed forms, operator remappings, measured frequencies."""

import numpy as np
import pytest

from msint.dispersion import (
    DispersionDomainError,
    box_conjugacy_check,
    continuous_omega,
    imr_time_map,
    imr_time_map_inverse,
    measure_frequency,
    mode_step_matrix,
    semidiscrete_mode_frequency,
    spatial_wavenumber_map,
)
from msint.errors import MeasurementError
from msint.gridops import GridSpec
from msint.integrate import SchemeConfig
from msint.model import ModelCoefficients
from msint.semidiscrete import make_box_system, make_reduced_system


@pytest.fixture
def bbm_like():
    return ModelCoefficients(a=0.0, b=1.0 / 6.0, c=0.0, d=1.0 / 6.0)


class TestContinuousOmega:
    def test_zero_wavenumber(self, bbm_like):
        assert continuous_omega(0.0, bbm_like) == (0.0, 0.0)

    def test_bd_sixth(self, bbm_like):
        plus, minus = continuous_omega(1.0, bbm_like)
        assert plus == pytest.approx(6.0 / 7.0, rel=1e-14)
        assert minus == pytest.approx(-6.0 / 7.0, rel=1e-14)

    def test_ac_sixth(self):
        coeffs = ModelCoefficients(a=1.0 / 6.0, b=0.0, c=1.0 / 6.0, d=0.0)
        plus, _ = continuous_omega(1.0, coeffs)
        assert plus == pytest.approx(7.0 / 6.0, rel=1e-14)

    def test_odd_function(self, bbm_like):
        k = np.linspace(0.1, 3.0, 7)
        plus_pos, _ = continuous_omega(k, bbm_like)
        plus_neg, _ = continuous_omega(-k, bbm_like)
        np.testing.assert_allclose(plus_neg, -plus_pos, rtol=1e-14)


class TestSpatialMap:
    def test_zero_mode_all_kinds(self):
        for kind in ("spectral", "central", "imr_space"):
            assert spatial_wavenumber_map(0.0, kind, 0.5) == 0.0

    def test_central_value(self):
        # xi*h = pi/2 at h = 0.5
        assert spatial_wavenumber_map(np.pi, "central", 0.5) == pytest.approx(2.0)

    def test_spectral_identity(self):
        xi = np.linspace(-3.0, 3.0, 11)
        np.testing.assert_array_equal(spatial_wavenumber_map(xi, "spectral", 0.25), xi)

    def test_imr_space_pole(self):
        with pytest.raises(DispersionDomainError):
            spatial_wavenumber_map(np.pi / 0.5, "imr_space", 0.5)

    def test_odd_and_consistent_smallness(self):
        h = 0.1
        xi = np.linspace(0.05, 1.0, 9)
        for kind in ("central", "imr_space"):
            k = spatial_wavenumber_map(xi, kind, h)
            k_neg = spatial_wavenumber_map(-xi, kind, h)
            np.testing.assert_allclose(k_neg, -k, rtol=1e-13)
            np.testing.assert_allclose(k, xi, atol=np.max(xi**3) * h**2)


class TestTimeMap:
    def test_zero(self):
        assert imr_time_map(0.0, 0.1) == 0.0

    def test_quarter_period(self):
        dt = 0.2
        assert imr_time_map(np.pi / (2.0 * dt), dt) == pytest.approx(2.0 / dt, rel=1e-13)

    def test_round_trip(self):
        dt = 0.3
        big = np.linspace(-3.0, 3.0, 41) / dt * (dt / 1.05)  # stay inside the pole
        back = imr_time_map_inverse(imr_time_map(big, dt), dt)
        np.testing.assert_allclose(back, big, atol=1e-14 * np.max(np.abs(big)))

    def test_pole(self):
        with pytest.raises(DispersionDomainError):
            imr_time_map(np.pi / 0.1, 0.1)


class TestBoxConjugacy:
    def test_origin(self, bbm_like):
        assert box_conjugacy_check(0.0, 0.0, 0.5, 0.1, bbm_like) == 0.0

    def test_constructed_pair(self, bbm_like):
        h, dt = 0.5, 0.1
        xi = 0.8
        k_eff = (2.0 / h) * np.tan(xi / 2.0)
        omega, _ = continuous_omega(k_eff, bbm_like)
        big_omega = 2.0 * np.arctan(0.5 * dt * omega)
        assert abs(box_conjugacy_check(xi, big_omega, h, dt, bbm_like)) <= 1e-12

    def test_mismatched_pair(self, bbm_like):
        assert abs(box_conjugacy_check(0.8, 0.5, 0.5, 0.1, bbm_like)) > 1e-3

    def test_pole(self, bbm_like):
        with pytest.raises(DispersionDomainError):
            box_conjugacy_check(np.pi, 0.1, 0.5, 0.1, bbm_like)


class TestMeasureFrequency:
    def test_zero_mode(self, bbm_like):
        grid = GridSpec(0.0, 2.0 * np.pi, 64)
        system = make_reduced_system(bbm_like, grid)
        config = SchemeConfig(dt=0.1)
        assert measure_frequency(system, config, 0) == pytest.approx(0.0, abs=1e-14)

    def test_spectral_mode_one(self, bbm_like):
        grid = GridSpec(0.0, 2.0 * np.pi, 64)
        system = make_reduced_system(bbm_like, grid)
        config = SchemeConfig(dt=0.1)
        measured = measure_frequency(system, config, 1)
        predicted = imr_time_map_inverse(6.0 / 7.0, config.dt)
        assert abs(measured - predicted) <= 1e-10

    @pytest.mark.parametrize("operator", ["spectral", "central"])
    @pytest.mark.parametrize("mode", [1, 3, 7, 13])
    def test_modes_match_remapped_prediction(self, bbm_like, operator, mode):
        grid = GridSpec(-10.0, 20.0, 64)
        system = make_reduced_system(bbm_like, grid, operator)
        config = SchemeConfig(dt=0.08, operator=operator)
        xi = grid.fundamental_wavenumber * mode
        k = spatial_wavenumber_map(xi, operator, grid.h)
        omega, _ = continuous_omega(k, bbm_like)
        predicted = imr_time_map_inverse(omega, config.dt)
        measured = measure_frequency(system, config, mode)
        assert abs(measured - predicted) <= 1e-8

    def test_halving_dt_converges_to_continuous(self, bbm_like):
        grid = GridSpec(0.0, 2.0 * np.pi, 64)
        system = make_reduced_system(bbm_like, grid)
        omega = 6.0 / 7.0
        errors = []
        for dt in (0.2, 0.1, 0.05):
            measured = measure_frequency(system, SchemeConfig(dt=dt), 1)
            errors.append(abs(measured - omega))
        assert errors[1] == pytest.approx(errors[0] / 4.0, rel=0.05)
        assert errors[2] == pytest.approx(errors[1] / 4.0, rel=0.05)

    def test_box_scheme_frequency_matches_conjugacy(self, bbm_like):
        grid = GridSpec(0.0, 16.0, 31)
        system = make_box_system(bbm_like, grid)
        config = SchemeConfig(dt=0.05, scheme="preissman_box")
        mode = 2
        xi_h = 2.0 * np.pi * mode / grid.n
        measured = measure_frequency(system, config, mode, steps=16)
        residual = box_conjugacy_check(xi_h, measured * config.dt, grid.h, config.dt, bbm_like)
        assert abs(residual) <= 1e-8

    def test_nonlinear_system_rejected(self, benchmark_ms_coeffs, grid64):
        system = make_reduced_system(benchmark_ms_coeffs, grid64)
        with pytest.raises(MeasurementError):
            measure_frequency(system, SchemeConfig(dt=0.1), 1)

    def test_group_velocity_sign_preserved(self, bbm_like):
        grid = GridSpec(-10.0, 20.0, 64)
        config = SchemeConfig(dt=0.05)
        system = make_reduced_system(bbm_like, grid)
        s = grid.fundamental_wavenumber
        modes = np.arange(1, 15)
        measured = np.array([measure_frequency(system, config, int(p)) for p in modes])
        omega_exact = np.array([continuous_omega(s * p, bbm_like)[0] for p in modes])
        d_measured = np.diff(measured)
        d_exact = np.diff(omega_exact)
        assert np.all(np.sign(d_measured) == np.sign(d_exact))

    def test_no_parasitic_roots(self, bbm_like, grid64):
        system = make_reduced_system(bbm_like, grid64)
        for p in range(1, 32):
            eigenvalues = np.linalg.eigvals(mode_step_matrix(system, 0.1, p))
            assert eigenvalues.shape == (2,)
            np.testing.assert_allclose(np.abs(eigenvalues), 1.0, atol=1e-12)

    def test_semidiscrete_frequency_matches_closed_form_spectral(self, bbm_like, grid64):
        system = make_reduced_system(bbm_like, grid64)
        s = grid64.fundamental_wavenumber
        for p in (1, 4, 9):
            omega, _ = continuous_omega(s * p, bbm_like)
            assert semidiscrete_mode_frequency(system, p) == pytest.approx(omega, rel=1e-13)
