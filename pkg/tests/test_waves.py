"""Traveling-wave profiles and standard analytic fields (desk-scale grids)."""

import numpy as np
import pytest

from msint.gridops import GridSpec, spectral_derivative
from msint.invariants import energy_E_h, momentum_I_h
from msint.integrate import SchemeConfig, run
from msint.model import ModelCoefficients
from msint.semidiscrete import StateField, make_reduced_system, rhs_reduced, zero_state
from msint.waves import (
    SolitaryWaveSpec,
    gaussian_field,
    plane_wave_field,
    refine_to_discrete_wave,
    solve_profile,
    spectral_translate,
    standard_fields,
    symmetric_random_field,
    traveling_residual,
)

from conftest import smooth_random_state

# desk-size domain: long enough for c_s = 1.2 profiles to decay
GRID = GridSpec(-64.0, 128.0, 1024)


@pytest.fixture(scope="module")
def csw(benchmark_module_coeffs):
    return solve_profile(SolitaryWaveSpec(1.2, GRID), benchmark_module_coeffs)


@pytest.fixture(scope="module")
def benchmark_module_coeffs():
    return ModelCoefficients(
        a=0.0, b=1.0 / 6.0, c=0.0, d=1.0 / 6.0,
        alpha11=0.0, alpha12=0.46, alpha22=0.0,
        beta11=0.23, beta12=0.0, beta22=0.73,
    )


class TestTravelingResidual:
    def test_zero_state(self, benchmark_ms_coeffs, grid16):
        d = spectral_derivative(grid16)
        res = traveling_residual(zero_state(grid16), 1.2, benchmark_ms_coeffs, d)
        np.testing.assert_array_equal(res.eta, np.zeros(16))
        np.testing.assert_array_equal(res.u, np.zeros(16))

    def test_equals_minus_gradient_of_energy_momentum_combination(self, generic_ms_coeffs, grid16):
        # independent oracle: central finite differences of E_h + c_s I_h
        d = spectral_derivative(grid16)
        speed = 1.37
        state = smooth_random_state(grid16, seed=21, kill_kernel=False)

        def functional(eta, u):
            s = StateField(grid16, eta, u)
            return energy_E_h(s, generic_ms_coeffs, d) + speed * momentum_I_h(s, generic_ms_coeffs, d)

        res = traveling_residual(state, speed, generic_ms_coeffs, d)
        step = 1e-6
        for j in range(0, 16, 5):
            bump = np.zeros(16)
            bump[j] = step
            fd_eta = (functional(state.eta + bump, state.u) - functional(state.eta - bump, state.u)) / (2 * step)
            fd_u = (functional(state.eta, state.u + bump) - functional(state.eta, state.u - bump)) / (2 * step)
            assert -fd_eta == pytest.approx(res.eta[j], abs=1e-7)
            assert -fd_u == pytest.approx(res.u[j], abs=1e-7)

    def test_converged_profile_residual(self, csw, benchmark_module_coeffs):
        d = spectral_derivative(GRID)
        res = traveling_residual(csw.state, 1.2, benchmark_module_coeffs, d)
        assert max(np.max(np.abs(res.eta)), np.max(np.abs(res.u))) <= 1e-10


class TestSolveProfile:
    def test_csw_classification_and_symmetry(self, csw):
        assert csw.classification == "csw"
        assert csw.residual <= 1e-10
        np.testing.assert_allclose(csw.state.eta, csw.state.eta[::-1], atol=1e-9)
        np.testing.assert_allclose(csw.state.u, csw.state.u[::-1], atol=1e-9)

    def test_csw_monotone_decay_outside_core(self, csw):
        eta = csw.state.eta
        center = np.argmax(eta)
        right = eta[center : center + 400]
        assert np.all(np.diff(right) <= 1e-12)

    def test_gsw_classification(self):
        coeffs = ModelCoefficients(
            a=1.0 / 6.0, b=0.0, c=1.0 / 6.0, d=0.0,
            alpha11=0.0, alpha12=0.46, alpha22=0.0,
            beta11=0.23, beta12=0.0, beta22=0.73,
        )
        wave = solve_profile(SolitaryWaveSpec(1.3, GRID), coeffs)
        assert wave.classification == "gsw"
        assert wave.tail_amplitude > 1e-8 * np.max(np.abs(wave.state.eta))

    def test_speed_zero_rejected(self):
        with pytest.raises(ValueError):
            SolitaryWaveSpec(0.0, GRID)

    def test_short_domain_warns(self, benchmark_module_coeffs):
        small = GridSpec(-4.0, 8.0, 64)
        with pytest.warns(UserWarning):
            try:
                solve_profile(SolitaryWaveSpec(1.2, small, max_newton=3), benchmark_module_coeffs)
            except Exception:
                pass

    def test_translation_property(self, csw, benchmark_module_coeffs):
        # advance in time; the profile should move by speed * t with its shape kept
        system = make_reduced_system(benchmark_module_coeffs, GRID)
        t_end = 10.0
        result = run(csw.state, system, SchemeConfig(dt=0.025), t_end=t_end, sample_every=1000)
        final = result.final_state
        correlation = np.real(
            np.fft.ifft(np.fft.fft(final.eta) * np.conj(np.fft.fft(csw.state.eta)))
        )
        peak = int(np.argmax(correlation))
        # parabolic refinement of the circular correlation peak
        left, mid, right = (
            correlation[(peak - 1) % GRID.n],
            correlation[peak],
            correlation[(peak + 1) % GRID.n],
        )
        frac = 0.5 * (left - right) / (left - 2.0 * mid + right)
        shift = ((peak + frac) * GRID.h + 0.5 * GRID.length) % GRID.length - 0.5 * GRID.length
        assert abs(shift - 1.2 * t_end) <= 2.0 * GRID.h
        recentered = spectral_translate(final.eta, GRID, -shift)
        assert np.max(np.abs(recentered - csw.state.eta)) <= 1e-4

    def test_relative_equilibrium_rate(self, csw, benchmark_module_coeffs):
        # d/dt (E_h + c_s I_h) along the flow vanishes at the profile
        system = make_reduced_system(benchmark_module_coeffs, GRID)
        d = system.deriv
        vel = rhs_reduced(csw.state, system)
        grad = traveling_residual(csw.state, 1.2, benchmark_module_coeffs, d)
        rate = -(grad.eta @ vel.eta + grad.u @ vel.u)
        scale = max(
            1.0,
            np.sqrt(grad.eta @ grad.eta + grad.u @ grad.u)
            * np.sqrt(vel.eta @ vel.eta + vel.u @ vel.u),
        )
        assert abs(rate) <= 1e-10 * scale


class TestDiscreteWaveRefinement:
    def test_refined_map_residual_small(self, csw, benchmark_module_coeffs):
        system = make_reduced_system(benchmark_module_coeffs, GRID)
        refined, residual = refine_to_discrete_wave(csw.state, 1.2, system, dt=0.1)
        assert residual <= 5e-12
        # refined wave stays close to the semi-discrete profile
        assert np.max(np.abs(refined.eta - csw.state.eta)) <= 1e-2

    def test_refined_wave_translates_exactly(self, csw, benchmark_module_coeffs):
        from msint.integrate import imr_step_reduced

        system = make_reduced_system(benchmark_module_coeffs, GRID)
        dt = 0.1
        refined, _ = refine_to_discrete_wave(csw.state, 1.2, system, dt=dt)
        config = SchemeConfig(dt=dt, fp_tol=1e-14, fp_max_iters=300)
        stepped, _ = imr_step_reduced(refined, system, config)
        back = spectral_translate(stepped.eta, GRID, -1.2 * dt)
        assert np.max(np.abs(back - refined.eta)) <= 1e-11


class TestStandardFields:
    def test_zero_gaussian(self, grid16):
        field = gaussian_field(grid16, 0.0, 2.0)
        np.testing.assert_array_equal(field.eta, np.zeros(16))

    def test_plane_wave_mode_one(self):
        grid = GridSpec(0.0, 2.0 * np.pi, 32)
        field = plane_wave_field(grid, 1, 1.0)
        np.testing.assert_allclose(field.eta, np.cos(grid.nodes), atol=1e-14)
        np.testing.assert_array_equal(field.u, np.zeros(32))

    def test_symmetric_random_exact_symmetry(self, grid16):
        field = symmetric_random_field(grid16, seed=7, decay=0.5)
        np.testing.assert_array_equal(field.eta, field.eta[::-1])
        np.testing.assert_array_equal(field.u, field.u[::-1])

    def test_symmetric_random_kills_nonlinear_leak(self, benchmark_ms_coeffs, grid16):
        from msint.invariants import momentum_leak_rate

        d = spectral_derivative(grid16)
        field = symmetric_random_field(grid16, seed=7, decay=0.5)
        assert abs(momentum_leak_rate(field, benchmark_ms_coeffs, d)) <= 1e-12

    def test_factory_dispatch(self, grid16):
        assert standard_fields("gaussian", grid16, amplitude=0.1, width=2.0).eta.max() > 0.0
        assert standard_fields("plane_wave", grid16, mode=1, amplitude=1.0).eta.shape == (16,)
        with pytest.raises(ValueError):
            standard_fields("vortex", grid16)

    def test_invalid_parameters(self, grid16):
        with pytest.raises(ValueError):
            gaussian_field(grid16, 1.0, -1.0)
        with pytest.raises(ValueError):
            symmetric_random_field(grid16, seed=0, decay=0.0)
