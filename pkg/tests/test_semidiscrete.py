"""Reduced/full/box spatial forms against dense-matrix oracles (n <= 32)."""

import numpy as np
import pytest

from msint.errors import ReconstructionError, SingularOperatorError
from msint.gridops import GridSpec, average, forward_difference, spectral_derivative
from msint.model import grad_S, nonlinearity_A, nonlinearity_B
from msint.semidiscrete import (
    StateField,
    ZGridField,
    make_box_system,
    make_full_system,
    make_reduced_system,
    reconstruct_aux,
    reconstruct_aux_rate,
    residual_full,
    rhs_box,
    rhs_reduced,
    rhs_reduced_linearized,
    zero_state,
)
from msint.waves import traveling_residual

from conftest import smooth_random_state


def dense_rhs_reduced(state, system):
    """Assemble the reduced right-hand side with explicit n-by-n matrices."""
    cf = system.coeffs
    n = state.grid.n
    D = system.deriv.dense()
    eye = np.eye(n)
    nb = eye - cf.b * (D @ D)
    nd = eye - cf.d * (D @ D)
    a_nl = nonlinearity_A(state.eta, state.u, cf)
    b_nl = nonlinearity_B(state.eta, state.u, cf)
    eta_t = np.linalg.solve(nb, -D @ ((eye + cf.a * (D @ D)) @ state.u + a_nl))
    u_t = np.linalg.solve(nd, -D @ ((eye + cf.a * (D @ D)) @ state.eta + b_nl))
    return eta_t, u_t


def dense_residual_full(zfield, zdot, system):
    """Kronecker-product oracle for the full-form residual."""
    n = zfield.grid.n
    K = system.structure.time_matrix
    M = system.structure.space_matrix
    D = system.deriv.dense()
    big_k = np.kron(np.eye(n), K)
    big_m = np.kron(D, M)
    zvec = zfield.z.reshape(-1)
    zdvec = zdot.z.reshape(-1)
    grad = grad_S(zfield.z, system.coeffs).reshape(-1)
    return (big_k @ zdvec + big_m @ zvec - grad).reshape(n, 10)


class TestRhsReduced:
    def test_zero_state(self, benchmark_ms_coeffs, grid16):
        system = make_reduced_system(benchmark_ms_coeffs, grid16)
        out = rhs_reduced(zero_state(grid16), system)
        np.testing.assert_array_equal(out.eta, np.zeros(16))
        np.testing.assert_array_equal(out.u, np.zeros(16))

    def test_linear_single_mode(self):
        from msint.model import ModelCoefficients

        coeffs = ModelCoefficients(a=1.0 / 6.0, b=0.0, c=1.0 / 6.0, d=1.0 / 6.0)
        grid = GridSpec(0.0, 2.0 * np.pi, 64)
        system = make_reduced_system(coeffs, grid)
        s = grid.fundamental_wavenumber
        state = StateField(grid, np.cos(s * grid.nodes), np.zeros(64))
        out = rhs_reduced(state, system)
        np.testing.assert_allclose(out.eta, np.zeros(64), atol=1e-13)
        expected = s * (1.0 - coeffs.a * s**2) / (1.0 + coeffs.d * s**2) * np.sin(s * grid.nodes)
        np.testing.assert_allclose(out.u, expected, atol=1e-12)

    @pytest.mark.parametrize("seed", range(4))
    def test_matches_dense_oracle(self, generic_ms_coeffs, grid16, seed):
        system = make_reduced_system(generic_ms_coeffs, grid16)
        state = smooth_random_state(grid16, seed=seed, kill_kernel=False)
        out = rhs_reduced(state, system)
        eta_t, u_t = dense_rhs_reduced(state, system)
        np.testing.assert_allclose(out.eta, eta_t, atol=1e-12)
        np.testing.assert_allclose(out.u, u_t, atol=1e-12)

    def test_energy_orthogonality(self, generic_ms_coeffs, grid16):
        # the energy gradient is minus the zero-speed traveling residual
        system = make_reduced_system(generic_ms_coeffs, grid16)
        rng_seeds = range(100)
        for seed in rng_seeds:
            state = smooth_random_state(grid16, seed=seed, kill_kernel=False)
            vel = rhs_reduced(state, system)
            grad = traveling_residual(state, 0.0, generic_ms_coeffs, system.deriv)
            inner = -(grad.eta @ vel.eta + grad.u @ vel.u)
            grad_norm = np.sqrt(grad.eta @ grad.eta + grad.u @ grad.u)
            vel_norm = np.sqrt(vel.eta @ vel.eta + vel.u @ vel.u)
            assert abs(inner) <= 1e-10 * max(1.0, grad_norm * vel_norm)

    def test_linear_invariant_rates_vanish(self, benchmark_ms_coeffs, grid16):
        system = make_reduced_system(benchmark_ms_coeffs, grid16)
        for seed in range(10):
            state = smooth_random_state(grid16, seed=seed, kill_kernel=False)
            vel = rhs_reduced(state, system)
            assert abs(np.sum(vel.eta)) <= 1e-13 * max(1.0, np.max(np.abs(vel.eta)) * 16)
            assert abs(np.sum(vel.u)) <= 1e-13 * max(1.0, np.max(np.abs(vel.u)) * 16)


class TestMomentumLeak:
    def test_leak_formula_matches_gradient_pairing(self, generic_ms_coeffs, grid16):
        from msint.invariants import momentum_I_h, momentum_leak_rate

        system = make_reduced_system(generic_ms_coeffs, grid16)
        for seed in range(20):
            state = smooth_random_state(grid16, seed=seed, kill_kernel=False)
            vel = rhs_reduced(state, system)
            # d/dt I_h along the flow via the analytic gradient of I_h
            d2 = system.deriv
            grad_eta = state.eta - generic_ms_coeffs.b * d2.apply(state.eta, 2)
            grad_u = state.u - generic_ms_coeffs.d * d2.apply(state.u, 2)
            rate_via_gradient = grad_eta @ vel.eta + grad_u @ vel.u
            formula = momentum_leak_rate(state, generic_ms_coeffs, system.deriv)
            assert abs(rate_via_gradient - formula) <= 1e-11 * max(1.0, abs(formula))

    def test_leak_vanishes_for_symmetric_states(self, generic_ms_coeffs, grid16):
        from msint.invariants import momentum_leak_rate, quadratic_leak_rate
        from msint.waves import symmetric_random_field

        system = make_reduced_system(generic_ms_coeffs, grid16)
        for seed in range(10):
            state = symmetric_random_field(grid16, seed=seed, decay=0.4)
            assert abs(momentum_leak_rate(state, generic_ms_coeffs, system.deriv)) <= 1e-12
            assert abs(quadratic_leak_rate(state, generic_ms_coeffs, system.deriv)) <= 1e-12


class TestFullForm:
    def test_zero_residual_at_origin(self, benchmark_ms_coeffs, grid16):
        system = make_full_system(benchmark_ms_coeffs, grid16)
        z = ZGridField(grid16, np.zeros((16, 10)))
        res = residual_full(z, z.copy(), system)
        np.testing.assert_array_equal(res, np.zeros((16, 10)))

    @pytest.mark.parametrize("seed", range(3))
    def test_random_pair_matches_dense_oracle(self, generic_ms_coeffs, seed):
        grid = GridSpec(-1.0, 2.0, 8)
        system = make_full_system(generic_ms_coeffs, grid)
        rng = np.random.default_rng(seed)
        z = ZGridField(grid, rng.standard_normal((8, 10)))
        zd = ZGridField(grid, rng.standard_normal((8, 10)))
        res = residual_full(z, zd, system)
        oracle = dense_residual_full(z, zd, system)
        np.testing.assert_allclose(res, oracle, atol=1e-12)

    @pytest.mark.parametrize("coeffs_name", ["benchmark_ms_coeffs", "generic_ms_coeffs"])
    def test_reconstructed_pair_has_zero_residual(self, coeffs_name, grid16, request):
        coeffs = request.getfixturevalue(coeffs_name)
        system = make_full_system(coeffs, grid16)
        state = smooth_random_state(grid16, seed=11)
        vel = rhs_reduced(state, make_reduced_system(coeffs, grid16))
        z = reconstruct_aux(state, vel, system)
        accel_e = rhs_reduced_linearized(state, vel, make_reduced_system(coeffs, grid16))
        zd = reconstruct_aux_rate(state, vel, accel_e, system)
        res = residual_full(z, zd, system)
        assert np.max(np.abs(res)) <= 1e-10


class TestReconstruction:
    def test_zero_state(self, benchmark_ms_coeffs, grid16):
        system = make_full_system(benchmark_ms_coeffs, grid16)
        z = reconstruct_aux(zero_state(grid16), zero_state(grid16), system)
        np.testing.assert_array_equal(z.z, np.zeros((16, 10)))

    def test_single_mode_linear_state(self, grid64):
        from msint.model import ModelCoefficients

        coeffs = ModelCoefficients(a=0.0, b=1.0 / 6.0, c=0.0, d=1.0 / 6.0)
        system = make_full_system(coeffs, grid64)
        reduced = make_reduced_system(coeffs, grid64)
        s = grid64.fundamental_wavenumber
        state = StateField(grid64, 0.1 * np.cos(s * grid64.nodes), 0.05 * np.sin(s * grid64.nodes))
        vel = rhs_reduced(state, reduced)
        accel = rhs_reduced_linearized(state, vel, reduced)
        z = reconstruct_aux(state, vel, system)
        zd = reconstruct_aux_rate(state, vel, accel, system)
        assert np.max(np.abs(residual_full(z, zd, system))) <= 1e-11

    def test_mean_content_rejected(self, benchmark_ms_coeffs, grid16):
        system = make_full_system(benchmark_ms_coeffs, grid16)
        state = StateField(grid16, np.ones(16), np.zeros(16))
        with pytest.raises(ReconstructionError):
            reconstruct_aux(state, zero_state(grid16), system)

    def test_antiderivative_gauge_is_zero_mean(self, benchmark_ms_coeffs, grid16):
        system = make_full_system(benchmark_ms_coeffs, grid16)
        state = smooth_random_state(grid16, seed=4)
        vel = rhs_reduced(state, make_reduced_system(benchmark_ms_coeffs, grid16))
        z = reconstruct_aux(state, vel, system)
        assert abs(np.mean(z.z[:, 1])) <= 1e-13
        assert abs(np.mean(z.z[:, 6])) <= 1e-13
        np.testing.assert_allclose(system.deriv.apply(z.z[:, 1]), state.eta, atol=1e-12)


class TestBoxForm:
    def test_zero_state(self, benchmark_ms_coeffs):
        grid = GridSpec(0.0, 10.0, 15)
        system = make_box_system(benchmark_ms_coeffs, grid)
        out = rhs_box(zero_state(grid), system)
        np.testing.assert_array_equal(out.eta, np.zeros(15))

    def test_matches_dense_oracle(self, benchmark_ms_coeffs):
        grid = GridSpec(0.0, 10.0, 15)
        system = make_box_system(benchmark_ms_coeffs, grid)
        state = smooth_random_state(grid, seed=2, kill_kernel=False)
        out = rhs_box(state, system)

        cf = benchmark_ms_coeffs
        D = forward_difference(grid).dense()
        M = average(grid).dense()
        a_nl = nonlinearity_A(M @ state.eta, M @ state.u, cf)
        b_nl = nonlinearity_B(M @ state.eta, M @ state.u, cf)
        lhs_eta = M @ M @ M - cf.b * (D @ D @ M)
        lhs_u = M @ M @ M - cf.d * (D @ D @ M)
        rhs_eta = -(cf.a * (D @ D @ D) @ state.u + (M @ M @ D) @ state.u + (D @ M) @ a_nl)
        rhs_u = -(cf.a * (D @ D @ D) @ state.eta + (M @ M @ D) @ state.eta + (D @ M) @ b_nl)
        np.testing.assert_allclose(out.eta, np.linalg.solve(lhs_eta, rhs_eta), atol=1e-12)
        np.testing.assert_allclose(out.u, np.linalg.solve(lhs_u, rhs_u), atol=1e-12)

    def test_even_count_rejected(self, benchmark_ms_coeffs):
        grid = GridSpec(0.0, 10.0, 16)
        with pytest.raises(SingularOperatorError):
            make_box_system(benchmark_ms_coeffs, grid)
