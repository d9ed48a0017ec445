"""Self-contained invariant gate battery (backs the ``check`` subcommand).

Every check is a desk-scale verification pitting the production FFT paths
against dense-matrix brute force, or asserting a structural identity the
discretization is supposed to carry.  Each returns the measured defect and the
bound it must stay under.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import model
from .gridops import GridSpec, central_difference, parity_singularity_report, reversal, spectral_derivative
from .integrate import (
    SchemeConfig,
    TangentPair,
    imr_step_full_with_midpoint,
    imr_step_reduced,
    tangent_step,
)
from .invariants import (
    energy_E_h,
    frak_I_h,
    linear_invariants,
    local_law_residuals_exact,
    momentum_I_h,
    total_symplecticity,
)
from .model import ModelCoefficients
from .semidiscrete import (
    StateField,
    ZGridField,
    make_full_system,
    make_reduced_system,
    reconstruct_aux,
    reconstruct_aux_rate,
    residual_full,
    rhs_reduced,
    rhs_reduced_linearized,
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    bound: float

    @property
    def passed(self) -> bool:
        return self.value <= self.bound


def _test_coeffs() -> ModelCoefficients:
    return ModelCoefficients(
        a=0.05, b=0.2, c=0.05, d=0.3,
        alpha11=0.11, alpha12=0.46, alpha22=0.15,
        beta11=0.23, beta12=0.30, beta22=0.73,
    )


def _smooth_state(grid: GridSpec, seed: int, scale=0.3, kill_kernel=True) -> StateField:
    rng = np.random.default_rng(seed)
    n = grid.n
    modes = np.abs(np.fft.fftfreq(n, 1.0 / n))
    filt = np.exp(-0.4 * modes)

    def draw():
        spec = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) * filt
        if kill_kernel:
            spec[0] = 0.0
            if n % 2 == 0:
                spec[n // 2] = 0.0
        vals = np.real(np.fft.ifft(spec))
        return scale * vals / max(1e-12, np.max(np.abs(vals)))

    return StateField(grid, draw(), draw())


def _dense_rhs_defect(grid, coeffs) -> float:
    system = make_reduced_system(coeffs, grid)
    worst = 0.0
    for seed in range(3):
        state = _smooth_state(grid, seed, kill_kernel=False)
        out = rhs_reduced(state, system)
        D = system.deriv.dense()
        eye = np.eye(grid.n)
        a_nl = model.nonlinearity_A(state.eta, state.u, coeffs)
        b_nl = model.nonlinearity_B(state.eta, state.u, coeffs)
        eta_t = np.linalg.solve(eye - coeffs.b * D @ D, -D @ ((eye + coeffs.a * D @ D) @ state.u + a_nl))
        u_t = np.linalg.solve(eye - coeffs.d * D @ D, -D @ ((eye + coeffs.a * D @ D) @ state.eta + b_nl))
        worst = max(worst, np.max(np.abs(out.eta - eta_t)), np.max(np.abs(out.u - u_t)))
    return worst


def _dense_residual_defect(coeffs) -> float:
    grid = GridSpec(-1.0, 2.0, 8)
    system = make_full_system(coeffs, grid)
    rng = np.random.default_rng(0)
    z = ZGridField(grid, rng.standard_normal((8, 10)))
    zd = ZGridField(grid, rng.standard_normal((8, 10)))
    res = residual_full(z, zd, system)
    K = system.structure.time_matrix
    M = system.structure.space_matrix
    D = system.deriv.dense()
    oracle = (
        np.kron(np.eye(8), K) @ zd.z.reshape(-1)
        + np.kron(D, M) @ z.z.reshape(-1)
        - model.grad_S(z.z, coeffs).reshape(-1)
    ).reshape(8, 10)
    return float(np.max(np.abs(res - oracle)))


def _dense_invariant_defect(grid, coeffs) -> float:
    deriv = spectral_derivative(grid)
    state = _smooth_state(grid, 5, kill_kernel=False)
    D = deriv.dense()
    de, du = D @ state.eta, D @ state.u
    cubic = (
        coeffs.alpha11 / 3.0 * state.eta**3
        + coeffs.beta11 * state.eta**2 * state.u
        + 0.5 * coeffs.beta12 * state.eta * state.u**2
        + coeffs.beta22 / 3.0 * state.u**3
    )
    dense_e = float(-(state.eta @ state.u) + coeffs.a * (de @ du) - np.sum(cubic))
    dense_i = float(
        0.5 * (state.eta @ state.eta + state.u @ state.u + coeffs.b * (de @ de) + coeffs.d * (du @ du))
    )
    dense_q = float(state.eta @ state.u + coeffs.b * (de @ du))
    return max(
        abs(energy_E_h(state, coeffs, deriv) - dense_e),
        abs(momentum_I_h(state, coeffs, deriv) - dense_i),
        abs(frak_I_h(state, coeffs, deriv) - dense_q),
    )


def _dense_step_defect(grid, coeffs) -> float:
    """One midpoint step against a dense fixed-point solve of the same equations."""
    system = make_reduced_system(coeffs, grid)
    config = SchemeConfig(dt=0.05, fp_tol=1e-14, fp_max_iters=300)
    state = _smooth_state(grid, 9, kill_kernel=False)
    stepped, _ = imr_step_reduced(state, system, config)

    n = grid.n
    D = system.deriv.dense()
    eye = np.eye(n)
    nb = eye - coeffs.b * D @ D
    nd = eye - coeffs.d * D @ D
    lin = D @ (eye + coeffs.a * D @ D)
    two_dt = 2.0 / config.dt
    block = np.block([[two_dt * nb, lin], [lin, two_dt * nd]])
    base = np.concatenate([two_dt * (nb @ state.eta), two_dt * (nd @ state.u)])
    mid = np.concatenate([state.eta, state.u])
    for _ in range(300):
        a_nl = model.nonlinearity_A(mid[:n], mid[n:], coeffs)
        b_nl = model.nonlinearity_B(mid[:n], mid[n:], coeffs)
        rhs = base - np.concatenate([D @ a_nl, D @ b_nl])
        new = np.linalg.solve(block, rhs)
        if np.max(np.abs(new - mid)) <= 1e-14:
            mid = new
            break
        mid = new
    dense_next = 2.0 * mid - np.concatenate([state.eta, state.u])
    return float(
        max(np.max(np.abs(stepped.eta - dense_next[:n])), np.max(np.abs(stepped.u - dense_next[n:])))
    )


def _operator_structure_defect(grid) -> float:
    worst = 0.0
    rev = reversal(grid)
    ones = np.ones(grid.n)
    rng = np.random.default_rng(1)
    for op in (central_difference(grid), spectral_derivative(grid)):
        dense = op.dense()
        worst = max(worst, float(np.max(np.abs(dense + dense.T))))
        worst = max(worst, float(np.max(np.abs(dense.T @ ones))), float(np.max(np.abs(dense @ ones))))
        for _ in range(20):
            x = rng.standard_normal(grid.n)
            anti = op.apply(rev(x)) + rev(op.apply(x))
            worst = max(worst, float(np.max(np.abs(anti))) * grid.h)  # scale out the 1/h
    return worst


def _parity_gate_defect() -> float:
    for n in range(5, 33, 2):
        report = parity_singularity_report(GridSpec(0.0, 1.0, n), "average")
        prk = parity_singularity_report(GridSpec(0.0, 1.0, n), "prk", alpha=1.0 / 6.0)
        if not (report.invertible and prk.invertible):
            return 1.0
    for n in range(4, 34, 2):
        report = parity_singularity_report(GridSpec(0.0, 1.0, n), "average")
        prk = parity_singularity_report(GridSpec(0.0, 1.0, n), "prk", alpha=1.0 / 6.0)
        if report.invertible or prk.invertible:
            return 1.0
        if max(report.min_abs_symbol, prk.min_abs_symbol) > 1e-14:
            return 1.0
    return 0.0


def _local_law_defect(grid, coeffs) -> float:
    reduced = make_reduced_system(coeffs, grid)
    full = make_full_system(coeffs, grid)
    worst = 0.0
    for seed in range(20):
        state = _smooth_state(grid, seed)
        vel = rhs_reduced(state, reduced)
        accel = rhs_reduced_linearized(state, vel, reduced)
        z = reconstruct_aux(state, vel, full)
        zd = reconstruct_aux_rate(state, vel, accel, full)
        res_e, res_m = local_law_residuals_exact(z, zd, full)
        worst = max(worst, res_e, res_m)
    return worst


def _symplecticity_defect(grid, coeffs) -> float:
    reduced = make_reduced_system(coeffs, grid)
    full = make_full_system(coeffs, grid)
    config = SchemeConfig(dt=0.05)
    state = _smooth_state(grid, 11)
    z = reconstruct_aux(state, rhs_reduced(state, reduced), full)
    rng = np.random.default_rng(2)

    def tangent_field():
        f = rng.standard_normal((grid.n, 10))
        spec = np.fft.fft(f, axis=0)
        spec[0, [0, 5]] = 0.0
        if grid.n % 2 == 0:
            spec[grid.n // 2, [0, 5]] = 0.0
        return np.real(np.fft.ifft(spec, axis=0))

    pair = TangentPair(tangent_field(), tangent_field())
    K = full.structure.time_matrix
    first = total_symplecticity(pair.u_field, pair.v_field, K)
    current = z
    for _ in range(200):
        current, midpoint, _ = imr_step_full_with_midpoint(current, full, config)
        pair, _ = tangent_step(pair, midpoint, full, config)
    return abs(total_symplecticity(pair.u_field, pair.v_field, K) - first) / max(1.0, abs(first))


def _linear_invariant_defect(grid, coeffs) -> float:
    system = make_reduced_system(coeffs, grid)
    config = SchemeConfig(dt=0.05)
    state = _smooth_state(grid, 3, kill_kernel=False)
    state = StateField(grid, state.eta + 0.2, state.u - 0.1)
    c0 = linear_invariants(state)
    for _ in range(100):
        state, _ = imr_step_reduced(state, system, config)
    c1 = linear_invariants(state)
    return max(abs(c1[0] - c0[0]) / max(1.0, abs(c0[0])), abs(c1[1] - c0[1]) / max(1.0, abs(c0[1])))


def run_invariant_checks() -> list[CheckResult]:
    """Execute the whole gate battery; every bound is pinned, none adaptive."""
    grid = GridSpec(-4.0, 8.0, 16)
    coeffs = _test_coeffs()
    return [
        CheckResult("reduced rhs vs dense oracle (n=16)", _dense_rhs_defect(grid, coeffs), 1e-12),
        CheckResult("full residual vs kronecker oracle (n=8)", _dense_residual_defect(coeffs), 1e-12),
        CheckResult("global invariants vs dense oracle (n=16)", _dense_invariant_defect(grid, coeffs), 1e-12),
        CheckResult("midpoint step vs dense fixed point (n=16)", _dense_step_defect(grid, coeffs), 1e-12),
        CheckResult("operator skew/kernel/anticommutation", _operator_structure_defect(grid), 1e-12),
        CheckResult("parity singularity gates (n=4..33)", _parity_gate_defect(), 0.5),
        CheckResult("semi-discrete local laws, rhs derivatives", _local_law_defect(grid, coeffs), 1e-10),
        CheckResult("total symplecticity drift, 200 steps", _symplecticity_defect(grid, coeffs), 1e-10),
        CheckResult("linear invariants, 100 steps", _linear_invariant_defect(grid, coeffs), 1e-12),
    ]
