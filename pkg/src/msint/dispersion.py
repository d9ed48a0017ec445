"""Exact and numerical dispersion relations.

Three ingredient maps are composed: the closed-form frequency of the
linearized system, the effective-wavenumber map of each spatial operator, and
the midpoint-rule frequency remapping in time.  ``measure_frequency`` closes
the loop by extracting the phase advance per step of a single seeded mode from
an actual linearized run.
"""

from __future__ import annotations

import numpy as np

from . import model
from .errors import MeasurementError, MsintError
from .integrate import SchemeConfig, box_step, imr_step_reduced
from .model import ModelCoefficients
from .semidiscrete import SemiDiscreteSystem, StateField


class DispersionDomainError(MsintError):
    """Frequency requested outside the admissible wavenumber range."""


def continuous_omega(k, coeffs: ModelCoefficients):
    """Closed-form frequency pair of the linearized system at wavenumber ``k``.

    ``omega = +/- k (1 + a k^2) / sqrt((1 + b k^2)(1 + d k^2))``; raises when a
    denominator factor is not positive.
    """
    k = np.asarray(k, dtype=float)
    denom = (1.0 + coeffs.b * k**2) * (1.0 + coeffs.d * k**2)
    if np.any(denom <= 0.0):
        raise DispersionDomainError("nonpositive dispersion denominator")
    omega = k * (1.0 + coeffs.a * k**2) / np.sqrt(denom)
    return omega, -omega


def spatial_wavenumber_map(xi, operator_kind: str, h: float):
    """Effective wavenumber of the ``xi`` mode under a spatial operator.

    The operator's eigenvalue on the mode with phase ``xi * h`` per cell is
    ``i * k``; this returns ``k``.  Kinds: ``central`` (sin(xi h)/h),
    ``spectral`` (identity) and ``imr_space`` ((2/h) tan(xi h / 2), the
    box-scheme spatial map, with a pole at ``xi h = pi``).
    """
    xi = np.asarray(xi, dtype=float)
    if operator_kind in ("spectral", "Spectral"):
        return xi + 0.0
    if operator_kind in ("central", "central_diff", "CentralDiff"):
        return np.sin(xi * h) / h
    if operator_kind in ("imr_space", "box", "ImrSpace"):
        phase = xi * h
        if np.any(np.isclose(np.abs(phase), np.pi, atol=1e-12)):
            raise DispersionDomainError("spatial midpoint map has a pole at xi*h = pi")
        return (2.0 / h) * np.tan(0.5 * phase)
    raise ValueError(f"unknown operator kind {operator_kind!r}")


def imr_time_map(big_omega, dt: float):
    """Semi-discrete frequency reproduced by a step frequency: (2/dt) tan(Omega dt / 2)."""
    big_omega = np.asarray(big_omega, dtype=float)
    phase = big_omega * dt
    if np.any(np.abs(phase) >= np.pi):
        raise DispersionDomainError("time midpoint map has a pole at |Omega| dt = pi")
    return (2.0 / dt) * np.tan(0.5 * phase)


def imr_time_map_inverse(omega, dt: float):
    """Step frequency realized for a semi-discrete frequency: (2/dt) arctan(omega dt / 2)."""
    omega = np.asarray(omega, dtype=float)
    return (2.0 / dt) * np.arctan(0.5 * omega * dt)


def box_conjugacy_check(xi: float, big_omega: float, h: float, dt: float, coeffs: ModelCoefficients) -> float:
    """Residual of the conjugated dispersion relation for the box scheme.

    ``xi`` and ``big_omega`` are the dimensionless phases per cell and per
    step.  Both are pushed through their tangent remappings and substituted in
    the squared closed-form relation; zero residual means the pair sits on the
    numerical dispersion curve.
    """
    for phase in (xi, big_omega):
        if np.isclose(abs(phase), np.pi, atol=1e-10):
            raise DispersionDomainError("tangent remapping has a pole at phase pi")
    k_eff = (2.0 / h) * np.tan(0.5 * xi)
    w_eff = (2.0 / dt) * np.tan(0.5 * big_omega)
    denom = (1.0 + coeffs.b * k_eff**2) * (1.0 + coeffs.d * k_eff**2)
    return float(w_eff**2 - k_eff**2 * (1.0 + coeffs.a * k_eff**2) ** 2 / denom)


def semidiscrete_mode_frequency(system: SemiDiscreteSystem, mode_p: int) -> float:
    """Oscillation frequency of one Fourier mode of the linearized reduced system.

    Computed from the operator symbol, so it is exact for any of the named
    operators (for the spectral operator it coincides with the closed form at
    ``k = xi``).
    """
    cf = system.coeffs
    lam = system.deriv.symbol[mode_p % system.grid.n]
    gamma = float(np.imag(lam * (1.0 + cf.a * lam**2)))
    nb = float(np.real(1.0 - cf.b * lam**2))
    nd = float(np.real(1.0 - cf.d * lam**2))
    return gamma / np.sqrt(nb * nd)


def mode_step_matrix(system: SemiDiscreteSystem, dt: float, mode_p: int) -> np.ndarray:
    """One-step 2x2 map of a Fourier mode pair under the reduced midpoint scheme."""
    cf = system.coeffs
    lam = system.deriv.symbol[mode_p % system.grid.n]
    g = lam * (1.0 + cf.a * lam**2)
    nb = 1.0 - cf.b * lam**2
    nd = 1.0 - cf.d * lam**2
    rate = np.array([[0.0, -g / nb], [-g / nd, 0.0]], dtype=complex)
    eye = np.eye(2, dtype=complex)
    return np.linalg.solve(eye - 0.5 * dt * rate, eye + 0.5 * dt * rate)


def measure_frequency(
    system: SemiDiscreteSystem,
    config: SchemeConfig,
    mode_p: int,
    steps: int = 16,
    amplitude: float = 1e-3,
) -> float:
    """Phase advance per step of a single seeded eigenmode, divided by dt.

    Seeds the positive-frequency eigenvector of the 2x2 mode system, runs the
    configured linearized scheme and averages the complex-amplitude phase
    increments over ``steps`` steps.  The coefficient set must have zero
    nonlinearity, and the amplitude must survive the run.
    """
    cf = system.coeffs
    nonzero = (cf.alpha11, cf.alpha12, cf.alpha22, cf.beta11, cf.beta12, cf.beta22)
    if any(abs(v) > 0.0 for v in nonzero):
        raise MeasurementError("frequency measurement requires a linearized (zero nonlinearity) system")
    n = system.grid.n
    mode_p = mode_p % n
    if config.scheme == "imr_reduced":
        stepper = lambda s: imr_step_reduced(s, system, config)[0]
        lam = system.deriv.symbol[mode_p]
        nb = float(np.real(1.0 - cf.b * lam**2))
    elif config.scheme == "preissman_box":
        stepper = lambda s: box_step(s, system, config)[0]
        # effective first-derivative eigenvalue of the averaged forward pair
        from .gridops import average, forward_difference

        msym = average(system.grid).symbol[mode_p]
        dsym = forward_difference(system.grid).symbol[mode_p]
        lam = dsym / msym
        nb = float(np.real(1.0 - cf.b * lam**2))
    else:
        raise MeasurementError(f"unsupported scheme {config.scheme!r} for frequency measurement")

    gamma = float(np.imag(lam * (1.0 + cf.a * lam**2)))
    spectrum_eta = np.zeros(n, dtype=complex)
    spectrum_u = np.zeros(n, dtype=complex)
    if mode_p == 0 or gamma == 0.0:
        eta_amp, u_amp = 1.0, 0.0
    else:
        omega0 = semidiscrete_mode_frequency(system, mode_p) if config.scheme == "imr_reduced" else (
            gamma / np.sqrt(nb * float(np.real(1.0 - cf.d * lam**2)))
        )
        eta_amp, u_amp = 1.0, -omega0 * nb / gamma
    spectrum_eta[mode_p] = 0.5 * n * amplitude * eta_amp
    spectrum_eta[-mode_p % n] = np.conj(spectrum_eta[mode_p])
    spectrum_u[mode_p] = 0.5 * n * amplitude * u_amp
    spectrum_u[-mode_p % n] = np.conj(spectrum_u[mode_p])
    state = StateField(
        system.grid,
        np.real(np.fft.ifft(spectrum_eta)),
        np.real(np.fft.ifft(spectrum_u)),
    )

    amplitudes = [np.fft.fft(state.eta)[mode_p]]
    for _ in range(steps):
        state = stepper(state)
        amplitudes.append(np.fft.fft(state.eta)[mode_p])
    amplitudes = np.array(amplitudes)
    if np.min(np.abs(amplitudes)) < 1e-13 * n * amplitude:
        raise MeasurementError("mode amplitude collapsed during the measurement run")
    phases = np.angle(amplitudes[1:] / amplitudes[:-1])
    return float(np.mean(phases) / config.dt)
