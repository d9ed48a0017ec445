"""Convergence-order studies (backing the ``convergence`` subcommand)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gridops import GridSpec
from .integrate import SchemeConfig, imr_step_reduced
from .model import ModelCoefficients
from .semidiscrete import StateField, make_reduced_system, rhs_reduced


@dataclass(frozen=True)
class StudyResult:
    name: str
    parameters: tuple
    errors: tuple
    slope: float | None
    passed: bool


def _study_coeffs() -> ModelCoefficients:
    return ModelCoefficients(
        a=0.0, b=1.0 / 6.0, c=0.0, d=1.0 / 6.0,
        alpha11=0.0, alpha12=0.46, alpha22=0.0,
        beta11=0.23, beta12=0.0, beta22=0.73,
    )


def _smooth_initial(grid: GridSpec) -> StateField:
    x = grid.nodes - grid.symmetry_center
    x = (x + 0.5 * grid.length) % grid.length - 0.5 * grid.length
    eta = 0.3 / np.cosh(0.6 * x) ** 2
    return StateField(grid, eta, 0.8 * eta)


def time_order_study(steps=(0.2, 0.1, 0.05, 0.025), reference_dt=0.003125, t_end=1.0) -> StudyResult:
    """Self-convergence of the reduced midpoint scheme on smooth nonlinear data."""
    grid = GridSpec(-16.0, 32.0, 64)
    system = make_reduced_system(_study_coeffs(), grid)

    def evolve(dt):
        state = _smooth_initial(grid)
        config = SchemeConfig(dt=dt, fp_tol=1e-13, fp_max_iters=200)
        for _ in range(int(round(t_end / dt))):
            state, _ = imr_step_reduced(state, system, config)
        return state

    reference = evolve(reference_dt)
    errors = []
    for dt in steps:
        state = evolve(dt)
        errors.append(
            float(
                max(np.max(np.abs(state.eta - reference.eta)), np.max(np.abs(state.u - reference.u)))
            )
        )
    slope = float(np.polyfit(np.log(steps), np.log(errors), 1)[0])
    return StudyResult("time_order_imr", tuple(steps), tuple(errors), slope, abs(slope - 2.0) <= 0.1)


def _single_mode_rhs_error(n: int, operator: str) -> float:
    """Reduced rhs on a linear single mode versus the closed-form derivative."""
    coeffs = ModelCoefficients(a=0.0, b=1.0 / 6.0, c=0.0, d=1.0 / 6.0)
    grid = GridSpec(0.0, 2.0 * np.pi, n)
    system = make_reduced_system(coeffs, grid, operator)
    s = grid.fundamental_wavenumber
    state = StateField(grid, np.cos(s * grid.nodes), np.zeros(n))
    out = rhs_reduced(state, system)
    exact_u = s / (1.0 + coeffs.d * s**2) * np.sin(s * grid.nodes)
    return float(max(np.max(np.abs(out.eta)), np.max(np.abs(out.u - exact_u))))


def spatial_order_study(resolutions=(16, 32, 64, 128)) -> StudyResult:
    """Second-order convergence of the central-difference spatial operator."""
    errors = [_single_mode_rhs_error(n, "central") for n in resolutions]
    h_values = [2.0 * np.pi / n for n in resolutions]
    slope = float(np.polyfit(np.log(h_values), np.log(errors), 1)[0])
    return StudyResult("spatial_order_central", tuple(resolutions), tuple(errors), slope, abs(slope - 2.0) <= 0.1)


def spectral_accuracy_study(n: int = 64) -> StudyResult:
    """Pseudospectral error on resolved single-mode data is roundoff-level."""
    error = _single_mode_rhs_error(n, "spectral")
    return StudyResult("spectral_single_mode", (n,), (error,), None, error <= 1e-10)


def run_convergence_studies() -> list[StudyResult]:
    return [time_order_study(), spatial_order_study(), spectral_accuracy_study()]
