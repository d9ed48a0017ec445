"""Conserved and monitored quantities of the semi-discretizations.

Global quantities (energy, momentum, the quadratic invariant, the discrete
Hamiltonian, and the two linear invariants) are plain grid sums over the
reduced state.  The local-law diagnostics act on the full 10-component form
and verify the per-node energy/momentum balances of the general-operator
semi-discretization.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import model
from .errors import InsufficientDataError, StructureError
from .gridops import CirculantOperator
from .model import ModelCoefficients, StructureClass
from .semidiscrete import SemiDiscreteSystem, StateField, ZGridField, apply_blockwise


@dataclass(eq=False)
class DiagnosticsRecord:
    """Time-stamped invariant values sampled along a run.

    ``hamiltonian`` is populated only for coefficient sets in the Hamiltonian
    structure class; the local-law residuals and the symplecticity slot are
    filled only by the diagnostics that compute them.
    """

    t: float
    energy: float
    momentum: float
    quadratic: float
    c1: float
    c2: float
    hamiltonian: float | None = None
    local_energy_residual: float | None = None
    local_momentum_residual: float | None = None
    symplecticity: float | None = None


def _cubic_energy_density(eta, u, coeffs: ModelCoefficients):
    """Hadamard version of the cubic part of the energy density."""
    return (
        coeffs.alpha11 / 3.0 * eta**3
        + coeffs.beta11 * eta**2 * u
        + 0.5 * coeffs.beta12 * eta * u**2
        + coeffs.beta22 / 3.0 * u**3
    )


def energy_E_h(state: StateField, coeffs: ModelCoefficients, deriv: CirculantOperator) -> float:
    """Global energy of the general-operator semi-discretization.

    ``-<eta, u> + a <D eta, D u> - <cubic(eta, u), 1>``; conserved exactly by
    the semi-discrete flow when the operator is skew-symmetric.
    """
    de = deriv.apply(state.eta)
    du = deriv.apply(state.u)
    cubic = _cubic_energy_density(state.eta, state.u, coeffs)
    return float(-(state.eta @ state.u) + coeffs.a * (de @ du) - np.sum(cubic))


def momentum_I_h(state: StateField, coeffs: ModelCoefficients, deriv: CirculantOperator) -> float:
    """Global momentum: ``(|eta|^2 + |u|^2 + b |D eta|^2 + d |D u|^2) / 2``."""
    de = deriv.apply(state.eta)
    du = deriv.apply(state.u)
    return float(
        0.5 * (state.eta @ state.eta + state.u @ state.u + coeffs.b * (de @ de) + coeffs.d * (du @ du))
    )


def frak_I_h(state: StateField, coeffs: ModelCoefficients, deriv: CirculantOperator) -> float:
    """Quadratic invariant ``<eta, u> + b <D eta, D u>``."""
    return float(state.eta @ state.u + coeffs.b * (deriv.apply(state.eta) @ deriv.apply(state.u)))


def hamiltonian_H_h(state: StateField, coeffs: ModelCoefficients, deriv: CirculantOperator) -> float:
    """Discrete Hamiltonian of the ``(a, b, a, b)`` structure class.

    Raises :class:`StructureError` for coefficient sets outside that class.
    """
    if model.classify_structure(coeffs) is not StructureClass.MULTI_SYMPLECTIC_HAMILTONIAN:
        raise StructureError("the discrete Hamiltonian exists only for the (a, b, a, b) structure class")
    eta, u = state.eta, state.u
    d2e = deriv.apply(eta, 2)
    d2u = deriv.apply(u, 2)
    cubic = (
        coeffs.beta11 / 3.0 * eta**3
        + coeffs.beta12 / 2.0 * eta**2 * u
        + coeffs.beta22 * eta * u**2
        + coeffs.alpha22 / 3.0 * u**3
    )
    quad = 0.5 * (eta @ eta + u @ u + coeffs.a * (eta @ d2e) + coeffs.a * (u @ d2u))
    return float(quad + np.sum(cubic))


def linear_invariants(state: StateField) -> tuple[float, float]:
    """Grid sums of the two components (conserved by any Runge-Kutta step)."""
    return float(np.sum(state.eta)), float(np.sum(state.u))


def momentum_leak_rate(state: StateField, coeffs: ModelCoefficients, deriv: CirculantOperator) -> float:
    """Exact rate of change of the global momentum along the semi-discrete flow.

    ``<A(eta,u), D eta> + <B(eta,u), D u>``; vanishes for reversal-symmetric
    states.
    """
    a_nl = model.nonlinearity_A(state.eta, state.u, coeffs)
    b_nl = model.nonlinearity_B(state.eta, state.u, coeffs)
    return float(a_nl @ deriv.apply(state.eta) + b_nl @ deriv.apply(state.u))


def quadratic_leak_rate(state: StateField, coeffs: ModelCoefficients, deriv: CirculantOperator) -> float:
    """Exact rate of change of the quadratic invariant along the flow.

    ``<A(eta,u), D u> + <B(eta,u), D eta>``; vanishes for reversal-symmetric
    states.
    """
    a_nl = model.nonlinearity_A(state.eta, state.u, coeffs)
    b_nl = model.nonlinearity_B(state.eta, state.u, coeffs)
    return float(a_nl @ deriv.apply(state.u) + b_nl @ deriv.apply(state.eta))


def total_symplecticity(u_field: np.ndarray, v_field: np.ndarray, time_matrix: np.ndarray) -> float:
    """Sum over nodes of ``<K U_j, V_j>`` for a tangent pair.

    Bilinear and antisymmetric in the pair; conserved by the full-form scheme
    when the grid operator is skew-symmetric.
    """
    u_field = np.asarray(u_field, dtype=float).reshape(-1, 10)
    v_field = np.asarray(v_field, dtype=float).reshape(-1, 10)
    return float(np.sum((u_field @ time_matrix.T) * v_field))


def _potential_values(z: np.ndarray, coeffs: ModelCoefficients) -> np.ndarray:
    """Vectorized per-node evaluation of the scalar potential."""
    eta, v1, w1, p1 = z[:, 0], z[:, 2], z[:, 3], z[:, 4]
    u, v2, w2, p2 = z[:, 5], z[:, 7], z[:, 8], z[:, 9]
    return (
        p1 * eta
        - eta * u
        - coeffs.alpha11 / 3.0 * eta**3
        - coeffs.beta11 * eta**2 * u
        - 0.5 * coeffs.beta12 * eta * u**2
        + 0.5 * coeffs.b * v1 * w1
        - coeffs.beta22 / 3.0 * u**3
        + 0.5 * coeffs.d * v2 * w2
        - coeffs.a * v1 * v2
        + p2 * u
    )


def local_densities(zfield: ZGridField, system: SemiDiscreteSystem) -> tuple[np.ndarray, np.ndarray]:
    """Per-node energy and momentum densities of the full form (z only)."""
    K = system.structure.time_matrix
    M = system.structure.space_matrix
    z = zfield.z
    cz = apply_blockwise(system.deriv, z)
    s_vals = _potential_values(z, system.coeffs)
    energy_density = s_vals - 0.5 * np.sum(z * (cz @ M.T), axis=1)
    momentum_density = 0.5 * np.sum(z * (cz @ K.T), axis=1)
    return energy_density, momentum_density


def local_flux_gradients(
    zfield: ZGridField, zdot: ZGridField, system: SemiDiscreteSystem
) -> tuple[np.ndarray, np.ndarray]:
    """Directional grid gradients of the energy and momentum fluxes.

    The fluxes depend on ``(z, z_t)``; their grid gradient is the directional
    derivative along ``((D (x) I) z, (D (x) I) z_t)``.
    """
    K = system.structure.time_matrix
    M = system.structure.space_matrix
    z, zd = zfield.z, zdot.z
    cz = apply_blockwise(system.deriv, z)
    czd = apply_blockwise(system.deriv, zd)
    grad = model.grad_S(z, system.coeffs)
    grad_energy_flux = 0.5 * np.sum((zd @ M.T) * cz, axis=1) - 0.5 * np.sum((z @ M.T) * czd, axis=1)
    grad_momentum_flux = np.sum((grad - 0.5 * (zd @ K.T)) * cz, axis=1) + 0.5 * np.sum(
        (z @ K.T) * czd, axis=1
    )
    return grad_energy_flux, grad_momentum_flux


def _density_rates_exact(
    zfield: ZGridField, zdot: ZGridField, system: SemiDiscreteSystem
) -> tuple[np.ndarray, np.ndarray]:
    """Exact time derivatives of the local densities given ``z_t``."""
    K = system.structure.time_matrix
    M = system.structure.space_matrix
    z, zd = zfield.z, zdot.z
    cz = apply_blockwise(system.deriv, z)
    czd = apply_blockwise(system.deriv, zd)
    grad = model.grad_S(z, system.coeffs)
    denergy = (
        np.sum(grad * zd, axis=1)
        - 0.5 * np.sum(zd * (cz @ M.T), axis=1)
        - 0.5 * np.sum(z * (czd @ M.T), axis=1)
    )
    dmomentum = 0.5 * np.sum(zd * (cz @ K.T), axis=1) + 0.5 * np.sum(z * (czd @ K.T), axis=1)
    return denergy, dmomentum


def local_law_residuals_exact(
    zfield: ZGridField, zdot: ZGridField, system: SemiDiscreteSystem
) -> tuple[float, float]:
    """Sup-norms of both local law residuals with rhs-supplied derivatives.

    Identically zero (to roundoff) along exact solutions of the full
    semi-discretization.
    """
    de_dt, di_dt = _density_rates_exact(zfield, zdot, system)
    gf, gm = local_flux_gradients(zfield, zdot, system)
    return float(np.max(np.abs(de_dt + gf))), float(np.max(np.abs(di_dt + gm)))


_FD4_WEIGHTS = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0


def local_law_residuals(samples, sample_dt: float, system: SemiDiscreteSystem) -> tuple[float, float]:
    """Local-law residuals from a uniformly sampled full-form trajectory.

    ``samples`` is a sequence of at least five :class:`ZGridField` snapshots at
    spacing ``sample_dt``.  All time derivatives (the field derivative feeding
    the fluxes and the derivatives of the sampled densities) use 4th-order
    central differences, so along an exact trajectory the residuals shrink
    like the 4th power of the sample spacing.
    """
    samples = list(samples)
    if len(samples) < 5:
        raise InsufficientDataError(f"need at least 5 samples, got {len(samples)}")
    worst_energy = 0.0
    worst_momentum = 0.0
    for mid in range(2, len(samples) - 2):
        window = samples[mid - 2 : mid + 3]
        center = window[2]
        zd = np.zeros_like(center.z)
        for w, snap in zip(_FD4_WEIGHTS, window):
            zd += (w / sample_dt) * snap.z
        zdot = ZGridField(center.grid, zd)
        gf, gm = local_flux_gradients(center, zdot, system)
        dens = [local_densities(snap, system) for snap in window]
        de_dt = sum(w * d[0] for w, d in zip(_FD4_WEIGHTS, dens)) / sample_dt
        di_dt = sum(w * d[1] for w, d in zip(_FD4_WEIGHTS, dens)) / sample_dt
        worst_energy = max(worst_energy, float(np.max(np.abs(de_dt + gf))))
        worst_momentum = max(worst_momentum, float(np.max(np.abs(di_dt + gm))))
    return worst_energy, worst_momentum


def collect_record(
    t: float,
    state: StateField,
    coeffs: ModelCoefficients,
    deriv: CirculantOperator,
    with_hamiltonian: bool | None = None,
) -> DiagnosticsRecord:
    """Evaluate the standard global diagnostics at one instant."""
    if with_hamiltonian is None:
        with_hamiltonian = (
            model.classify_structure(coeffs) is StructureClass.MULTI_SYMPLECTIC_HAMILTONIAN
        )
    c1, c2 = linear_invariants(state)
    return DiagnosticsRecord(
        t=t,
        energy=energy_E_h(state, coeffs, deriv),
        momentum=momentum_I_h(state, coeffs, deriv),
        quadratic=frak_I_h(state, coeffs, deriv),
        c1=c1,
        c2=c2,
        hamiltonian=hamiltonian_H_h(state, coeffs, deriv) if with_hamiltonian else None,
    )
