"""Spatial semi-discretizations of the Boussinesq family.

Three forms are assembled here:

* the reduced general-operator system in ``(eta, u)`` driven by a single
  skew-symmetric first-derivative operator,
* the full 10-component-per-node residual form it was eliminated from, and
* the box spatial form built from forward differences and averages, which
  needs an odd node count.

``reconstruct_aux`` inverts the elimination: given ``(eta, u)`` and their time
derivatives it rebuilds the auxiliary components so the full residual vanishes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import model
from .errors import SingularOperatorError, StructureError
from .gridops import (
    CirculantOperator,
    GridSpec,
    average,
    forward_difference,
    helmholtz_solve,
    kernel_projection,
    make_operator,
    solve_modulo_kernel,
)
from .model import ModelCoefficients


@dataclass(eq=False)
class StateField:
    """Nodal values of the reduced state: surface deviation and velocity."""

    grid: GridSpec
    eta: np.ndarray
    u: np.ndarray

    def __post_init__(self):
        self.eta = np.asarray(self.eta, dtype=float)
        self.u = np.asarray(self.u, dtype=float)
        if self.eta.shape != (self.grid.n,) or self.u.shape != (self.grid.n,):
            raise ValueError("eta and u must both have one value per grid node")
        if not (np.all(np.isfinite(self.eta)) and np.all(np.isfinite(self.u))):
            raise ValueError("state contains non-finite values")

    def copy(self) -> "StateField":
        return StateField(self.grid, self.eta.copy(), self.u.copy())

    def zero_mean(self) -> "StateField":
        """Same state with the spatial means of both components removed."""
        return StateField(self.grid, self.eta - self.eta.mean(), self.u - self.u.mean())


def zero_state(grid: GridSpec) -> StateField:
    return StateField(grid, np.zeros(grid.n), np.zeros(grid.n))


@dataclass(eq=False)
class ZGridField:
    """Full multi-symplectic state: one 10-component block per node."""

    grid: GridSpec
    z: np.ndarray

    def __post_init__(self):
        self.z = np.asarray(self.z, dtype=float)
        if self.z.shape != (self.grid.n, 10):
            raise ValueError(f"z must have shape (n, 10), got {self.z.shape}")
        if not np.all(np.isfinite(self.z)):
            raise ValueError("field contains non-finite values")

    @property
    def eta(self) -> np.ndarray:
        return self.z[:, 0]

    @property
    def u(self) -> np.ndarray:
        return self.z[:, 5]

    def state(self) -> StateField:
        return StateField(self.grid, self.eta.copy(), self.u.copy())

    def copy(self) -> "ZGridField":
        return ZGridField(self.grid, self.z.copy())


@dataclass(frozen=True, eq=False)
class SemiDiscreteSystem:
    """A coefficient set bound to a grid operator and a spatial form.

    ``form`` is one of ``"reduced"``, ``"full"`` or ``"box"``.  The reduced and
    full forms share the skew-symmetric operator ``deriv``; the box form keeps
    the forward-difference/averaging pair instead and stores the forward
    operator in ``deriv`` for diagnostics.  Immutable; reusable across runs.
    """

    coeffs: ModelCoefficients
    grid: GridSpec
    deriv: CirculantOperator
    form: str
    structure: model.MSStructure = field(default=None, repr=False)
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.form not in ("reduced", "full", "box"):
            raise ValueError(f"unknown form {self.form!r}")
        if self.structure is None and self.form in ("full", "reduced"):
            object.__setattr__(self, "structure", model.ms_matrices(self.coeffs))

    @property
    def n(self) -> int:
        return self.grid.n

    def helmholtz_eta(self, rhs: np.ndarray) -> np.ndarray:
        """Apply ``(I - b D^2)^{-1}``."""
        return helmholtz_solve(self.coeffs.b, self.deriv, rhs)

    def helmholtz_u(self, rhs: np.ndarray) -> np.ndarray:
        """Apply ``(I - d D^2)^{-1}``."""
        return helmholtz_solve(self.coeffs.d, self.deriv, rhs)


def make_reduced_system(coeffs: ModelCoefficients, grid: GridSpec, operator="spectral") -> SemiDiscreteSystem:
    deriv = operator if isinstance(operator, CirculantOperator) else make_operator(grid, operator)
    return SemiDiscreteSystem(coeffs, grid, deriv, "reduced")


def make_full_system(coeffs: ModelCoefficients, grid: GridSpec, operator="spectral") -> SemiDiscreteSystem:
    deriv = operator if isinstance(operator, CirculantOperator) else make_operator(grid, operator)
    return SemiDiscreteSystem(coeffs, grid, deriv, "full")


def make_box_system(coeffs: ModelCoefficients, grid: GridSpec) -> SemiDiscreteSystem:
    """Box spatial form; requires an odd node count for the averaging inverse."""
    if grid.n % 2 == 0:
        raise SingularOperatorError(
            f"box form needs an odd node count (averaging operator singular at n={grid.n})"
        )
    model.require_multi_symplectic(coeffs)
    return SemiDiscreteSystem(coeffs, grid, forward_difference(grid), "box", structure=model.ms_matrices(coeffs))


def _require_form(system: SemiDiscreteSystem, form: str):
    if system.form != form:
        raise ValueError(f"operation requires a {form!r} system, got {system.form!r}")


def rhs_reduced(state: StateField, system: SemiDiscreteSystem) -> StateField:
    """Time derivative of the reduced semi-discretization.

    Solves ``(I - b D^2) eta_t = -D[(I + a D^2) u + A(eta, u)]`` and the
    symmetric ``u`` equation, with the quadratics evaluated pointwise.
    """
    _require_form(system, "reduced")
    cf, D = system.coeffs, system.deriv
    a_nl = model.nonlinearity_A(state.eta, state.u, cf)
    b_nl = model.nonlinearity_B(state.eta, state.u, cf)
    rhs_eta = -D.apply(state.u + cf.a * D.apply(state.u, 2) + a_nl)
    rhs_u = -D.apply(state.eta + cf.a * D.apply(state.eta, 2) + b_nl)
    return StateField(state.grid, system.helmholtz_eta(rhs_eta), system.helmholtz_u(rhs_u))


def rhs_reduced_linearized(state: StateField, tangent: StateField, system: SemiDiscreteSystem) -> StateField:
    """Directional derivative of :func:`rhs_reduced` at ``state`` along ``tangent``."""
    _require_form(system, "reduced")
    cf, D = system.coeffs, system.deriv
    a_e, a_u = model.nonlinearity_A_jacobian(state.eta, state.u, cf)
    b_e, b_u = model.nonlinearity_B_jacobian(state.eta, state.u, cf)
    da = a_e * tangent.eta + a_u * tangent.u
    db = b_e * tangent.eta + b_u * tangent.u
    rhs_eta = -D.apply(tangent.u + cf.a * D.apply(tangent.u, 2) + da)
    rhs_u = -D.apply(tangent.eta + cf.a * D.apply(tangent.eta, 2) + db)
    return StateField(state.grid, system.helmholtz_eta(rhs_eta), system.helmholtz_u(rhs_u))


def apply_blockwise(deriv: CirculantOperator, zfield: np.ndarray) -> np.ndarray:
    """Apply a grid operator to every component of an ``(n, 10)`` block array."""
    return deriv.apply(zfield)


def residual_full(zfield: ZGridField, zdot: ZGridField, system: SemiDiscreteSystem) -> np.ndarray:
    """Residual of the full form: ``(I (x) K) zdot + (D (x) M) z - grad S(z)``.

    Returns an ``(n, 10)`` array; identically zero exactly when ``(z, zdot)``
    solves the 10-component semi-discretization.
    """
    if system.form not in ("full", "reduced"):
        raise ValueError("residual_full needs a general-operator system")
    K = system.structure.time_matrix
    M = system.structure.space_matrix
    dz = apply_blockwise(system.deriv, zfield.z)
    grad = model.grad_S(zfield.z, system.coeffs)
    return zdot.z @ K.T + dz @ M.T - grad


def reconstruct_aux(state: StateField, state_dot: StateField, system: SemiDiscreteSystem) -> ZGridField:
    """Rebuild the full 10-component field from a reduced solution pair.

    The gradient rows fix ``v1 = D eta``, ``v2 = D u``, ``w1 = eta_t``,
    ``w2 = u_t``; the potential-like components solve ``D phi1 = eta`` and
    ``D p1 = -eta_t/2`` per mode (zero-mean gauge for the antiderivatives,
    while the kernel modes of ``p1,p2`` absorb the kernel content of the
    nonlinearities so every row holds exactly).  States with kernel-mode
    content in ``eta`` or ``u`` are rejected.
    """
    if system.form not in ("full", "reduced"):
        raise ValueError("reconstruct_aux needs a general-operator system")
    cf, D = system.coeffs, system.deriv
    eta, u = state.eta, state.u
    z = np.zeros((state.grid.n, 10))
    z[:, 0] = eta
    z[:, 5] = u
    z[:, 2] = D.apply(eta)
    z[:, 7] = D.apply(u)
    z[:, 3] = state_dot.eta
    z[:, 8] = state_dot.u
    z[:, 1] = solve_modulo_kernel(D, eta)
    z[:, 6] = solve_modulo_kernel(D, u)
    a_nl = model.nonlinearity_A(eta, u, cf)
    b_nl = model.nonlinearity_B(eta, u, cf)
    z[:, 4] = solve_modulo_kernel(D, -0.5 * state_dot.eta) + kernel_projection(D, u + a_nl)
    z[:, 9] = solve_modulo_kernel(D, -0.5 * state_dot.u) + kernel_projection(D, eta + b_nl)
    return ZGridField(state.grid, z)


def reconstruct_aux_rate(
    state: StateField,
    state_dot: StateField,
    state_ddot: StateField,
    system: SemiDiscreteSystem,
) -> ZGridField:
    """Exact time derivative of the reconstructed field along the flow.

    Needed by the local conservation-law diagnostics, whose fluxes involve the
    full ``z_t`` including the second derivatives of ``(eta, u)``.
    """
    zdot = reconstruct_aux(state_dot, state_ddot, system)
    cf, D = system.coeffs, system.deriv
    a_e, a_u = model.nonlinearity_A_jacobian(state.eta, state.u, cf)
    b_e, b_u = model.nonlinearity_B_jacobian(state.eta, state.u, cf)
    da = a_e * state_dot.eta + a_u * state_dot.u
    db = b_e * state_dot.eta + b_u * state_dot.u
    # kernel part of p_t is d/dt of the kernel part of p, not the kernel part
    # of the differentiated nonlinearity of (eta_t, u_t)
    zdot.z[:, 4] += kernel_projection(D, state_dot.u + da) - kernel_projection(
        D, state_dot.u + model.nonlinearity_A(state_dot.eta, state_dot.u, cf)
    )
    zdot.z[:, 9] += kernel_projection(D, state_dot.eta + db) - kernel_projection(
        D, state_dot.eta + model.nonlinearity_B(state_dot.eta, state_dot.u, cf)
    )
    return zdot


def rhs_box(state: StateField, system: SemiDiscreteSystem) -> StateField:
    """Time derivative of the box spatial form (odd node count only).

    Solves ``(M_x^3 - b D_x^2 M_x) eta_t = -[a D_x^3 u + M_x^2 D_x u
    + D_x M_x A(M_x eta, M_x u)]`` and the symmetric ``u`` equation by
    circulant symbol division.
    """
    _require_form(system, "box")
    cf = system.coeffs
    grid = state.grid
    if grid.n % 2 == 0:
        raise SingularOperatorError("box form needs an odd node count")
    dx = forward_difference(grid)
    mx = average(grid)
    me, mu = mx.apply(state.eta), mx.apply(state.u)
    a_nl = model.nonlinearity_A(me, mu, cf)
    b_nl = model.nonlinearity_B(me, mu, cf)
    dsym, msym = dx.symbol, mx.symbol
    lhs_eta = msym**3 - cf.b * dsym**2 * msym
    lhs_u = msym**3 - cf.d * dsym**2 * msym
    rhs_eta = -(cf.a * dx.apply(state.u, 3) + (mx @ mx @ dx).apply(state.u) + (dx @ mx).apply(a_nl))
    rhs_u = -(cf.a * dx.apply(state.eta, 3) + (mx @ mx @ dx).apply(state.eta) + (dx @ mx).apply(b_nl))
    eta_t = np.real(np.fft.ifft(np.fft.fft(rhs_eta) / lhs_eta))
    u_t = np.real(np.fft.ifft(np.fft.fft(rhs_u) / lhs_u))
    return StateField(grid, eta_t, u_t)
