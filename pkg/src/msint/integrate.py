"""Implicit midpoint time stepping over the semi-discrete forms.

Every scheme here advances the implicit midpoint rule with the same solver
strategy: the full constant-coefficient linear part is inverted exactly,
Fourier mode by Fourier mode (2x2 blocks for the reduced and box forms, 10x10
blocks for the full form), and only the quadratic terms are lagged in a plain
fixed-point iteration on the midpoint unknown.  The iteration stops when two
successive midpoint iterates agree to ``fp_tol`` in the sup norm.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import model
from .errors import SingularOperatorError, StepFailureError
from .gridops import average, forward_difference
from .invariants import DiagnosticsRecord, collect_record, total_symplecticity
from .semidiscrete import SemiDiscreteSystem, StateField, ZGridField, rhs_box, rhs_reduced

SCHEME_KINDS = ("imr_reduced", "imr_full", "preissman_box")
OPERATOR_KINDS = ("spectral", "central")


@dataclass(frozen=True)
class SchemeConfig:
    """Time step, fixed-point controls and scheme/operator selection."""

    dt: float
    fp_tol: float = 1e-12
    fp_max_iters: int = 100
    operator: str = "spectral"
    scheme: str = "imr_reduced"

    def __post_init__(self):
        if self.dt <= 0.0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.fp_tol <= 0.0:
            raise ValueError(f"fp_tol must be positive, got {self.fp_tol}")
        if self.fp_max_iters < 1:
            raise ValueError(f"fp_max_iters must be at least 1, got {self.fp_max_iters}")
        if self.scheme not in SCHEME_KINDS:
            raise ValueError(f"unknown scheme {self.scheme!r}; expected one of {SCHEME_KINDS}")
        if self.operator not in OPERATOR_KINDS:
            raise ValueError(f"unknown operator {self.operator!r}; expected one of {OPERATOR_KINDS}")


@dataclass(frozen=True)
class StepReport:
    """Fixed-point telemetry for one implicit step."""

    iterations: int
    residual: float
    converged: bool


@dataclass(eq=False)
class TangentPair:
    """Two solutions of the variational equation, stored as (n, 10) blocks."""

    u_field: np.ndarray
    v_field: np.ndarray

    def __post_init__(self):
        self.u_field = np.asarray(self.u_field, dtype=float)
        self.v_field = np.asarray(self.v_field, dtype=float)
        if self.u_field.shape != self.v_field.shape or self.u_field.ndim != 2 or self.u_field.shape[1] != 10:
            raise ValueError("tangent fields must both have shape (n, 10)")


def _fixed_point(update, start, fp_tol, fp_max_iters):
    """Iterate ``current -> update(current)`` until the sup-norm change is small.

    ``start`` and the iterates are tuples of arrays.  Returns the fixed point
    and a StepReport; raises StepFailureError when the budget is exhausted.
    """
    current = start
    diff = np.inf
    for iteration in range(1, fp_max_iters + 1):
        new = update(current)
        diff = max(float(np.max(np.abs(a - b))) for a, b in zip(new, current))
        current = new
        if diff <= fp_tol:
            return current, StepReport(iterations=iteration, residual=diff, converged=True)
    raise StepFailureError(
        f"fixed point did not converge in {fp_max_iters} iterations (last change {diff:.3e})",
        residual=diff,
        iterations=fp_max_iters,
    )


def imr_step_reduced(
    state: StateField, system: SemiDiscreteSystem, config: SchemeConfig, dt: float | None = None
) -> tuple[StateField, StepReport]:
    """One implicit-midpoint step of the reduced semi-discretization.

    Each fixed-point pass solves the exact 2x2 complex linear system per
    Fourier mode coupling the two midpoint components and lags only the
    quadratic terms.  A negative ``dt`` override steps backward in time.
    """
    if system.form != "reduced":
        raise ValueError("imr_step_reduced needs a reduced-form system")
    cf = system.coeffs
    dt = config.dt if dt is None else dt
    lam = system.deriv.symbol
    two_dt = 2.0 / dt
    diag_eta = two_dt * np.real(1.0 - cf.b * lam**2)
    diag_u = two_dt * np.real(1.0 - cf.d * lam**2)
    coupling = lam * (1.0 + cf.a * lam**2)
    det = diag_eta * diag_u - coupling**2
    if np.min(np.abs(det)) <= 0.0:
        raise AssertionError("per-mode midpoint blocks must be nonsingular for b, d >= 0")

    eta_hat = np.fft.fft(state.eta)
    u_hat = np.fft.fft(state.u)
    base_eta = diag_eta * eta_hat
    base_u = diag_u * u_hat

    def update(mid):
        eta_m, u_m = mid
        a_hat = np.fft.fft(model.nonlinearity_A(eta_m, u_m, cf))
        b_hat = np.fft.fft(model.nonlinearity_B(eta_m, u_m, cf))
        r1 = base_eta - lam * a_hat
        r2 = base_u - lam * b_hat
        new_eta = np.real(np.fft.ifft((diag_u * r1 - coupling * r2) / det))
        new_u = np.real(np.fft.ifft((diag_eta * r2 - coupling * r1) / det))
        return new_eta, new_u

    (eta_m, u_m), report = _fixed_point(
        update, (state.eta, state.u), config.fp_tol, config.fp_max_iters
    )
    next_state = StateField(state.grid, 2.0 * eta_m - state.eta, 2.0 * u_m - state.u)
    return next_state, report


def imr_step_reduced_tangent(
    midpoint: StateField,
    tangent: StateField,
    system: SemiDiscreteSystem,
    config: SchemeConfig,
    dt: float | None = None,
) -> tuple[StateField, StepReport]:
    """Directional derivative of one reduced midpoint step.

    Linearizes the implicit step around its converged midpoint ``midpoint``
    and advances the direction ``tangent`` through the linearized scheme, with
    the same exact-linear/lagged-quadratic split as the nonlinear step.
    """
    if system.form != "reduced":
        raise ValueError("imr_step_reduced_tangent needs a reduced-form system")
    cf = system.coeffs
    dt = config.dt if dt is None else dt
    lam = system.deriv.symbol
    two_dt = 2.0 / dt
    diag_eta = two_dt * np.real(1.0 - cf.b * lam**2)
    diag_u = two_dt * np.real(1.0 - cf.d * lam**2)
    coupling = lam * (1.0 + cf.a * lam**2)
    det = diag_eta * diag_u - coupling**2
    a_e, a_u = model.nonlinearity_A_jacobian(midpoint.eta, midpoint.u, cf)
    b_e, b_u = model.nonlinearity_B_jacobian(midpoint.eta, midpoint.u, cf)
    base_eta = diag_eta * np.fft.fft(tangent.eta)
    base_u = diag_u * np.fft.fft(tangent.u)

    def update(mid):
        eta_m, u_m = mid
        da = np.fft.fft(a_e * eta_m + a_u * u_m)
        db = np.fft.fft(b_e * eta_m + b_u * u_m)
        r1 = base_eta - lam * da
        r2 = base_u - lam * db
        new_eta = np.real(np.fft.ifft((diag_u * r1 - coupling * r2) / det))
        new_u = np.real(np.fft.ifft((diag_eta * r2 - coupling * r1) / det))
        return new_eta, new_u

    (eta_m, u_m), report = _fixed_point(
        update, (tangent.eta, tangent.u), config.fp_tol, config.fp_max_iters
    )
    out = StateField(tangent.grid, 2.0 * eta_m - tangent.eta, 2.0 * u_m - tangent.u)
    return out, report


def _full_mode_blocks(system: SemiDiscreteSystem, dt: float):
    """Factor the per-mode 10x10 midpoint blocks, cached per time step."""
    key = ("full_blocks", float(dt))
    if key in system._cache:
        return system._cache[key]
    K = system.structure.time_matrix
    M = system.structure.space_matrix
    L = system.structure.linear_part
    lam = system.deriv.symbol
    n = system.grid.n
    blocks = (
        K[None, :, :]
        + 0.5 * dt * lam[:, None, None] * M[None, :, :]
        - 0.5 * dt * L[None, :, :]
    ).astype(complex)
    svals = np.linalg.svd(blocks, compute_uv=False)
    singular = svals[:, -1] <= 1e-10 * np.maximum(svals[:, 0], 1.0)
    solve = np.empty_like(blocks)
    if np.any(~singular):
        solve[~singular] = np.linalg.inv(blocks[~singular])
    if np.any(singular):
        solve[singular] = np.linalg.pinv(blocks[singular])
    cached = (blocks, solve, np.flatnonzero(singular))
    system._cache[key] = cached
    return cached


def _solve_full_modes(system, dt, rhs_hat, context):
    """Apply the cached per-mode solve; verify consistency on singular modes."""
    blocks, solve, singular_modes = _full_mode_blocks(system, dt)
    out = np.einsum("pij,pj->pi", solve, rhs_hat)
    if singular_modes.size:
        check = np.einsum("pij,pj->pi", blocks[singular_modes], out[singular_modes])
        mismatch = np.abs(check - rhs_hat[singular_modes])
        scale = np.maximum(1.0, np.abs(rhs_hat[singular_modes]).max(axis=1, keepdims=True))
        worst = (mismatch / scale).max(axis=1)
        if np.any(worst > 1e-8 * system.grid.n):
            mode = int(singular_modes[int(np.argmax(worst))])
            raise SingularOperatorError(
                f"singular midpoint block at Fourier mode {mode} with inconsistent data "
                f"({context}); the state has content the scheme cannot propagate"
            )
    return out


def imr_step_full(
    zfield: ZGridField, system: SemiDiscreteSystem, config: SchemeConfig, dt: float | None = None
) -> tuple[ZGridField, StepReport]:
    """One implicit-midpoint step of the full 10-component form.

    The left operator is block-diagonal per Fourier mode; blocks are factored
    once per (system, dt).  The kernel modes of the grid operator yield
    structurally singular blocks, solved in the minimum-norm sense with a
    consistency check (admissible states carry no mean in the surface or
    velocity components, and the affected directions are pure gauge).
    """
    if system.form != "full":
        raise ValueError("imr_step_full needs a full-form system")
    cf = system.coeffs
    dt = config.dt if dt is None else dt
    K = system.structure.time_matrix
    L = system.structure.linear_part
    z_n = zfield.z
    rhs_const = np.fft.fft(z_n, axis=0) @ K.T

    def nonlinear_part(z_mid):
        return model.grad_S(z_mid, cf) - z_mid @ L.T

    def update(mid):
        (z_mid,) = mid
        rhs_hat = rhs_const + 0.5 * dt * np.fft.fft(nonlinear_part(z_mid), axis=0)
        solved = _solve_full_modes(system, dt, rhs_hat, "full-form step")
        return (np.real(np.fft.ifft(solved, axis=0)),)

    (z_mid,), report = _fixed_point(update, (z_n,), config.fp_tol, config.fp_max_iters)
    return ZGridField(zfield.grid, 2.0 * z_mid - z_n), report


def tangent_step(
    pair: TangentPair,
    base_midpoint: ZGridField,
    system: SemiDiscreteSystem,
    config: SchemeConfig,
    dt: float | None = None,
) -> tuple[TangentPair, StepReport]:
    """Advance a tangent pair through the linearized full-form step.

    The potential Hessian is frozen at the supplied base midpoint (the
    converged midpoint of the accompanying nonlinear step, or the state itself
    for linear runs).  Its constant part rides inside the exact per-mode solve;
    the state-dependent part couples only the surface/velocity components and
    is lagged, so linear runs converge in a single pass.
    """
    if system.form != "full":
        raise ValueError("tangent_step needs a full-form system")
    cf = system.coeffs
    dt = config.dt if dt is None else dt
    K = system.structure.time_matrix
    q_ee, q_eu, q_uu = model.hessian_S_quadratic_part(base_midpoint.eta, base_midpoint.u, cf)

    def hess_quadratic(field):
        out = np.zeros_like(field)
        out[:, 0] = q_ee * field[:, 0] + q_eu * field[:, 5]
        out[:, 5] = q_eu * field[:, 0] + q_uu * field[:, 5]
        return out

    def advance(field):
        rhs_const = np.fft.fft(field, axis=0) @ K.T

        def update(mid):
            (f_mid,) = mid
            rhs_hat = rhs_const + 0.5 * dt * np.fft.fft(hess_quadratic(f_mid), axis=0)
            solved = _solve_full_modes(system, dt, rhs_hat, "tangent step")
            return (np.real(np.fft.ifft(solved, axis=0)),)

        (f_mid,), rep = _fixed_point(update, (field,), config.fp_tol, config.fp_max_iters)
        return 2.0 * f_mid - field, rep

    new_u, rep_u = advance(pair.u_field)
    new_v, rep_v = advance(pair.v_field)
    report = StepReport(
        iterations=max(rep_u.iterations, rep_v.iterations),
        residual=max(rep_u.residual, rep_v.residual),
        converged=rep_u.converged and rep_v.converged,
    )
    return TangentPair(new_u, new_v), report


def imr_step_full_with_midpoint(
    zfield: ZGridField, system: SemiDiscreteSystem, config: SchemeConfig, dt: float | None = None
) -> tuple[ZGridField, ZGridField, StepReport]:
    """Full-form step that also returns the converged midpoint field."""
    next_field, report = imr_step_full(zfield, system, config, dt)
    midpoint = ZGridField(zfield.grid, 0.5 * (zfield.z + next_field.z))
    return next_field, midpoint, report


def box_step(
    state: StateField, system: SemiDiscreteSystem, config: SchemeConfig, dt: float | None = None
) -> tuple[StateField, StepReport]:
    """One step of the fully discrete box scheme (midpoint in space and time).

    Works on the forward-difference/averaging operator pair and therefore
    requires an odd node count.
    """
    if system.form != "box":
        raise ValueError("box_step needs a box-form system")
    if state.grid.n % 2 == 0:
        raise SingularOperatorError("box scheme needs an odd node count")
    cf = system.coeffs
    dt = config.dt if dt is None else dt
    grid = state.grid
    dx = forward_difference(grid)
    mx = average(grid)
    dsym, msym = dx.symbol, mx.symbol
    two_dt = 2.0 / dt
    diag_eta = two_dt * (msym**3 - cf.b * dsym**2 * msym)
    diag_u = two_dt * (msym**3 - cf.d * dsym**2 * msym)
    coupling = cf.a * dsym**3 + msym**2 * dsym
    det = diag_eta * diag_u - coupling**2
    if np.min(np.abs(det)) <= 1e-300:
        raise SingularOperatorError("box-scheme midpoint block is singular")
    nonlin_factor = dsym * msym

    base_eta = diag_eta * np.fft.fft(state.eta)
    base_u = diag_u * np.fft.fft(state.u)

    def update(mid):
        eta_m, u_m = mid
        me, mu = mx.apply(eta_m), mx.apply(u_m)
        a_hat = np.fft.fft(model.nonlinearity_A(me, mu, cf))
        b_hat = np.fft.fft(model.nonlinearity_B(me, mu, cf))
        r1 = base_eta - nonlin_factor * a_hat
        r2 = base_u - nonlin_factor * b_hat
        new_eta = np.real(np.fft.ifft((diag_u * r1 - coupling * r2) / det))
        new_u = np.real(np.fft.ifft((diag_eta * r2 - coupling * r1) / det))
        return new_eta, new_u

    (eta_m, u_m), report = _fixed_point(
        update, (state.eta, state.u), config.fp_tol, config.fp_max_iters
    )
    next_state = StateField(grid, 2.0 * eta_m - state.eta, 2.0 * u_m - state.u)
    return next_state, report


@dataclass(eq=False)
class RunResult:
    """Trajectory summary: sampled diagnostics plus the final state."""

    times: list[float]
    records: list[DiagnosticsRecord]
    final_state: object
    failure: StepFailureError | None = None
    last_good_time: float | None = None
    sampled_states: list = field(default_factory=list)
    max_iterations: int = 0

    @property
    def failed(self) -> bool:
        return self.failure is not None


def run(
    initial,
    system: SemiDiscreteSystem,
    config: SchemeConfig,
    t_end: float,
    sample_every: int = 10,
    tangent: TangentPair | None = None,
    store_states: bool = False,
) -> RunResult:
    """March the configured scheme to ``t_end``, sampling diagnostics.

    ``initial`` is a StateField for the reduced/box schemes or a ZGridField for
    the full form.  Diagnostics are sampled every ``sample_every`` steps (plus
    the initial and final instants) and never alter the stepping.  The number
    of steps is ``round(t_end / dt)``.  Step failures abort the run; the
    result then carries the failure and the last completed time.
    """
    if t_end < 0.0:
        raise ValueError("t_end must be nonnegative")
    if sample_every < 1:
        raise ValueError("sample_every must be at least 1")
    if tangent is not None and config.scheme != "imr_full":
        raise ValueError("tangent propagation is only defined for the full-form scheme")

    n_steps = int(round(t_end / config.dt)) if t_end > 0 else 0
    deriv = system.deriv

    def state_of(current):
        return current.state() if isinstance(current, ZGridField) else current

    def record_at(t, current, tangent_pair):
        rec = collect_record(t, state_of(current), system.coeffs, deriv)
        if tangent_pair is not None:
            rec.symplecticity = total_symplecticity(
                tangent_pair.u_field, tangent_pair.v_field, system.structure.time_matrix
            )
        return rec

    def step(current, tangent_pair):
        if config.scheme == "imr_reduced":
            new, rep = imr_step_reduced(current, system, config)
            return new, None, rep
        if config.scheme == "preissman_box":
            new, rep = box_step(current, system, config)
            return new, None, rep
        new, midpoint, rep = imr_step_full_with_midpoint(current, system, config)
        new_tangent = tangent_pair
        if tangent_pair is not None:
            new_tangent, _ = tangent_step(tangent_pair, midpoint, system, config)
        return new, new_tangent, rep

    current = initial
    current_tangent = tangent
    times = [0.0]
    records = [record_at(0.0, current, current_tangent)]
    sampled = [current] if store_states else []
    max_iters = 0
    for k in range(1, n_steps + 1):
        try:
            current, current_tangent, rep = step(current, current_tangent)
        except StepFailureError as failure:
            return RunResult(
                times=times,
                records=records,
                final_state=current,
                failure=failure,
                last_good_time=(k - 1) * config.dt,
                sampled_states=sampled,
                max_iterations=max_iters,
            )
        max_iters = max(max_iters, rep.iterations)
        if k % sample_every == 0 or k == n_steps:
            t = k * config.dt
            times.append(t)
            records.append(record_at(t, current, current_tangent))
            if store_states:
                sampled.append(current)
    return RunResult(
        times=times,
        records=records,
        final_state=current,
        sampled_states=sampled,
        max_iterations=max_iters,
    )
