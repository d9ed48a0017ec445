"""Initial data: traveling-wave profiles and standard analytic test fields.

Solitary profiles solve the once-integrated traveling system (zero integration
constants) on the periodic grid by a Newton iteration, with matrix-free
Jacobian application, GMRES linear solves preconditioned per Fourier mode by
the constant-coefficient symbol, and an even-symmetry projection every iterate
to remove the translation null direction.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.sparse.linalg import LinearOperator, gmres

from . import model
from .errors import ProfileSolveError
from .gridops import CirculantOperator, GridSpec, reversal, spectral_derivative
from .model import ModelCoefficients
from .semidiscrete import StateField


@dataclass(frozen=True)
class SolitaryWaveSpec:
    """Target speed and solver controls for a traveling-wave solve."""

    speed: float
    grid: GridSpec
    tol: float = 1e-10
    max_newton: int = 50
    amplitude_guess: float | None = None

    def __post_init__(self):
        if self.speed == 0.0:
            raise ValueError("traveling speed must be nonzero")


@dataclass(eq=False)
class SolitaryWave:
    """Converged profile with its classification and solver telemetry."""

    state: StateField
    speed: float
    classification: str  # "csw" or "gsw"
    residual: float
    newton_iterations: int
    tail_amplitude: float


def traveling_residual(
    state: StateField, speed: float, coeffs: ModelCoefficients, deriv: CirculantOperator
) -> StateField:
    """Residual of the once-integrated traveling system at a grid state.

    ``R1 = u + A(eta,u) + a D^2 u + c_s b D^2 eta - c_s eta`` and
    ``R2 = eta + B(eta,u) + a D^2 eta + c_s d D^2 u - c_s u``; both vanish on
    an exact discrete profile.  Equals minus the gradient of
    ``E_h + c_s I_h``, which is what makes the profile a relative equilibrium.
    """
    model.require_multi_symplectic(coeffs)
    eta, u = state.eta, state.u
    r1 = (
        u
        + model.nonlinearity_A(eta, u, coeffs)
        + coeffs.a * deriv.apply(u, 2)
        + speed * coeffs.b * deriv.apply(eta, 2)
        - speed * eta
    )
    r2 = (
        eta
        + model.nonlinearity_B(eta, u, coeffs)
        + coeffs.a * deriv.apply(eta, 2)
        + speed * coeffs.d * deriv.apply(u, 2)
        - speed * u
    )
    return StateField(state.grid, r1, r2)


def _traveling_jacobian_apply(state, speed, coeffs, deriv, d_eta, d_u):
    a_e, a_u = model.nonlinearity_A_jacobian(state.eta, state.u, coeffs)
    b_e, b_u = model.nonlinearity_B_jacobian(state.eta, state.u, coeffs)
    j1 = (
        d_u
        + a_e * d_eta
        + a_u * d_u
        + coeffs.a * deriv.apply(d_u, 2)
        + speed * coeffs.b * deriv.apply(d_eta, 2)
        - speed * d_eta
    )
    j2 = (
        d_eta
        + b_e * d_eta
        + b_u * d_u
        + coeffs.a * deriv.apply(d_eta, 2)
        + speed * coeffs.d * deriv.apply(d_u, 2)
        - speed * d_u
    )
    return j1, j2


def _mode_preconditioner(speed, coeffs, deriv):
    """Inverse of the constant-coefficient 2x2 symbol, regularized near resonance."""
    lam2 = np.real(deriv.symbol**2)
    p11 = -speed * (1.0 - coeffs.b * lam2)
    p22 = -speed * (1.0 - coeffs.d * lam2)
    p12 = 1.0 + coeffs.a * lam2
    det = p11 * p22 - p12 * p12
    floor = 1e-6 * np.maximum(1.0, np.abs(p11 * p22))
    det = np.where(np.abs(det) < floor, np.sign(det + (det == 0.0)) * floor, det)

    def apply(d_eta_hat, d_u_hat):
        out_eta = (p22 * d_eta_hat - p12 * d_u_hat) / det
        out_u = (p11 * d_u_hat - p12 * d_eta_hat) / det
        return out_eta, out_u

    return apply


def _symmetrize(values: np.ndarray) -> np.ndarray:
    return 0.5 * (values + values[::-1])


def _sech2_guess(spec: SolitaryWaveSpec, coeffs: ModelCoefficients) -> StateField:
    """Long-wave scaling guess, centered at the reversal-symmetric point."""
    grid = spec.grid
    quad_scale = model.nonlinearity_A(1.0, 1.0, coeffs) + model.nonlinearity_B(1.0, 1.0, coeffs)
    if abs(quad_scale) < 1e-12:
        quad_scale = 1.0
    amplitude = spec.amplitude_guess
    if amplitude is None:
        amplitude = np.clip(3.0 * (abs(spec.speed) - 1.0) / quad_scale, 0.1, 2.0)
    disp_scale = 2.0 * coeffs.a + coeffs.b + coeffs.d
    if disp_scale > 1e-12 and abs(spec.speed) > 1.0:
        kappa = np.sqrt((abs(spec.speed) - 1.0) / (2.0 * disp_scale))
    else:
        kappa = 0.5
    x = grid.nodes - grid.symmetry_center
    x = (x + 0.5 * grid.length) % grid.length - 0.5 * grid.length
    eta = amplitude / np.cosh(kappa * x) ** 2
    boundary = amplitude / np.cosh(kappa * 0.5 * grid.length) ** 2
    if boundary > 1e-8:
        warnings.warn(
            f"profile guess decays only to {boundary:.2e} at the domain boundary; "
            "consider a longer domain",
            stacklevel=3,
        )
    return StateField(grid, eta, eta / spec.speed)


def _newton_solve(guess: StateField, speed, coeffs, deriv, tol, max_newton):
    """Damped Newton iteration on the traveling residual; even states only."""
    grid = guess.grid
    n = grid.n
    precond = _mode_preconditioner(speed, coeffs, deriv)
    eta = _symmetrize(guess.eta.copy())
    u = _symmetrize(guess.u.copy())

    def residual_norm(e, w):
        r = traveling_residual(StateField(grid, e, w), speed, coeffs, deriv)
        return r, max(np.max(np.abs(r.eta)), np.max(np.abs(r.u)))

    res, rnorm = residual_norm(eta, u)
    for iteration in range(1, max_newton + 1):
        if rnorm <= tol:
            return StateField(grid, eta, u), rnorm, iteration - 1
        state = StateField(grid, eta, u)

        def matvec(vec):
            j1, j2 = _traveling_jacobian_apply(state, speed, coeffs, deriv, vec[:n], vec[n:])
            return np.concatenate([j1, j2])

        def precond_apply(vec):
            pe, pu = precond(np.fft.fft(vec[:n]), np.fft.fft(vec[n:]))
            return np.concatenate([np.real(np.fft.ifft(pe)), np.real(np.fft.ifft(pu))])

        op = LinearOperator((2 * n, 2 * n), matvec=matvec)
        pre = LinearOperator((2 * n, 2 * n), matvec=precond_apply)
        rhs = -np.concatenate([res.eta, res.u])
        try:
            delta, info = gmres(op, rhs, M=pre, rtol=1e-10, atol=1e-14 * max(1.0, rnorm), restart=60, maxiter=40)
        except TypeError:  # older scipy spells the relative tolerance 'tol'
            delta, info = gmres(op, rhs, M=pre, tol=1e-10, atol=1e-14 * max(1.0, rnorm), restart=60, maxiter=40)
        if info != 0 and not np.all(np.isfinite(delta)):
            raise ProfileSolveError("linear solve failed inside Newton", residual=rnorm)
        step = 1.0
        for _ in range(12):
            new_eta = _symmetrize(eta + step * delta[:n])
            new_u = _symmetrize(u + step * delta[n:])
            new_res, new_norm = residual_norm(new_eta, new_u)
            if new_norm < rnorm or new_norm <= tol:
                break
            step *= 0.5
        else:
            raise ProfileSolveError(
                f"Newton stalled at residual {rnorm:.3e} (speed {speed})", residual=rnorm
            )
        eta, u, res, rnorm = new_eta, new_u, new_res, new_norm
    if rnorm <= tol:
        return StateField(grid, eta, u), rnorm, max_newton
    raise ProfileSolveError(
        f"Newton did not reach tolerance {tol:.1e} in {max_newton} iterations "
        f"(residual {rnorm:.3e})",
        residual=rnorm,
    )


def classify_profile(state: StateField, tail_fraction: float = 0.10, threshold: float = 1e-8):
    """Tail-ripple classification: generalized wave when the outer-domain
    oscillation exceeds ``threshold`` times the peak."""
    grid = state.grid
    x = grid.nodes - grid.symmetry_center
    x = (x + 0.5 * grid.length) % grid.length - 0.5 * grid.length
    tail = np.abs(x) >= 0.5 * grid.length * (1.0 - tail_fraction)
    tail_values = state.eta[tail]
    amplitude = 0.5 * float(tail_values.max() - tail_values.min()) if tail_values.size else 0.0
    peak = float(np.max(np.abs(state.eta)))
    kind = "gsw" if amplitude > threshold * max(peak, 1e-300) else "csw"
    return kind, amplitude


def solve_profile(spec: SolitaryWaveSpec, coeffs: ModelCoefficients) -> SolitaryWave:
    """Newton-continuation solve of the periodic traveling-wave system.

    Starts from the long-wave scaling guess at the requested speed; if Newton
    stalls, walks the speed up from just above 1 in steps of 0.05, reusing
    each converged profile as the next guess.  The converged profile is even
    about the grid's reversal center.
    """
    model.require_multi_symplectic(coeffs)
    deriv = spectral_derivative(spec.grid)
    total_iters = 0
    try:
        guess = _sech2_guess(spec, coeffs)
        state, rnorm, iters = _newton_solve(guess, spec.speed, coeffs, deriv, spec.tol, spec.max_newton)
        total_iters = iters
    except ProfileSolveError:
        # continuation in the speed, from weakly super-critical upward
        state = None
        speeds = list(np.arange(1.05, abs(spec.speed), 0.05) * np.sign(spec.speed)) + [spec.speed]
        for c in speeds:
            sub = SolitaryWaveSpec(c, spec.grid, spec.tol, spec.max_newton, spec.amplitude_guess)
            guess = _sech2_guess(sub, coeffs) if state is None else state
            state, rnorm, iters = _newton_solve(guess, c, coeffs, deriv, spec.tol, spec.max_newton)
            total_iters += iters
    kind, tail_amplitude = classify_profile(state)
    return SolitaryWave(
        state=state,
        speed=spec.speed,
        classification=kind,
        residual=rnorm,
        newton_iterations=total_iters,
        tail_amplitude=tail_amplitude,
    )


def spectral_translate(values: np.ndarray, grid: GridSpec, shift: float) -> np.ndarray:
    """Translate grid data by a (possibly fractional) distance: f(x) -> f(x - shift)."""
    kvec = grid.fundamental_wavenumber * grid.mode_numbers
    return np.real(np.fft.ifft(np.fft.fft(values) * np.exp(-1j * kvec * shift)))


def refine_to_discrete_wave(
    state: StateField,
    speed: float,
    system,
    dt: float,
    tol: float = 5e-12,
    max_newton: int = 12,
    krylov_iters: int = 300,
    verbose: bool = False,
):
    """Polish a profile into a traveling wave of the fully discrete midpoint map.

    Finds a state whose one-step image equals its own spectral translate by
    ``speed * dt``, so the time-stepped trajectory is an exact sequence of
    translates of one even profile.  Along such a trajectory every midpoint is
    reflection-symmetric and the global energy and the quadratic quantities
    hold to solver precision, which removes the O(dt^2) offset incurred when
    starting from the semi-discrete profile.

    Newton iteration with matrix-free application of the one-step tangent map,
    Krylov solves preconditioned per Fourier mode by the phase-shifted linear
    rotation, and an even-symmetry/zero-update-mean projection.  Returns the
    refined state and the sup-norm map residual actually achieved (callers
    decide whether a partially converged refinement is acceptable).
    """
    from scipy.sparse.linalg import LinearOperator, lgmres

    from .integrate import SchemeConfig, imr_step_reduced, imr_step_reduced_tangent

    grid = state.grid
    n = grid.n
    cf = system.coeffs
    config = SchemeConfig(dt=dt, fp_tol=1e-14, fp_max_iters=500)
    shift = speed * dt
    lam = system.deriv.symbol
    kvec = grid.fundamental_wavenumber * grid.mode_numbers

    def step_map(w):
        out, _ = imr_step_reduced(StateField(grid, w[:n], w[n:]), system, config)
        return out

    def map_residual(w):
        out = step_map(w)
        return np.concatenate(
            [
                spectral_translate(out.eta, grid, -shift) - w[:n],
                spectral_translate(out.u, grid, -shift) - w[n:],
            ]
        )

    # per-mode preconditioner: inverse of (phase * linear rotation - identity)
    half = 0.5 * dt
    b12 = -lam * (1.0 + cf.a * lam**2) / np.real(1.0 - cf.b * lam**2)
    b21 = -lam * (1.0 + cf.a * lam**2) / np.real(1.0 - cf.d * lam**2)
    den = 1.0 - half * half * b12 * b21
    r11 = (1.0 + half * half * b12 * b21) / den
    r12 = 2.0 * half * b12 / den
    r21 = 2.0 * half * b21 / den
    phase = np.exp(1j * kvec * shift)
    m11 = phase * r11 - 1.0
    m12 = phase * r12
    m21 = phase * r21
    m22 = phase * r11 - 1.0
    mdet = m11 * m22 - m12 * m21
    degenerate = np.abs(mdet) < 1e-6
    mdet_safe = np.where(degenerate, 1.0, mdet)

    def precondition(w):
        eta_hat, u_hat = np.fft.fft(w[:n]), np.fft.fft(w[n:])
        out_eta = np.where(degenerate, eta_hat, (m22 * eta_hat - m12 * u_hat) / mdet_safe)
        out_u = np.where(degenerate, u_hat, (m11 * u_hat - m21 * eta_hat) / mdet_safe)
        return np.concatenate([np.real(np.fft.ifft(out_eta)), np.real(np.fft.ifft(out_u))])

    def solve_restarted(op, pre, rhs):
        from scipy.sparse.linalg import gmres

        try:
            delta, _ = gmres(op, rhs, M=pre, rtol=1e-9, atol=0.0, restart=80, maxiter=25)
        except TypeError:  # older scipy spells the relative tolerance 'tol'
            delta, _ = gmres(op, rhs, M=pre, tol=1e-9, atol=0.0, restart=80, maxiter=25)
        return delta

    def solve_augmented(op, pre, rhs):
        try:
            delta, _ = lgmres(op, rhs, M=pre, rtol=1e-9, atol=0.0, maxiter=krylov_iters, inner_m=40)
        except TypeError:
            delta, _ = lgmres(op, rhs, M=pre, tol=1e-9, atol=0.0, maxiter=krylov_iters, inner_m=40)
        return delta

    w = np.concatenate([_symmetrize(state.eta), _symmetrize(state.u)])
    residual = map_residual(w)
    best_w, best_norm = w.copy(), float(np.max(np.abs(residual)))
    overshoot_budget = 3  # full Newton steps may transiently worsen the sup norm
    for iteration in range(max_newton):
        norm = float(np.max(np.abs(residual)))
        l2 = float(np.linalg.norm(residual))
        if verbose:
            print(f"    newton {iteration}: map residual {norm:.3e}")
        if norm < best_norm:
            best_w, best_norm = w.copy(), norm
        if norm <= tol:
            break
        stepped = step_map(w)
        mid = StateField(grid, 0.5 * (w[:n] + stepped.eta), 0.5 * (w[n:] + stepped.u))

        def tangent_map(v):
            out, _ = imr_step_reduced_tangent(mid, StateField(grid, v[:n], v[n:]), system, config)
            return np.concatenate(
                [
                    spectral_translate(out.eta, grid, -shift),
                    spectral_translate(out.u, grid, -shift),
                ]
            ) - v

        op = LinearOperator((2 * n, 2 * n), matvec=tangent_map)
        pre = LinearOperator((2 * n, 2 * n), matvec=precondition)
        accepted = False
        first_delta = None
        # restarted solve first (cheap), augmented-subspace retry on stagnation;
        # descent is judged in the 2-norm (the quantity the linear solver shrinks)
        for solver in (solve_restarted, solve_augmented):
            delta = solver(op, pre, -residual)
            d_eta = _symmetrize(delta[:n])
            d_u = _symmetrize(delta[n:])
            d_eta -= d_eta.mean()
            d_u -= d_u.mean()
            delta = np.concatenate([d_eta, d_u])
            if first_delta is None:
                first_delta = delta
            stepsize = 1.0
            for _ in range(10):
                candidate = w + stepsize * delta
                cand_res = map_residual(candidate)
                cand_sup = float(np.max(np.abs(cand_res)))
                if float(np.linalg.norm(cand_res)) < l2 or cand_sup <= tol:
                    w, residual, accepted = candidate, cand_res, True
                    if verbose:
                        print(f"      accepted {solver.__name__} step {stepsize} -> {cand_sup:.3e}")
                    break
                stepsize *= 0.5
            if accepted:
                break
        if not accepted:
            # away from the roundoff floor a full step may still be the right
            # move even though both line searches failed in norm
            if norm > 100.0 * tol and overshoot_budget > 0 and first_delta is not None:
                overshoot_budget -= 1
                w = w + first_delta
                residual = map_residual(w)
                if verbose:
                    print(f"      overshoot step -> {np.max(np.abs(residual)):.3e}")
                continue
            break  # roundoff floor or stiff resonance
    norm = float(np.max(np.abs(residual)))
    if norm < best_norm:
        best_w, best_norm = w, norm
    return StateField(grid, best_w[:n], best_w[n:]), best_norm


def gaussian_field(grid: GridSpec, amplitude: float, width: float) -> StateField:
    """Gaussian surface hump (zero velocity), centered at the reversal center."""
    if width <= 0.0:
        raise ValueError("width must be positive")
    x = grid.nodes - grid.symmetry_center
    x = (x + 0.5 * grid.length) % grid.length - 0.5 * grid.length
    return StateField(grid, amplitude * np.exp(-((x / width) ** 2)), np.zeros(grid.n))


def plane_wave_field(grid: GridSpec, mode: int, amplitude: float) -> StateField:
    """Single cosine mode in the surface component (zero velocity)."""
    x = grid.nodes
    s = grid.fundamental_wavenumber
    return StateField(grid, amplitude * np.cos(s * mode * (x - grid.x0)), np.zeros(grid.n))


def symmetric_random_field(grid: GridSpec, seed: int, decay: float) -> StateField:
    """Smooth random state that is exactly reversal-symmetric by construction.

    Random Fourier data with exponentially decaying amplitudes is mirrored
    (half plus its reversal), so ``eta`` and ``u`` satisfy the reversal
    symmetry to machine precision.
    """
    if decay <= 0.0:
        raise ValueError("decay must be positive")
    rng = np.random.default_rng(seed)
    n = grid.n
    modes = np.abs(np.fft.fftfreq(n, 1.0 / n))
    filt = np.exp(-decay * modes)

    def draw():
        spectrum = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) * filt
        values = np.real(np.fft.ifft(spectrum))
        mirrored = 0.5 * (values + values[::-1])
        return mirrored / max(1.0, np.max(np.abs(mirrored)))

    return StateField(grid, draw(), draw())


def standard_fields(kind: str, grid: GridSpec, **params) -> StateField:
    """Factory over the named analytic test fields."""
    if kind == "gaussian":
        return gaussian_field(grid, params["amplitude"], params["width"])
    if kind == "plane_wave":
        return plane_wave_field(grid, params["mode"], params.get("amplitude", 1.0))
    if kind == "symmetric_random":
        return symmetric_random_field(grid, params.get("seed", 0), params.get("decay", 0.5))
    raise ValueError(f"unknown field kind {kind!r}")
