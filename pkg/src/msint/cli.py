"""Command-line simulator: run | dispersion | solitary | check | convergence.

Exit codes: 0 success, 2 step/check failure, 3 configuration error.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from . import dispersion as disp
from .checks import run_invariant_checks
from .config import RunConfig, parse_config, serialize_config
from .errors import ConfigError, MsintError, StepFailureError
from .integrate import SchemeConfig, TangentPair, run
from .model import classify_structure
from .output import StepTimer, diagnostics_table, write_csv, write_meta
from .semidiscrete import (
    StateField,
    make_box_system,
    make_full_system,
    make_reduced_system,
    reconstruct_aux,
    rhs_reduced,
)
from .studies import run_convergence_studies
from .waves import (
    SolitaryWaveSpec,
    gaussian_field,
    plane_wave_field,
    refine_to_discrete_wave,
    solve_profile,
    symmetric_random_field,
)


def _scheme_config(config: RunConfig) -> SchemeConfig:
    s = config.scheme
    return SchemeConfig(
        dt=s.dt, fp_tol=s.fp_tol, fp_max_iters=s.fp_max_iters, operator=s.operator, scheme=s.kind
    )


def _read_profile_csv(path: Path, grid) -> StateField:
    rows = []
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(",")
        if parts[0] == "x":
            continue
        rows.append([float(v) for v in parts])
    data = np.asarray(rows)
    if data.shape[0] != grid.n or data.shape[1] < 3:
        raise ConfigError(
            f"profile file {path} has shape {data.shape}, expected ({grid.n}, >=3) matching the grid"
        )
    return StateField(grid, data[:, 1], data[:, 2])


def build_initial(config: RunConfig, base_dir: Path, system=None):
    """Construct the initial state named by the config's initial block."""
    ini = config.initial
    grid = config.grid
    meta = {}
    if ini.kind == "solitary":
        spec = SolitaryWaveSpec(
            speed=ini.speed,
            grid=grid,
            tol=ini.tol,
            max_newton=ini.max_newton,
            amplitude_guess=ini.amplitude_guess,
        )
        wave = solve_profile(spec, config.model)
        state = wave.state
        meta = {
            "classification": wave.classification.upper(),
            "profile_residual": wave.residual,
            "tail_amplitude": wave.tail_amplitude,
        }
        if ini.refine_discrete:
            if system is None or system.form != "reduced":
                raise ConfigError("refine_discrete requires the imr_reduced scheme")
            state, map_residual = refine_to_discrete_wave(state, ini.speed, system, config.scheme.dt)
            meta["discrete_map_residual"] = map_residual
        return state, meta
    if ini.kind == "gaussian":
        return gaussian_field(grid, ini.amplitude, ini.width), meta
    if ini.kind == "plane_wave":
        return plane_wave_field(grid, ini.mode, ini.amplitude), meta
    if ini.kind == "symmetric_random":
        return symmetric_random_field(grid, ini.seed, ini.decay), meta
    if ini.kind == "file":
        return _read_profile_csv(base_dir / ini.path, grid), meta
    raise ConfigError(f"unhandled initial kind {ini.kind!r}")


def _tangent_pair(config: RunConfig, grid) -> TangentPair:
    rng = np.random.default_rng(config.tangent.seed)

    def field():
        values = rng.standard_normal((grid.n, 10))
        spectrum = np.fft.fft(values, axis=0)
        spectrum[0, [0, 5]] = 0.0
        if grid.n % 2 == 0:
            spectrum[grid.n // 2, [0, 5]] = 0.0
        return np.real(np.fft.ifft(spectrum, axis=0))

    return TangentPair(field(), field())


def cmd_run(config: RunConfig, out_dir: Path, base_dir: Path, config_text: str) -> int:
    scheme = _scheme_config(config)
    if scheme.scheme == "preissman_box":
        system = make_box_system(config.model, config.grid)
    elif scheme.scheme == "imr_full":
        system = make_full_system(config.model, config.grid, scheme.operator)
    else:
        system = make_reduced_system(config.model, config.grid, scheme.operator)

    if scheme.scheme == "imr_reduced":
        helper = system
    elif scheme.scheme == "imr_full":
        helper = make_reduced_system(config.model, config.grid, scheme.operator)
    else:
        helper = system
    state, initial_meta = build_initial(config, base_dir, helper)

    tangent = None
    initial = state
    if scheme.scheme == "imr_full":
        initial = reconstruct_aux(state, rhs_reduced(state, helper), system)
        if config.tangent is not None:
            tangent = _tangent_pair(config, config.grid)

    with StepTimer() as timer:
        result = run(
            initial,
            system,
            scheme,
            t_end=config.run.t_end,
            sample_every=config.run.sample_every,
            tangent=tangent,
        )
    ham = classify_structure(config.model).name == "MULTI_SYMPLECTIC_HAMILTONIAN"
    columns, rows = diagnostics_table(result.records, with_hamiltonian=ham, h=config.grid.h)
    comments = []
    if result.failed:
        comments.append(f"truncated: step failure at t = {result.last_good_time + scheme.dt:.6f}")
        comments.append(f"last good time: {result.last_good_time:.6f}")
    write_csv(out_dir / "diagnostics.csv", columns, rows, comments)
    write_meta(
        out_dir / "meta.json",
        config_text,
        timer.elapsed,
        "run",
        extra={
            "initial": initial_meta,
            "failed": result.failed,
            "max_fixed_point_iterations": result.max_iterations,
        },
    )
    return 2 if result.failed else 0


def cmd_solitary(config: RunConfig, out_dir: Path, base_dir: Path, config_text: str) -> int:
    if config.initial.kind != "solitary":
        raise ConfigError("the solitary command requires initial.kind = 'solitary'")
    reduced = make_reduced_system(config.model, config.grid, config.scheme.operator)
    with StepTimer() as timer:
        state, meta = build_initial(config, base_dir, reduced)
    comments = [
        f"speed: {config.initial.speed}",
        f"residual: {meta['profile_residual']:.16e}",
        f"classification: {meta['classification']}",
        f"tail_amplitude: {meta['tail_amplitude']:.16e}",
    ]
    rows = [[x, e, u] for x, e, u in zip(config.grid.nodes, state.eta, state.u)]
    write_csv(out_dir / "profile.csv", ["x", "eta", "u"], rows, comments)
    write_meta(out_dir / "meta.json", config_text, timer.elapsed, "solitary", extra={"initial": meta})
    return 0


def cmd_dispersion(config: RunConfig, out_dir: Path, base_dir: Path, config_text: str, n_modes: int) -> int:
    linear = config.model.replace(
        alpha11=0.0, alpha12=0.0, alpha22=0.0, beta11=0.0, beta12=0.0, beta22=0.0
    )
    scheme = _scheme_config(config)
    if scheme.scheme == "preissman_box":
        system = make_box_system(linear, config.grid)
        operator_kind = "imr_space"
    else:
        system = make_reduced_system(linear, config.grid, scheme.operator)
        operator_kind = scheme.operator
    grid = config.grid
    p_max = max(1, grid.n // 4)
    modes = sorted(set(np.linspace(1, p_max, min(n_modes, p_max)).round().astype(int)))
    s = grid.fundamental_wavenumber
    rows = []
    with StepTimer() as timer:
        for p in modes:
            xi = s * p
            k = disp.spatial_wavenumber_map(xi, operator_kind, grid.h)
            omega, _ = disp.continuous_omega(k, linear)
            predicted = disp.imr_time_map_inverse(omega, scheme.dt)
            measured = disp.measure_frequency(system, scheme, int(p), steps=16)
            rows.append([xi, k, omega, predicted, measured, abs(measured - predicted)])
    write_csv(
        out_dir / "dispersion.csv",
        ["xi", "k", "omega_exact", "Omega_pred", "Omega_measured", "residual"],
        rows,
    )
    write_meta(out_dir / "meta.json", config_text, timer.elapsed, "dispersion")
    return 0


def cmd_check(config_text: str) -> int:
    with StepTimer() as timer:
        results = run_invariant_checks()
    failed = 0
    for result in results:
        status = "PASS" if result.passed else "FAIL"
        print(f"[{status}] {result.name}: {result.value:.3e} (bound {result.bound:.1e})")
        failed += 0 if result.passed else 1
    print(f"{len(results) - failed}/{len(results)} checks passed in {timer.elapsed:.1f}s")
    return 0 if failed == 0 else 2


def cmd_convergence(out_dir: Path, config_text: str) -> int:
    with StepTimer() as timer:
        studies = run_convergence_studies()
    rows = []
    ok = True
    for study in studies:
        for parameter, error in zip(study.parameters, study.errors):
            rows.append([study.name, parameter, error])
        slope_text = "n/a" if study.slope is None else f"{study.slope:.3f}"
        status = "PASS" if study.passed else "FAIL"
        print(f"[{status}] {study.name}: slope {slope_text}, errors {study.errors}")
        ok = ok and study.passed
    write_csv(out_dir / "convergence.csv", ["study", "parameter", "error"], rows)
    write_meta(
        out_dir / "meta.json",
        config_text,
        timer.elapsed,
        "convergence",
        extra={"slopes": {s.name: s.slope for s in studies}},
    )
    return 0 if ok else 2


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="msint",
        description="Structure-preserving integrators for abcd-Boussinesq systems",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("run", "dispersion", "solitary", "check", "convergence"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="path to the JSON configuration")
        p.add_argument("--out", default=None, help="output directory (default: config's output block)")
        if name == "dispersion":
            p.add_argument("--modes", type=int, default=32, help="number of modes to measure")
    args = parser.parse_args(argv)

    config_path = Path(args.config)
    try:
        config_text = config_path.read_text(encoding="utf-8")
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 3
    base_dir = config_path.parent
    try:
        config = parse_config(config_text, base_dir=base_dir)
        canonical = serialize_config(config)
        out_dir = Path(args.out) if args.out else base_dir / config.output.directory
        if args.command == "run":
            return cmd_run(config, out_dir, base_dir, canonical)
        if args.command == "solitary":
            return cmd_solitary(config, out_dir, base_dir, canonical)
        if args.command == "dispersion":
            return cmd_dispersion(config, out_dir, base_dir, canonical, args.modes)
        if args.command == "check":
            return cmd_check(canonical)
        if args.command == "convergence":
            return cmd_convergence(out_dir, canonical)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 3
    except StepFailureError as exc:
        print(f"step failure: {exc}", file=sys.stderr)
        return 2
    except MsintError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
