"""Run configuration: strict JSON schema with documented defaults.

The document has five blocks (``model``, ``grid``, ``scheme``, ``initial``,
``run``, ``output``, plus an optional ``tangent``).  Unknown keys anywhere are
rejected so a typo cannot silently corrupt an experiment.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .errors import ConfigError
from .gridops import GridSpec
from .model import ModelCoefficients

_MODEL_KEYS = {
    "a", "b", "c", "d",
    "alpha11", "alpha12", "alpha22", "beta11", "beta12", "beta22",
    "theta", "nu", "mu",
}
_GRID_KEYS = {"x0", "length", "n"}
_SCHEME_KEYS = {"kind", "operator", "dt", "fp_tol", "fp_max_iters"}
_INITIAL_KEYS = {
    "kind", "speed", "tol", "max_newton", "amplitude_guess", "refine_discrete",
    "amplitude", "width", "mode", "seed", "decay", "path",
}
_RUN_KEYS = {"t_end", "sample_every"}
_OUTPUT_KEYS = {"directory"}
_TANGENT_KEYS = {"seed"}
_TOP_KEYS = {"model", "grid", "scheme", "initial", "run", "output", "tangent"}

_INITIAL_KINDS = ("solitary", "gaussian", "plane_wave", "symmetric_random", "file")


@dataclass(frozen=True)
class SchemeBlock:
    kind: str = "imr_reduced"
    operator: str = "spectral"
    dt: float = 0.1
    fp_tol: float = 1e-12
    fp_max_iters: int = 100


@dataclass(frozen=True)
class InitialBlock:
    kind: str = "gaussian"
    # solitary
    speed: float = 1.2
    tol: float = 1e-10
    max_newton: int = 50
    amplitude_guess: float | None = None
    refine_discrete: bool = False
    # gaussian
    amplitude: float = 0.1
    width: float = 5.0
    # plane wave
    mode: int = 1
    # symmetric random
    seed: int = 0
    decay: float = 0.5
    # file
    path: str | None = None


@dataclass(frozen=True)
class RunBlock:
    t_end: float = 10.0
    sample_every: int = 10


@dataclass(frozen=True)
class OutputBlock:
    directory: str = "out"


@dataclass(frozen=True)
class TangentBlock:
    seed: int = 0


@dataclass(frozen=True)
class RunConfig:
    model: ModelCoefficients
    grid: GridSpec
    scheme: SchemeBlock = field(default_factory=SchemeBlock)
    initial: InitialBlock = field(default_factory=InitialBlock)
    run: RunBlock = field(default_factory=RunBlock)
    output: OutputBlock = field(default_factory=OutputBlock)
    tangent: TangentBlock | None = None


def _check_keys(block: dict, allowed: set, where: str):
    unknown = set(block) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) {sorted(unknown)} in {where!r} block")


def _build(cls, block: dict, where: str):
    try:
        return cls(**block)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid {where!r} block: {exc}") from exc


def parse_config(text: str, base_dir: str | Path | None = None) -> RunConfig:
    """Parse and validate a configuration document.

    Syntax errors surface with their line number; semantic errors name the
    offending field.  ``base_dir`` anchors relative file references.
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"syntax error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("top level of the configuration must be an object")
    _check_keys(raw, _TOP_KEYS, "top-level")
    for required in ("model", "grid"):
        if required not in raw:
            raise ConfigError(f"missing required block {required!r}")

    _check_keys(raw["model"], _MODEL_KEYS, "model")
    model = _build(ModelCoefficients, raw["model"], "model")
    _check_keys(raw["grid"], _GRID_KEYS, "grid")
    grid = _build(GridSpec, raw["grid"], "grid")

    scheme = _build(SchemeBlock, raw.get("scheme", {}), "scheme")
    _check_keys(raw.get("scheme", {}), _SCHEME_KEYS, "scheme")
    if scheme.dt <= 0.0:
        raise ConfigError("scheme.dt must be positive")
    if scheme.fp_tol <= 0.0:
        raise ConfigError("scheme.fp_tol must be positive")
    if scheme.fp_max_iters < 1:
        raise ConfigError("scheme.fp_max_iters must be at least 1")
    if scheme.kind not in ("imr_reduced", "imr_full", "preissman_box"):
        raise ConfigError(f"scheme.kind {scheme.kind!r} is not a known scheme")
    if scheme.operator not in ("spectral", "central"):
        raise ConfigError(f"scheme.operator {scheme.operator!r} is not a known operator")

    _check_keys(raw.get("initial", {}), _INITIAL_KEYS, "initial")
    initial = _build(InitialBlock, raw.get("initial", {}), "initial")
    if initial.kind not in _INITIAL_KINDS:
        raise ConfigError(f"initial.kind {initial.kind!r} is not one of {_INITIAL_KINDS}")
    if initial.kind == "file":
        if not initial.path:
            raise ConfigError("initial.path is required for initial.kind = 'file'")
        resolved = Path(base_dir or ".") / initial.path
        if not resolved.exists():
            raise ConfigError(f"initial.path {str(resolved)!r} does not exist")

    _check_keys(raw.get("run", {}), _RUN_KEYS, "run")
    run_block = _build(RunBlock, raw.get("run", {}), "run")
    if run_block.t_end < 0.0:
        raise ConfigError("run.t_end must be nonnegative")
    if run_block.sample_every < 1:
        raise ConfigError("run.sample_every must be at least 1")

    _check_keys(raw.get("output", {}), _OUTPUT_KEYS, "output")
    output = _build(OutputBlock, raw.get("output", {}), "output")

    tangent = None
    if "tangent" in raw:
        _check_keys(raw["tangent"], _TANGENT_KEYS, "tangent")
        tangent = _build(TangentBlock, raw["tangent"], "tangent")

    return RunConfig(
        model=model, grid=grid, scheme=scheme, initial=initial,
        run=run_block, output=output, tangent=tangent,
    )


def serialize_config(config: RunConfig) -> str:
    """Canonical JSON text; ``parse_config(serialize_config(c)) == c``."""
    doc = {
        "model": {k: v for k, v in asdict(config.model).items() if v is not None},
        "grid": asdict(config.grid),
        "scheme": asdict(config.scheme),
        "initial": {k: v for k, v in asdict(config.initial).items() if v is not None},
        "run": asdict(config.run),
        "output": asdict(config.output),
    }
    if config.tangent is not None:
        doc["tangent"] = asdict(config.tangent)
    return json.dumps(doc, indent=2, sort_keys=True)
