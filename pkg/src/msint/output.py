"""Deterministic file output: fixed-format CSV tables and a JSON sidecar."""

from __future__ import annotations

import json
import sys
import time
from pathlib import Path

import numpy as np

FLOAT_FORMAT = "{:.16e}"  # 17 significant digits: lossless double round-trip


def format_value(value) -> str:
    if isinstance(value, (float, np.floating)):
        return FLOAT_FORMAT.format(float(value))
    return str(value)


def write_csv(path, columns, rows, comments=()):
    """Write a CSV table with fixed column order and 17-digit floats.

    ``comments`` go first as ``#``-prefixed lines (metadata headers and
    truncation markers); readers must skip them.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"# {comment}" for comment in comments]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(format_value(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_meta(path, config_text: str, wall_time: float, command: str, extra=None):
    """JSON sidecar: config echo, package versions, wall time."""
    import scipy

    from . import __version__

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    doc = {
        "command": command,
        "config": json.loads(config_text),
        "versions": {
            "msint": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "python": sys.version.split()[0],
        },
        "wall_time_s": wall_time,
    }
    if extra:
        doc.update(extra)
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def diagnostics_table(records, with_hamiltonian: bool, h: float = 1.0):
    """Column layout of a diagnostics series.

    Raw grid sums come first, then error columns ``|Q(t) - Q(0)|``, then the
    integral-consistent values ``h * Q`` (the grid sums times the mesh width).
    """
    columns = ["t", "E_h", "I_h", "frakI_h"]
    if with_hamiltonian:
        columns.append("H_h")
    columns += ["C1", "C2"]
    value_columns = list(columns[1:])
    columns += [f"err_{name}" for name in value_columns]
    columns += [f"h{name}" for name in value_columns]

    first = records[0]

    def values(record):
        vals = [record.energy, record.momentum, record.quadratic]
        if with_hamiltonian:
            vals.append(record.hamiltonian)
        vals += [record.c1, record.c2]
        return vals

    base = values(first)
    rows = []
    for record in records:
        vals = values(record)
        errors = [abs(v - v0) for v, v0 in zip(vals, base)]
        scaled = [h * v for v in vals]
        rows.append([record.t] + vals + errors + scaled)
    return columns, rows


class StepTimer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start
        return False
