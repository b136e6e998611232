"""Experiment records: JSON (full) and CSV (one row per grid point).

A :class:`Table` names its grid columns, value columns and optional
standard-error columns.  JSON output is
``{config, version, timestamp, params, grid, values, stderr, meta}``; CSV is
UTF-8 with a header row and floats written with 17 significant digits.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from importlib import metadata
from pathlib import Path
from typing import Any, Sequence

import numpy as np

__all__ = ["Table", "code_version", "format_float", "to_jsonable", "write_json", "write_csv", "csv_text", "column", "build_record"]

DISTRIBUTION = "artifact"


def code_version() -> str:
    try:
        return metadata.version(DISTRIBUTION)
    except metadata.PackageNotFoundError:
        from . import __version__

        return __version__


def format_float(x: float) -> str:
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def to_jsonable(obj: Any) -> Any:
    """Convert numpy scalars/arrays and complex numbers to JSON types.

    Complex numbers become ``{"re": .., "im": ..}``; non-finite floats
    become ``null``.
    """
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": to_jsonable(obj.real), "im": to_jsonable(obj.imag)}
    return obj


@dataclass
class Table:
    """Column-oriented experiment output.

    Attributes
    ----------
    grid : dict
        Grid columns (the swept parameters), name to sequence.
    values : dict
        Value columns, aligned with the grid.
    stderr : dict
        Standard-error columns keyed like ``values`` (stochastic runs only).
    meta : dict
        Extra diagnostics such as regime flags; JSON only.
    """

    grid: dict
    values: dict
    stderr: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        lengths = {len(v) for v in list(self.grid.values()) + list(self.values.values()) + list(self.stderr.values())}
        if len(lengths) > 1:
            raise ValueError(f"columns have unequal lengths {sorted(lengths)}")

    @property
    def columns(self) -> list[str]:
        return list(self.grid) + list(self.values) + [f"stderr_{k}" for k in self.stderr]

    def rows(self):
        cols = list(self.grid.values()) + list(self.values.values()) + list(self.stderr.values())
        return zip(*cols) if cols else iter(())


def build_record(table: Table, config: dict, timestamp: str | None) -> dict:
    return {
        "config": config,
        "version": code_version(),
        "timestamp": timestamp or datetime.now(timezone.utc).isoformat(),
        "params": config.get("params", {}),
        "grid": table.grid,
        "values": table.values,
        "stderr": table.stderr,
        "meta": table.meta,
    }


def write_json(path: str | Path, table: Table, config: dict, timestamp: str | None = None) -> None:
    text = json.dumps(to_jsonable(build_record(table, config, timestamp)), indent=1, sort_keys=True)
    Path(path).write_text(text + "\n", encoding="utf-8")


def _cell(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format_float(float(x))
    return str(x)


def csv_text(table: Table) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows():
        writer.writerow([_cell(x) for x in row])
    return buf.getvalue()


def write_csv(path: str | Path, table: Table) -> None:
    Path(path).write_text(csv_text(table), encoding="utf-8")


def column(values: Sequence) -> list:
    """Plain list of Python scalars from an array-like."""
    return np.asarray(values).tolist()
