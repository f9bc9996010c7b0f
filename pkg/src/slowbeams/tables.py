"""Named column tables and their CSV representation.

Numbers are written with 17 significant digits so that reading a file back
reproduces every double exactly.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

SCHEMAS = {
    "velocities": ("v_mps", "count"),
    "velocity_fit": ("drift_mps", "drift_err", "T_K", "T_err", "amplitude", "amplitude_err",
                     "mode_mps", "chi2", "dof"),
    "ramp": ("t_s", "T_K", "rate_cps"),
    "enthalpy": ("molecule", "mass_amu", "dH_kJmol", "err_kJmol"),
    "trajectories": ("id", "t", "x", "y", "z", "vx", "vy", "vz"),
    "final_velocities": ("power_W", "vx", "vy", "vz", "hit"),
    "focus_summary": ("power_W", "dual", "hit_fraction", "gain", "width_vy", "dose_p50",
                      "dose_p90", "dose_p99"),
    "cooling_trace": ("t_s", "KE_J", "photon_n", "theta"),
    "cool_summary": ("power_W", "ke_initial_J", "ke_final_J", "ke_ratio", "late_theta"),
    "threshold": ("power_W", "late_theta", "crossed"),
}
TEXT_COLUMNS = {"molecule"}


class NonFiniteError(ValueError):
    def __init__(self, column, name=""):
        super().__init__(f"non-finite value in column {column!r} of table {name!r}")
        self.column = column


def format_number(x):
    return "%.16e" % x


@dataclass(frozen=True)
class SeriesTable:
    name: str
    columns: tuple
    rows: tuple

    def __post_init__(self):
        cols = tuple(self.columns)
        expected = SCHEMAS.get(self.name)
        if expected is not None and cols != expected:
            raise ValueError(f"table {self.name!r} needs columns {expected}, got {cols}")
        rows = tuple(tuple(r) for r in self.rows)
        for i, r in enumerate(rows):
            if len(r) != len(cols):
                raise ValueError(f"row {i} has {len(r)} entries, expected {len(cols)}")
        object.__setattr__(self, "columns", cols)
        object.__setattr__(self, "rows", rows)
        bad = self.nonfinite_columns()
        if bad:
            raise NonFiniteError(bad[0], self.name)

    @classmethod
    def from_columns(cls, name, **data):
        columns = SCHEMAS[name] if name in SCHEMAS else tuple(data)
        arrays = [np.atleast_1d(data[c]) for c in columns]
        n = len(arrays[0])
        if any(len(a) != n for a in arrays):
            raise ValueError("columns must have equal length")
        rows = [tuple(_scalar(a[i]) for a in arrays) for i in range(n)]
        return cls(name, columns, rows)

    def nonfinite_columns(self):
        bad = []
        for j, c in enumerate(self.columns):
            if c in TEXT_COLUMNS:
                continue
            if any(not math.isfinite(r[j]) for r in self.rows):
                bad.append(c)
        return bad

    def column(self, name):
        j = self.columns.index(name)
        if name in TEXT_COLUMNS:
            return [r[j] for r in self.rows]
        return np.array([r[j] for r in self.rows], dtype=float)

    def __len__(self):
        return len(self.rows)


def _scalar(x):
    if isinstance(x, (str, np.str_)):
        return str(x)
    return float(x)


def write_csv(table, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(table.columns)
        for r in table.rows:
            w.writerow([v if isinstance(v, str) else format_number(v) for v in r])
    return path


def read_csv(path, name=None, allow_nonfinite=False):
    """Read a table written by :func:`write_csv`.

    With ``allow_nonfinite`` a tampered file still loads, so the caller can
    report which columns are broken via ``nonfinite_columns``.
    """
    path = Path(path)
    name = name or path.stem
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = tuple(next(reader))
        except StopIteration:
            raise ValueError(f"{path} is empty") from None
        rows = []
        for lineno, r in enumerate(reader, start=2):
            if not r:
                continue
            if len(r) != len(header):
                raise ValueError(f"{path}:{lineno}: expected {len(header)} fields, got {len(r)}")
            try:
                rows.append(tuple(v if c in TEXT_COLUMNS else float(v)
                                  for c, v in zip(header, r)))
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
    schema_name = name if name in SCHEMAS and SCHEMAS[name] == header else f"{name}:raw"
    if allow_nonfinite:
        table = object.__new__(SeriesTable)
        object.__setattr__(table, "name", schema_name)
        object.__setattr__(table, "columns", header)
        object.__setattr__(table, "rows", tuple(rows))
        return table
    return SeriesTable(schema_name, header, rows)


def histogram_table(edges, counts):
    """Velocity histogram as (bin center, count) rows."""
    edges = np.asarray(edges, dtype=float)
    centers = 0.5 * (edges[1:] + edges[:-1])
    return SeriesTable.from_columns("velocities", v_mps=centers, count=np.asarray(counts))
