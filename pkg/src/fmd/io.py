"""Delimited and JSON tables for distributions and derived data.

Distribution tables share one header, ``a,abscissa,p_aN,q_aNp1,density``,
where ``abscissa = a/(N+1)`` and ``density = (N+2) q[a]``. Floats are written
with 17 significant digits so a file read back reproduces the doubles
exactly; masses below 1e-300 are written as 0 unless log output is chosen,
in which case the mass columns hold natural logarithms instead.
"""

from __future__ import annotations

import csv
import io as _io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from .core import MassFunction, PredictiveVector
from .errors import FMDError, InvalidMassError

__all__ = [
    "COLUMNS",
    "LOG_COLUMNS",
    "LINEAR_FLOOR",
    "Table",
    "distribution_table",
    "format_value",
    "render_table",
    "write_table",
    "read_table",
    "mass_from_table",
]

COLUMNS = ("a", "abscissa", "p_aN", "q_aNp1", "density")
LOG_COLUMNS = ("a", "abscissa", "p_aN", "log_q_aNp1", "log_density")
#: Linear masses below this are serialized as 0.
LINEAR_FLOOR = 1e-300


@dataclass(frozen=True)
class Table:
    """Named columns, rows of plain values, and free-form metadata."""

    columns: tuple[str, ...]
    rows: tuple[tuple[Any, ...], ...]
    meta: dict = field(default_factory=dict, compare=False)

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [row[i] for row in self.rows]


def distribution_table(
    p: PredictiveVector | None,
    q: MassFunction | None,
    log_output: bool = False,
    meta: dict | None = None,
) -> Table:
    """Tabulate a predictive vector and/or the matching mass function.

    With ``q`` there are ``N+2`` rows; ``p_aN`` is empty in the last. With
    only ``p`` there are ``N+1`` rows and the mass columns are empty.
    """
    if p is None and q is None:
        raise ValueError("need a predictive vector or a mass function")
    if q is not None:
        n = q.Nplus1
        if p is not None and p.N != n - 1:
            raise FMDError(f"predictive vector has N={p.N} but mass has N+1={n}")
    else:
        n = p.N + 1
    nrows = n + 1 if q is not None else n
    rows = []
    for a in range(nrows):
        pa = float(p.values[a]) if p is not None and a < n else None
        if q is None:
            mass = dens = None
        else:
            lq = float(q.log_values[a])
            if log_output:
                mass, dens = lq, lq + math.log(n + 1)
            else:
                v = math.exp(lq)
                mass = v if v >= LINEAR_FLOOR else 0.0
                dens = (n + 1) * mass
        rows.append((a, a / n, pa, mass, dens))
    return Table(LOG_COLUMNS if log_output else COLUMNS, tuple(rows), dict(meta or {}))


def format_value(value: Any) -> str:
    """Text form used in delimited output."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, Fraction):
        value = float(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        if v == 0.0:
            return "0"
        return format(v, ".17g")
    return str(value)


def _json_value(value: Any) -> Any:
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, Fraction):
        value = float(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        return v if math.isfinite(v) else None
    if isinstance(value, dict):
        return {str(k): _json_value(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_value(v) for v in value]
    return value


def render_table(table: Table, fmt: str = "csv") -> str:
    """Serialize ``table`` to CSV (header plus rows) or JSON (``meta`` + ``rows``)."""
    if fmt == "csv":
        buf = _io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(table.columns)
        for row in table.rows:
            writer.writerow([format_value(v) for v in row])
        return buf.getvalue()
    if fmt == "json":
        doc = {
            "meta": _json_value(table.meta),
            "rows": [
                {c: _json_value(v) for c, v in zip(table.columns, row)} for row in table.rows
            ],
        }
        return json.dumps(doc, indent=1, allow_nan=False) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def write_table(table: Table, path: str | Path, fmt: str = "csv") -> Path:
    path = Path(path)
    path.write_text(render_table(table, fmt), encoding="utf-8")
    return path


def _parse_cell(text: str) -> Any:
    if text == "":
        return None
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def read_table(path: str | Path) -> Table:
    """Read a table written by :func:`write_table` (format detected from content)."""
    text = Path(path).read_text(encoding="utf-8")
    if text.lstrip().startswith("{"):
        doc = json.loads(text)
        rows = doc.get("rows", [])
        columns = tuple(rows[0].keys()) if rows else ()
        return Table(columns, tuple(tuple(r[c] for c in columns) for r in rows), doc.get("meta", {}))
    reader = csv.reader(_io.StringIO(text))
    header = next(reader)
    rows = tuple(tuple(_parse_cell(c) for c in row) for row in reader if row)
    return Table(tuple(header), rows)


def mass_from_table(table: Table) -> MassFunction:
    """Rebuild and revalidate the mass function stored in a distribution table."""
    if "q_aNp1" in table.columns:
        values = [0.0 if v is None else float(v) for v in table.column("q_aNp1")]
        return MassFunction.from_linear(values)
    if "log_q_aNp1" in table.columns:
        values = [-math.inf if v is None else float(v) for v in table.column("log_q_aNp1")]
        return MassFunction.from_log(values)
    raise InvalidMassError("table has no mass column")


def table_from_records(columns: Sequence[str], records: Iterable[Sequence[Any]], meta=None) -> Table:
    """Build a generic table from row sequences."""
    return Table(tuple(columns), tuple(tuple(r) for r in records), dict(meta or {}))
