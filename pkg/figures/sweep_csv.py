"""Shared CSV loading for the figure scripts.

Understands the sweep tables written by the arqpower CLI: '#'-prefixed
``key: value`` metadata lines, a header row, then typed data rows. The
scripts never recompute model quantities; everything they draw comes out
of these files.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass


class SchemaError(ValueError):
    """The file is not a sweep table of the expected kind."""


@dataclass
class SweepData:
    path: str
    meta: dict
    columns: list
    rows: list  # one dict per row, column -> float/bool

    def column(self, name):
        return [row[name] for row in self.rows]

    @property
    def power_columns(self):
        return [c for c in self.columns
                if c.startswith("p") and c.endswith("_db") and not c.startswith("cf_")]

    @property
    def closed_form_columns(self):
        return [c for c in self.columns if c.startswith("cf_p")]

    def label(self, with_mode=True):
        bits = [f"M={self.meta.get('max_rounds', '?')}"]
        length = self.meta.get("length", "?")
        bits.append("L=inf" if length == "asymptotic" else f"L={length}")
        if with_mode:
            bits.append(self.meta.get("mode", "?"))
        return ", ".join(bits)


def _parse_cell(text: str):
    if text == "true":
        return True
    if text == "false":
        return False
    try:
        return float(text)
    except ValueError:
        return text


def load_sweep(path) -> SweepData:
    meta = {}
    table_lines = []
    with open(path, newline="") as fh:
        for line in fh:
            if line.startswith("#"):
                key, _, value = line[1:].partition(":")
                meta[key.strip()] = value.strip()
            elif line.strip():
                table_lines.append(line)
    if not table_lines:
        raise SchemaError(f"{path}: no header row")
    reader = csv.reader(table_lines)
    columns = next(reader)
    rows = [dict(zip(columns, (_parse_cell(c) for c in row))) for row in reader]
    if not rows:
        raise SchemaError(f"{path}: table has no data rows")
    return SweepData(path=str(path), meta=meta, columns=columns, rows=rows)


def require_kind(data: SweepData, expected: str, x_column: str) -> None:
    kind = data.meta.get("kind")
    if kind != expected:
        raise SchemaError(
            f"{data.path}: sweep kind {kind!r} does not match expected {expected!r}")
    if not data.columns or data.columns[0] != x_column or "outage" not in data.columns:
        raise SchemaError(
            f"{data.path}: header {data.columns!r} does not match the "
            f"{expected} schema (expected leading {x_column!r} and 'outage')")


def finite_xy(xs, ys):
    """Drop rows where either value is non-finite (failed sweep points)."""
    pairs = [(x, y) for x, y in zip(xs, ys)
             if isinstance(x, float) and isinstance(y, float)
             and math.isfinite(x) and math.isfinite(y)]
    return [p[0] for p in pairs], [p[1] for p in pairs]
