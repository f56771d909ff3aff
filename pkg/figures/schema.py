"""Readers for the versioned CSV/JSON artifacts the CLI emits.

The figure scripts never recompute physics: they consume these files
and nothing else.  Any structural surprise raises SchemaMismatch.
"""

from __future__ import annotations

import numpy as np


class SchemaMismatch(Exception):
    """Input file does not match the documented schema."""


def read_csv(path, schema: str, required_columns: tuple[str, ...]):
    """Parse a provenance-commented CSV into column arrays.

    Returns (columns, meta): a dict of float arrays keyed by column name
    and a dict of the '# key=value' provenance entries.
    """
    meta: dict[str, str] = {}
    header: list[str] | None = None
    rows: list[list[float]] = []
    schema_line: str | None = None
    with open(path, encoding="utf-8") as handle:
        for raw in handle:
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line.lstrip("#").strip()
                if schema_line is None:
                    schema_line = body
                elif "=" in body:
                    key, _, val = body.partition("=")
                    meta[key.strip()] = val.strip()
                continue
            if header is None:
                header = [name.strip() for name in line.split(",")]
                continue
            values = line.split(",")
            if len(values) != len(header):
                raise SchemaMismatch(f"{path}: row has {len(values)} fields, header has {len(header)}")
            try:
                rows.append([float(v) for v in values])
            except ValueError as exc:
                raise SchemaMismatch(f"{path}: non-numeric row {line!r}") from exc
    if schema_line != schema:
        raise SchemaMismatch(f"{path}: expected schema {schema!r}, found {schema_line!r}")
    if header is None or not rows:
        raise SchemaMismatch(f"{path}: no data rows")
    missing = [name for name in required_columns if name not in header]
    if missing:
        raise SchemaMismatch(f"{path}: missing columns {missing}")
    data = np.asarray(rows)
    return {name: data[:, i] for i, name in enumerate(header)}, meta


def style():
    """Fixed deterministic matplotlib style (no timestamps, stable fonts)."""
    import matplotlib

    matplotlib.use("Agg")
    matplotlib.rcParams.update(
        {
            "figure.dpi": 150,
            "savefig.dpi": 150,
            "font.size": 9,
            "font.family": "DejaVu Sans",
            "axes.grid": False,
            "svg.hashsalt": "fixed",
        }
    )
    return matplotlib


SAVE_METADATA = {"Software": "figures"}
