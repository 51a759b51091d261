"""Typed result tables and their CSV/JSON serialization.

CSV layout (UTF-8, LF line endings)::

    # provenance: {"config": ..., "config_hash": ..., "table_hash": ..., ...}
    col_a,col_b,...
    1,0.10000000000000001,...

Floats are written with 17 significant digits (``%.17g``) so they parse back
to the identical double.  The table hash is the SHA-256 of the canonical JSON
of ``[schema, rows]`` and does not depend on the file format.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

from ..errors import NumericalFailure, OutputError, ValidationError

COLUMN_TYPES = {"int": int, "float": float, "str": str}
PROVENANCE_PREFIX = "# provenance: "


@dataclass
class ResultTable:
    columns: list[tuple[str, str]]
    rows: list[list] = field(default_factory=list)
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        for name, kind in self.columns:
            if kind not in COLUMN_TYPES:
                raise ValidationError(f"column {name!r} has unknown type {kind!r}")
        self.rows = [self._coerce_row(r) for r in self.rows]

    @property
    def names(self) -> list[str]:
        return [c[0] for c in self.columns]

    def _coerce_row(self, row: Sequence) -> list:
        if len(row) != len(self.columns):
            raise ValidationError(f"row has {len(row)} cells, schema has {len(self.columns)} columns")
        cells = [COLUMN_TYPES[kind](v) for v, (_, kind) in zip(row, self.columns)]
        for (name, kind), v in zip(self.columns, cells):
            if kind == "str" and ("\x00" in v or "\r" in v):
                raise ValidationError(f"column {name!r} holds a NUL or carriage return, which CSV cannot carry")
        return cells

    def append(self, *row) -> None:
        self.rows.append(self._coerce_row(row))

    def column(self, name: str) -> list:
        i = self.names.index(name)
        return [r[i] for r in self.rows]

    def records(self) -> list[dict]:
        return [dict(zip(self.names, r)) for r in self.rows]

    def check_finite(self) -> None:
        for i, row in enumerate(self.rows):
            for (name, kind), v in zip(self.columns, row):
                if kind == "float" and not math.isfinite(v):
                    raise NumericalFailure(f"non-finite value {v!r} in row {i}, column {name!r}; export aborted")

    def table_hash(self) -> str:
        body = json.dumps([self.columns, self.rows], sort_keys=True, separators=(",", ":"), allow_nan=False)
        return hashlib.sha256(body.encode("utf-8")).hexdigest()

    def __eq__(self, other) -> bool:
        if not isinstance(other, ResultTable):
            return NotImplemented
        return (
            [tuple(c) for c in self.columns] == [tuple(c) for c in other.columns]
            and self.rows == other.rows
            and self.provenance == other.provenance
        )


def _format_cell(value: Any, kind: str) -> str:
    if kind == "float":
        return "%.17g" % value
    return str(value)


def to_csv(table: ResultTable) -> str:
    table.check_finite()
    buf = io.StringIO()
    buf.write(PROVENANCE_PREFIX + json.dumps(table.provenance, sort_keys=True, separators=(",", ":")) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.names)
    for row in table.rows:
        writer.writerow([_format_cell(v, k) for v, (_, k) in zip(row, table.columns)])
    return buf.getvalue()


def to_json(table: ResultTable) -> str:
    table.check_finite()
    doc = {
        "provenance": table.provenance,
        "schema": [{"name": n, "type": k} for n, k in table.columns],
        "rows": table.rows,
    }
    return json.dumps(doc, sort_keys=True, indent=1, allow_nan=False) + "\n"


def _atomic_write(path: Path, text: str) -> None:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
    except OSError as exc:
        raise OutputError(f"cannot write table: {exc.strerror or exc}", str(path)) from exc


def export_table(table: ResultTable, path, fmt: str = "csv") -> Path:
    """Write ``table`` atomically; non-finite cells abort before anything is written."""
    if fmt not in ("csv", "json"):
        raise ValidationError(f"unknown format {fmt!r}", "format")
    text = to_csv(table) if fmt == "csv" else to_json(table)
    path = Path(path)
    _atomic_write(path, text)
    return path


def parse_csv(text: str, types: Sequence[str] | None = None) -> ResultTable:
    lines = text.split("\n")
    provenance: dict = {}
    if lines and lines[0].startswith(PROVENANCE_PREFIX):
        provenance = json.loads(lines[0][len(PROVENANCE_PREFIX):])
        lines = lines[1:]
    reader = csv.reader(io.StringIO("\n".join(lines)))
    rows = [r for r in reader if r]
    if not rows:
        raise ValidationError("table has no header row")
    header, body = rows[0], rows[1:]
    if types is None:
        types = provenance.get("column_types")
    if types is None:
        raise ValidationError("column types are neither given nor recorded in the provenance")
    return ResultTable(list(zip(header, types)), [list(r) for r in body], provenance)


def parse_json(text: str) -> ResultTable:
    doc = json.loads(text)
    return ResultTable([(c["name"], c["type"]) for c in doc["schema"]], doc["rows"], doc["provenance"])


def read_table(path) -> ResultTable:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise OutputError(f"cannot read table: {exc.strerror or exc}", str(path)) from exc
    try:
        if path.suffix == ".json":
            return parse_json(text)
        return parse_csv(text)
    except (json.JSONDecodeError, KeyError, csv.Error) as exc:
        raise ValidationError(f"malformed table file: {exc}", str(path)) from exc
