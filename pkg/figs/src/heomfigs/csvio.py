"""Reader for the CSV files the simulator CLI writes.

The files carry a short comment header (``# key: value`` lines) followed
by one column-name row and the data rows. The reader keeps everything as
strings; column accessors convert on demand so a blank error cell does
not break numeric parsing of the other columns.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass, field

import numpy as np


class FigError(Exception):
    """Raised for any invalid input: missing file, column, or grid."""


@dataclass
class Table:
    path: str
    meta: dict = field(default_factory=dict)
    columns: list = field(default_factory=list)
    rows: list = field(default_factory=list)

    def column(self, name: str) -> list:
        """All values of one column as strings."""
        if name not in self.columns:
            raise FigError(
                f"column '{name}' missing from {self.path} "
                f"(has: {', '.join(self.columns)})"
            )
        k = self.columns.index(name)
        return [row[k] for row in self.rows]

    def floats(self, name: str) -> np.ndarray:
        values = self.column(name)
        try:
            return np.array([float(v) for v in values])
        except ValueError:
            bad = next(v for v in values if _not_a_float(v))
            raise FigError(
                f"column '{name}' in {self.path} holds a non-numeric "
                f"value: {bad!r}"
            ) from None

    def has_column(self, name: str) -> bool:
        return name in self.columns


def _not_a_float(value: str) -> bool:
    try:
        float(value)
    except ValueError:
        return True
    return False


def read_table(path: str) -> Table:
    """Parse one CSV file, including its comment header.

    Raises FigError when the file is missing, has no column row, or has
    no data rows; an empty file never turns into an empty plot.
    """
    if not os.path.isfile(path):
        raise FigError(f"input CSV not found: {path}")
    meta = {}
    columns = None
    rows = []
    with open(path, newline="") as handle:
        for record in csv.reader(handle):
            if not record:
                continue
            if record[0].startswith("#"):
                text = ",".join(record).lstrip("#").strip()
                key, sep, value = text.partition(":")
                if sep:
                    meta[key.strip()] = value.strip()
                continue
            if columns is None:
                columns = [c.strip() for c in record]
                continue
            rows.append(record)
    if columns is None:
        raise FigError(f"no column header in {path}")
    if not rows:
        raise FigError(f"no data rows in {path}")
    width = len(columns)
    for k, row in enumerate(rows):
        if len(row) != width:
            raise FigError(
                f"row {k + 1} of {path} has {len(row)} fields, "
                f"expected {width}"
            )
    table = Table(path=path, meta=meta, columns=columns, rows=rows)
    _reject_recorded_errors(table)
    return table


def _reject_recorded_errors(table: Table) -> None:
    if not table.has_column("error"):
        return
    for value in table.column("error"):
        if value.strip():
            raise FigError(
                f"{table.path} records a failed run: {value.strip()!r}; "
                "re-run the simulation before plotting"
            )


def sweep_axis(table: Table) -> str:
    """Dotted sweep axis path recorded in the header, or ''."""
    raw = table.meta.get("config", "")
    if not raw:
        return ""
    try:
        tree = json.loads(raw)
    except json.JSONDecodeError:
        return ""
    return tree.get("sweep", {}).get("axis", "") or ""
