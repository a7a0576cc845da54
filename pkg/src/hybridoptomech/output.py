"""Serialization of result tables to CSV, JSON and whitespace plot data.

Floats are written with ``repr`` (shortest round-trip decimal), so every
value re-parses to the identical double.  Each file carries a comment header
with the tool version, the command and the full run configuration.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Sequence

from . import __version__

__all__ = ["Table", "format_value", "render", "write", "read_csv"]


@dataclass
class Table:
    """Rows of a result plus the metadata that goes into the header.

    ``groups`` lists block sizes for the plot-data format: consecutive
    blocks are separated by ``group_gap`` blank lines.
    """

    command: str
    columns: list[str]
    rows: list[list[Any]]
    config_json: str = ""
    meta: dict[str, Any] = field(default_factory=dict)
    groups: list[int] | None = None
    group_gap: int = 1


def format_value(value: Any, missing: str = "") -> str:
    if value is None:
        return missing
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return repr(value)
    return str(value)


def _header(table: Table) -> list[str]:
    lines = [f"# hybridoptomech {__version__}", f"# command: {table.command}"]
    if table.config_json:
        lines.append(f"# config: {table.config_json}")
    for key in sorted(table.meta):
        lines.append(f"# {key}: {json.dumps(table.meta[key], sort_keys=True)}")
    return lines


def _json_value(v: Any) -> Any:
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def render(table: Table, fmt: str) -> str:
    if fmt == "csv":
        lines = _header(table) + [",".join(table.columns)]
        lines += [",".join(format_value(v) for v in row) for row in table.rows]
        return "\n".join(lines) + "\n"
    if fmt == "plotdata":
        lines = _header(table) + ["# " + " ".join(table.columns)]
        sizes = table.groups or [len(table.rows)]
        i = 0
        for k, size in enumerate(sizes):
            if k:
                lines.extend([""] * table.group_gap)
            for row in table.rows[i : i + size]:
                lines.append(" ".join(format_value(v, missing="nan") for v in row))
            i += size
        return "\n".join(lines) + "\n"
    if fmt == "json":
        doc = {
            "tool": f"hybridoptomech {__version__}",
            "command": table.command,
            "config": json.loads(table.config_json) if table.config_json else None,
            "meta": table.meta,
            "columns": table.columns,
            "rows": [[_json_value(v) for v in row] for row in table.rows],
        }
        return json.dumps(doc, sort_keys=True, indent=1) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def write(table: Table, fmt: str, path: str | None) -> str:
    text = render(table, fmt)
    if path is None or path == "-":
        import sys

        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)
    return text


def _parse_cell(text: str) -> Any:
    if text == "":
        return None
    if text in ("true", "false"):
        return text == "true"
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def read_csv(text: str) -> tuple[dict[str, str], list[str], list[list[Any]]]:
    """Parse a CSV produced by ``render``: ``(header, columns, rows)``."""
    header: dict[str, str] = {}
    body: list[str] = []
    for line in text.splitlines():
        if line.startswith("# "):
            key, _, value = line[2:].partition(": ")
            header[key] = value
        elif line:
            body.append(line)
    columns = body[0].split(",")
    rows = [[_parse_cell(c) for c in line.split(",")] for line in body[1:]]
    return header, columns, rows


def rows_from(records: Sequence[dict[str, Any]], columns: Sequence[str]) -> list[list[Any]]:
    return [[r.get(c) for c in columns] for r in records]
