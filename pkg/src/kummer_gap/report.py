"""Report rows and their CSV/JSON serialization."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from importlib import resources
from typing import Any

SIG_DIGITS = 12


def fmt_float(x: float) -> str:
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, f".{SIG_DIGITS}g")


def _cell(v: Any) -> Any:
    """Normalize a value so CSV and JSON carry the same 12-digit number."""
    if isinstance(v, bool) or v is None or isinstance(v, (int, str)):
        return v
    if isinstance(v, float):
        if not math.isfinite(v):
            return fmt_float(v)
        return float(fmt_float(v))
    raise TypeError(f"unsupported report value {v!r}")


def _csv_text(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return fmt_float(v)
    return str(v)


@dataclass
class Report:
    command: str
    params: dict[str, Any]
    rows: list[dict[str, Any]] = field(default_factory=list)
    status: str = "OK"

    def add(self, **row: Any) -> None:
        self.rows.append({k: _cell(v) for k, v in row.items()})

    @property
    def columns(self) -> list[str]:
        cols: list[str] = []
        for row in self.rows:
            cols.extend(k for k in row if k not in cols)
        return cols

    def to_json(self) -> str:
        doc = {
            "command": self.command,
            "params": {k: _cell(v) for k, v in self.params.items()},
            "status": self.status,
            "columns": self.columns,
            "rows": self.rows,
        }
        return json.dumps(doc, indent=2, allow_nan=False) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        cols = self.columns
        writer.writerow(cols)
        for row in self.rows:
            writer.writerow([_csv_text(row.get(c)) for c in cols])
        return buf.getvalue()

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return self.to_json()
        if fmt == "csv":
            return self.to_csv()
        raise ValueError(f"unknown format {fmt!r}")


def load_golden(name: str) -> list[dict[str, str]]:
    """Rows of a golden table shipped in the package data directory."""
    text = resources.files("kummer_gap").joinpath("data", f"{name}.csv").read_text()
    return list(csv.DictReader(io.StringIO(text)))


def matches_printed(value: float, printed: str) -> bool:
    """True when ``value`` rounds to ``printed`` in the printed notation and precision."""
    mantissa = printed.lower().split("e")[0]
    decimals = len(mantissa.split(".")[1]) if "." in mantissa else 0
    spec = f".{decimals}e" if "e" in printed.lower() else f".{decimals}f"
    return float(format(value, spec)) == float(printed)
