"""Tabular output: TSV for people and plotting, JSON for machines."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any


@dataclass
class Table:
    """Rows of named columns. ``ratio_columns`` hold values in [0, 1] (or NaN/None).

    TSV scales ratios to 0-100 with one decimal; JSON keeps raw ratios rounded
    to four decimals.
    """

    columns: list[str]
    rows: list[dict[str, Any]] = field(default_factory=list)
    ratio_columns: set[str] = field(default_factory=set)
    meta: dict[str, Any] = field(default_factory=dict)

    def add(self, **row) -> None:
        self.rows.append(row)

    def _tsv_cell(self, col: str, value) -> str:
        if value is None:
            return "n/a"
        if isinstance(value, float):
            if math.isnan(value):
                return "nan"
            if col in self.ratio_columns:
                return f"{100 * value:.1f}"
            return f"{value:.4f}"
        if isinstance(value, bool):
            return str(value).lower()
        return str(value)

    def to_tsv(self) -> str:
        lines = ["\t".join(self.columns)]
        for row in self.rows:
            lines.append("\t".join(self._tsv_cell(c, row.get(c)) for c in self.columns))
        return "\n".join(lines) + "\n"

    def to_json(self, extra: dict | None = None) -> str:
        payload = {"meta": self.meta, "columns": self.columns, "rows": [_jsonable(r) for r in self.rows]}
        if extra:
            payload.update(_jsonable(extra))
        return json.dumps(payload, indent=2, sort_keys=False, ensure_ascii=False, allow_nan=False) + "\n"

    def render(self, fmt: str, extra: dict | None = None) -> str:
        return self.to_json(extra) if fmt == "json" else self.to_tsv()


def _jsonable(value):
    if isinstance(value, float):
        if math.isnan(value) or math.isinf(value):
            return None
        return round(value, 4)
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value
