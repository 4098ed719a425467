"""Report containers shared by the weight checks and the harness."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from .estimate import ConstantEstimate
from .exponents import INF, fmt

__all__ = ["ScanTable", "InequalityReport", "jsonable"]

VERDICTS = ("pass", "fail", "inconclusive")


@dataclass
class ScanTable:
    """Rows of numbers under named columns, plus free-form metadata."""

    name: str
    columns: tuple[str, ...]
    rows: list[tuple] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [r[i] for r in self.rows]

    def to_dict(self) -> dict:
        return {"name": self.name, "columns": list(self.columns),
                "rows": [list(r) for r in self.rows], "meta": self.meta}


@dataclass
class InequalityReport:
    scenario: str
    verdict: str
    results: list[dict] = field(default_factory=list)
    tables: list[ScanTable] = field(default_factory=list)
    params: dict = field(default_factory=dict)
    grid: dict | None = None
    cube_family: dict | None = None
    runtime_ms: float = 0.0

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise ValueError(f"verdict must be one of {VERDICTS}")

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def result(self, name: str) -> Any:
        for r in self.results:
            if r["name"] == name:
                return r["value"]
        raise KeyError(name)

    def table(self, name: str) -> ScanTable:
        for t in self.tables:
            if t.name == name:
                return t
        raise KeyError(name)

    def add(self, name: str, value, argmax=None, **extra) -> None:
        entry = {"name": name, "value": value}
        if argmax is not None:
            entry["argmax"] = argmax
        entry.update(extra)
        self.results.append(entry)


def jsonable(x):
    """Convert report payloads to plain JSON types (rationals as ``"num/den"``)."""
    if x is INF:
        return "inf"
    if isinstance(x, Fraction):
        return fmt(x)
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        v = float(x)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(x, ConstantEstimate):
        return jsonable(x.to_dict())
    if isinstance(x, ScanTable):
        return jsonable(x.to_dict())
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return [jsonable(v) for v in x.tolist()]
    if x is None or isinstance(x, str):
        return x
    if hasattr(x, "describe"):
        return jsonable(x.describe())
    raise TypeError(f"cannot serialize {type(x).__name__}")
