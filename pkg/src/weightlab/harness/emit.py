"""Report serialization: JSON payloads, CSV tables and SVG plots."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Iterable

from ..reports import InequalityReport, ScanTable, jsonable

__all__ = ["SCHEMA_VERSION", "report_payload", "report_json", "table_csv", "emit_report", "load_report"]

SCHEMA_VERSION = 1
FORMATS = ("json", "csv", "svg")


def report_payload(report: InequalityReport, include_runtime: bool = True) -> dict:
    payload = {
        "schema_version": SCHEMA_VERSION,
        "scenario": report.scenario,
        "params": jsonable(report.params),
        "grid": jsonable(report.grid),
        "cube_family": jsonable(report.cube_family),
        "results": jsonable(report.results),
        "tables": [jsonable(t) for t in report.tables],
        "verdict": report.verdict,
    }
    if include_runtime:
        payload["runtime_ms"] = float(report.runtime_ms)
    return payload


def report_json(report: InequalityReport, include_runtime: bool = True) -> str:
    """Canonical JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(report_payload(report, include_runtime), sort_keys=True, indent=2,
                      ensure_ascii=False) + "\n"


def load_report(path: str | Path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def table_csv(table: ScanTable) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _cell(v):
    v = jsonable(v)
    return "" if v is None else v


def _numeric_columns(table: ScanTable) -> list[int]:
    out = []
    for i in range(len(table.columns)):
        vals = [r[i] for r in table.rows]
        if vals and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in vals):
            out.append(i)
    return out


def table_svg(table: ScanTable) -> str:
    """Line plot of every numeric column against the first numeric column."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    matplotlib.rcParams["svg.hashsalt"] = "weightlab"
    cols = _numeric_columns(table)
    fig, ax = plt.subplots(figsize=(6, 4))
    try:
        if len(cols) >= 2:
            x = [float(r[cols[0]]) for r in table.rows]
            for i in cols[1:]:
                ax.plot(x, [float(r[i]) for r in table.rows], marker="o", label=table.columns[i])
            ax.set_xlabel(table.columns[cols[0]])
            if all(v > 0 for v in x):
                ax.set_xscale("log", base=2)
            ax.legend()
        ax.set_title(table.name)
        buf = io.StringIO()
        fig.savefig(buf, format="svg", metadata={"Date": None})
    finally:
        plt.close(fig)
    return buf.getvalue()


def _stem(report: InequalityReport, path: str | Path) -> Path:
    p = Path(path)
    if p.is_dir() or str(path).endswith(("/", "\\")):
        p.mkdir(parents=True, exist_ok=True)
        return p / report.scenario
    if p.suffix == ".json":
        p = p.with_suffix("")
    if p.parent and not p.parent.exists():
        p.parent.mkdir(parents=True, exist_ok=True)
    return p


def emit_report(report: InequalityReport, formats: Iterable[str] = ("json",), path: str | Path = ".") -> list[Path]:
    """Write the report; returns the paths written.

    ``path`` is a directory (files are named after the scenario) or a file
    stem.  Tables go to ``<stem>.<table>.csv`` and ``<stem>.<table>.svg``.
    """
    formats = list(formats)
    bad = [f for f in formats if f not in FORMATS]
    if bad:
        raise ValueError(f"unknown formats {bad}; choose from {FORMATS}")
    stem = _stem(report, path)
    written = []
    if "json" in formats:
        out = stem.with_name(stem.name + ".json")
        out.write_text(report_json(report), encoding="utf-8")
        written.append(out)
    for table in report.tables:
        if "csv" in formats:
            out = stem.with_name(f"{stem.name}.{table.name}.csv")
            out.write_text(table_csv(table), encoding="utf-8")
            written.append(out)
        if "svg" in formats:
            out = stem.with_name(f"{stem.name}.{table.name}.svg")
            out.write_text(table_svg(table), encoding="utf-8")
            written.append(out)
    return written
