"""Scenario harness: ratio scans, verdict rules, the scenario catalog and report emission."""

from __future__ import annotations

from .emit import emit_report, load_report, report_json, report_payload, table_csv, table_svg
from .scan import good_lambda_check, ratio_scan, sharpness_scan
from .scenarios import CATALOG, Scenario, UnknownScenario, catalog_names, run_many, run_scenario
from .verdicts import aggregate, recompute_verdict, verdict_of

__all__ = [
    "CATALOG",
    "Scenario",
    "UnknownScenario",
    "catalog_names",
    "run_scenario",
    "run_many",
    "ratio_scan",
    "sharpness_scan",
    "good_lambda_check",
    "emit_report",
    "load_report",
    "report_json",
    "report_payload",
    "table_csv",
    "table_svg",
    "aggregate",
    "recompute_verdict",
    "verdict_of",
]
