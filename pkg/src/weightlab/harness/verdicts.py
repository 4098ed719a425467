"""Verdict rules.

Every check a scenario performs is stored in its report as a result entry
carrying ``rule`` and ``inputs``.  :func:`recompute_verdict` re-evaluates
those entries from a loaded JSON report, so verdicts never depend on state
that is not written out.
"""

from __future__ import annotations

import math
from typing import Any, Sequence

__all__ = ["RULES", "evaluate", "check", "aggregate", "recompute_verdict",
           "STABILITY_TOL", "BLOWUP_FACTOR", "BLOWUP_DOUBLINGS"]

STABILITY_TOL = 0.10
BLOWUP_FACTOR = 1.5
BLOWUP_DOUBLINGS = 3


def _num(x) -> float:
    if isinstance(x, str):
        return float(x)  # "inf", "nan"
    return float(x)


def _finite(values) -> bool:
    return all(math.isfinite(_num(v)) for v in values)


def stable(values: Sequence, tol: float = STABILITY_TOL) -> bool:
    """All finite and the last step raises the value by at most ``tol``."""
    vals = [_num(v) for v in values]
    if not vals or not _finite(vals):
        return False
    if len(vals) < 2:
        return True
    return vals[-1] <= vals[-2] * (1.0 + tol)


def drift(values: Sequence, tol: float) -> bool:
    """Two-sided: the last step changes the value by less than ``tol``."""
    vals = [_num(v) for v in values]
    if len(vals) < 2 or not _finite(vals):
        return False
    a, b = vals[-2], vals[-1]
    if a == b:
        return True
    if a == 0:
        return False
    return abs(b / a - 1.0) < tol


def blowup(values: Sequence, factor: float = BLOWUP_FACTOR, doublings: int = BLOWUP_DOUBLINGS) -> bool:
    """Growth by at least ``factor`` on each of the last ``doublings`` steps."""
    vals = [_num(v) for v in values]
    if len(vals) < doublings + 1:
        return False
    tail = vals[-(doublings + 1):]
    for a, b in zip(tail, tail[1:]):
        if not (a > 0 and (math.isinf(b) or b >= factor * a)):
            return False
    return True


def at_least(value, bound) -> bool:
    return _num(value) >= _num(bound)


def at_most(value, bound) -> bool:
    return _num(value) <= _num(bound)


def within(value, target, rel) -> bool:
    v, t = _num(value), _num(target)
    return math.isfinite(v) and abs(v - t) <= _num(rel) * abs(t)


def truth(value) -> bool:
    return bool(value)


def increasing(values: Sequence) -> bool:
    vals = [_num(v) for v in values]
    return len(vals) >= 2 and all(b > a for a, b in zip(vals, vals[1:]))


RULES = {
    "stable": stable,
    "drift": drift,
    "blowup": blowup,
    "at_least": at_least,
    "at_most": at_most,
    "within": within,
    "truth": truth,
    "increasing": increasing,
}


def evaluate(rule: str, inputs: dict) -> bool | None:
    """Apply a rule; the pseudo-rule ``inconclusive`` always yields None."""
    if rule == "inconclusive":
        return None
    return bool(RULES[rule](**inputs))


def check(report, name: str, rule: str, diagnostic: bool = False, **inputs) -> bool | None:
    """Evaluate ``rule`` and record it on ``report``; returns the outcome."""
    outcome = evaluate(rule, inputs)
    report.add(name, outcome, rule=rule, inputs=inputs, diagnostic=diagnostic)
    return outcome


def aggregate(outcomes) -> str:
    outcomes = list(outcomes)
    if any(o is False for o in outcomes):
        return "fail"
    if any(o is None for o in outcomes):
        return "inconclusive"
    return "pass"


def _entries(results: list[dict]) -> list[dict]:
    return [r for r in results if "rule" in r and not r.get("diagnostic")]


def verdict_of(report) -> str:
    return aggregate(r["value"] for r in _entries(report.results))


def recompute_verdict(payload: dict[str, Any]) -> str:
    """Verdict of a serialized report, from the stored rule inputs only."""
    return aggregate(evaluate(r["rule"], r["inputs"]) for r in _entries(payload["results"]))
