"""Scenario catalog: one executable check per weighted-inequality statement.

Every entry maps a name to a runner, a dictionary of default parameters and
a one-line statement of what is being checked.  Runners validate their
exponents exactly before any numerics and return an
:class:`~weightlab.reports.InequalityReport` whose verdict is recomputed from
the recorded checks.
"""

from __future__ import annotations

import copy
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

from ..probes import DEFAULT_SEED
from ..reports import InequalityReport
from . import calculus, classes, inequalities
from .common import echo
from .verdicts import verdict_of

__all__ = ["Scenario", "CatalogEntry", "CATALOG", "UnknownScenario", "run_scenario", "run_many", "catalog_names"]


@dataclass(frozen=True)
class Scenario:
    name: str
    params: dict = field(default_factory=dict)
    seed: int = DEFAULT_SEED


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    statement: str
    runner: Callable[[dict, int], InequalityReport]
    defaults: dict


class UnknownScenario(KeyError):
    def __str__(self):
        return str(self.args[0])


_GAUSS = ["gauss0", "gauss1", "gauss2", "gauss3"]
_REFINE_1D = [[4, 256], [4, 512], [4, 1024]]
_COMMUTATOR = {"d": 1, "alpha": "1/2", "beta": "1/4", "p": 2, "q": 4, "s": 2,
               "u_exponent": "-1/4", "w_exponent": "1/4", "L": [1, 2, 4, 8], "cells_per_unit": 256}

_ENTRIES = [
    ("mam", inequalities.run_mam,
     "multilinear fractional maximal function bounded between power-weighted Lebesgue spaces "
     "exactly for weight vectors in the multiple class",
     {"d": 1, "alpha": "1/2", "p": [2, 2], "q": 2, "b": ["1/10", "1/10"], "b_nonmember": ["3/5", "0"],
      "schedule": _REFINE_1D}),
    ("lp-lq-m", inequalities.run_lp_lq_m,
     "fractional maximal function bounded into the space weighted by u w, normalised by the "
     "Lorentz norm of u",
     {"d": 1, "alpha": "3/5", "beta": "1/10", "p": 2, "q": "5/2", "u_exponent": -1, "w_exponent": 0,
      "schedule": [[8, 256], [8, 512], [8, 1024]]}),
    ("lp-lq-ia", inequalities.run_lp_lq_ia,
     "fractional integral times U bounded by the Morrey norm of U, with the companion bound "
     "for the fractional maximal function",
     {"d": 1, "alpha": "1/2", "beta": "1/4", "p": 2, "q": 4, "r": "5/4", "s": "3/2", "U_exponent": "-1/4",
      "U_cor_exponent": "-1/2", "w_exponent": 0, "probes": _GAUSS + ["ind0", "ind1"],
      "schedule": [[4, 1024], [4, 2048], [4, 4096]], "corollary_schedule": _REFINE_1D}),
    ("ia-ma", inequalities.run_ia_ma,
     "weighted q-th power integral of the fractional integral controlled by that of the "
     "fractional maximal function for an A-infinity weight",
     {"d": 1, "alpha": "1/2", "q": 2, "w_exponent": "1/2", "schedule": _REFINE_1D}),
    ("fefferman-phong", inequalities.run_fefferman_phong,
     "f U in a weighted Lebesgue space controlled by the gradient of f",
     {"d": 1, "p": 2, "q": 4, "beta": "1/4", "q0": 2, "r": "3/2", "U_exponent": -1, "w_exponent": 0,
      "probes": _GAUSS, "schedule": _REFINE_1D}),
    ("hardy-leray", inequalities.run_hardy_leray,
     "Hardy inequality weighted by the distance to a coordinate axis, and its partial-weight form",
     {"d": 3, "schedule": [[1, 32], [1, 64], [1, 128]], "constant_index": 1}),
    ("poincare", inequalities.run_poincare,
     "oscillation of f on a convex set times U controlled by the gradient on that set",
     {"d": 1, "p": 2, "q": 4, "beta": "1/4", "q0": 2, "r": "3/2", "U_exponent": -1, "w_exponent": 0,
      "omega": [-1, 1], "probes": _GAUSS, "schedule": _REFINE_1D}),
    ("ckn", inequalities.run_ckn,
     "interpolation inequality of gradient and Lebesgue norms with partial power weights",
     {"d": 3, "p": 2, "p0": 2, "q": 2, "a": "1/2", "q0": "inf", "r": "3/2", "gamma2": 0, "gamma3": 0,
      "schedule": [[2, 16], [2, 32], [2, 64]], "constant_index": 1}),
    ("commutator-bmo", inequalities.run_commutator_bmo,
     "commutator of the fractional integral with a BMO symbol stays bounded as the domain grows",
     dict(_COMMUTATOR, b="log")),
    ("commutator-not-bmo", inequalities.run_commutator_not_bmo,
     "commutator with an unbounded-oscillation symbol blows up as the domain grows",
     dict(_COMMUTATOR, b="x")),
    ("good-lambda", inequalities.run_good_lambda,
     "superlevel sets of the truncated commutator controlled by those where the maximal "
     "controls are small",
     {"d": 1, "alpha": "1/2", "s": "3/2", "b": "sgn", "f_support": [0, 1], "gamma1": 0.5, "gamma2": 2.0,
      "L": 4, "N": 1024}),
    ("bump", inequalities.run_bump,
     "logarithmic bump conditions on (u, sigma) finite for a power pair",
     {"d": 1, "alpha": "1/2", "p": 2, "q": 4, "delta": "1/2", "u_exponent": "-1/2", "sigma_exponent": "-1/4",
      "schedule": _REFINE_1D}),
    ("domination", inequalities.run_domination,
     "pointwise domination of the fractional maximal function by a bilinear maximal function",
     {"d": 1, "alpha": "3/5", "beta": "1/10", "u_exponent": -1, "L": 8, "N": 1024, "tolerance": 1e-9}),
    ("rdf", inequalities.run_rdf,
     "iteration series of the modified maximal operator majorises f, doubles its norm at most, "
     "and lands in the partial A1-type class",
     {"d": 1, "p": 2, "t": 4, "u_exponent": "-1/2", "w_exponent": 0, "K": 30, "L": 4, "N": 1024,
      "probes": ["gauss0", "gauss1", "gauss3", "ind0", "ind1"], "slack": 1.05}),
    ("majorant", inequalities.run_majorant,
     "maximal-function majorant of U and u2 is pointwise larger, A1 and Morrey bounded",
     {"d": 1, "beta1": 0, "beta2": "2/5", "alpha": "3/5", "eps0": "1/2", "s2": 2, "s1": "21/20",
      "U_exponent": "-2/5", "u2_exponent": "-1/2", "schedule": [[4, 512], [4, 1024]]}),
    ("power-gate", classes.run_power_gate,
     "power weights against a power partial weight with a shared singularity: membership "
     "interval predicted exactly and confirmed numerically",
     {"d": 1, "p": 2, "q": 1, "a": "1/2", "b": ["-1/4", "0", "1/4"], "refine_L": 1,
      "refine_N": [1024, 4096], "growth_L": [1, 2, 4], "member_tol": 0.05}),
    ("sharpness", classes.run_sharpness,
     "growth rate of the class quantity outside and on the edge of the membership interval",
     {"d": 1, "p": 2, "q": 1, "a": "1/2", "x_A": "1/16", "radii": [2, 4, 8, 16, 32, 64],
      "b_interior": "-3/4", "b_boundary": "-1/2", "b_member": "0", "rate_tol": 0.2, "flat_tol": 0.1}),
    ("factorization", classes.run_factorization,
     "composite weight built from mu and w lies in the shifted partial class with the product bound",
     {"d": 1, "L": 4, "N": 1024, "mu_exponent": "-1/5", "w_exponent": "1/10", "u_exponents": [0, "-1/5"],
      "cases": {"i": [2, 3, 2, 3], "ii": [2, 3, 1, "6/5"], "iii": [3, 2, 3, 2], "iv": [3, 2, "3/2", "6/5"]}}),
    ("characterization", classes.run_characterization,
     "multiple weights characterised by Muckenhoupt conditions on each component and the product",
     {"d": 1, "L": 1, "N": 1024, "count": 20}),
    ("duality", classes.run_duality,
     "dual weight vector has the same class constant as the original",
     {"d": 1, "L": 1, "N": 1024, "count": 20, "tolerance": 1e-12}),
    ("rh-openness", classes.run_rh_openness,
     "partial classes are open in q and in p via reverse Holder",
     {"d": 1, "p": 2, "q": 1, "u_exponent": "-1/2", "w_exponent": "1/4", "L": 1, "N": [512, 1024],
      "eps": ["1/20", "1/10", "1/5", "2/5"]}),
    ("eta-power", classes.run_eta_power,
     "powers of a partial-class weight: below one when q is at most the reverse Holder index, "
     "slightly above one always",
     {"d": 1, "p": 2, "a": "1/2", "eta": "1/2", "q_small": 1, "b_small": "1/4", "q_large": 4,
      "b_large": "7/24", "lift": "1/10", "L": 1, "N": [256, 512, 1024, 2048]}),
    ("class-union", classes.run_class_union,
     "class for u^a is the union of the classes for u^b over b above a",
     {"d": 1, "p": 2, "q": 1, "u_exponent": "-1/2", "w_exponent": 0, "a": "1/2",
      "ladder": [0, "1/4", "1/2", "3/4", 1], "b_candidates": ["5/8", "3/4", 1], "L": 1, "N": [512, 1024]}),
    ("embedding", classes.run_embedding,
     "inclusions between plain and partial classes and between partial classes for two weights",
     {"d": 1, "p": 2, "q": 2, "u_exponent": "-1/10", "w_exponent": "1/10", "w1_exponent": "-1/10",
      "r_above": [2, 4], "q_plain": 2, "u2_exponent": "-1/2", "q2": 4, "L": 4, "N": [512, 1024]}),
    ("a1-product", inequalities.run_a1_product,
     "product of powers of two maximal functions is an A1 weight",
     {"d": 1, "s1": 3, "s2": 3, "f1": "ind0", "f2": "gauss1", "schedule": _REFINE_1D}),
    ("lorentz-embed", inequalities.run_lorentz_embed,
     "Lorentz spaces increase with the second index",
     {"d": 1, "L": 4, "N": 1024, "triples": [[2, 1, 2], [2, 1, "inf"], [3, 2, 4]]}),
    ("offdiag-chain", calculus.run_offdiag_chain,
     "ladder of intermediate indices climbing from the diagonal to the off-diagonal bound",
     {"d": 1, "alpha": "9/10", "beta": "1/5", "p": "11/10", "s": "6/5", "expected_k0": 5,
      "expected_beta2": "21/40"}),
    ("extrapolation-spot", calculus.run_extrapolation_spot,
     "extrapolation exponent shifts with numeric spot instances of the resulting bounds",
     {"one_var": [2, 2, 2, 3], "modified": [2, 4],
      "multilinear": {"p": [2, 2], "q": 1, "p_star": [4, 4], "q_star": 2, "r": [1, 1, 1]},
      "window": {"d": 1, "beta1": 0, "beta2": "2/5", "eps0": "1/2"},
      "spot": {"d": 1, "alpha": "1/2", "beta": "1/4", "p": "4/3", "u_exponent": "-1/4", "v_exponent": "1/10",
               "schedule": [[4, 512], [4, 1024], [4, 2048]]}}),
]

CATALOG: dict[str, CatalogEntry] = {name: CatalogEntry(name, statement, runner, defaults)
                                    for name, runner, statement, defaults in _ENTRIES}


def catalog_names() -> list[str]:
    return list(CATALOG)


def _entry(name: str) -> CatalogEntry:
    try:
        return CATALOG[name]
    except KeyError:
        raise UnknownScenario(f"unknown scenario {name!r}; choose from: {', '.join(CATALOG)}") from None


def resolve_params(name: str, params: dict | None = None) -> dict:
    """Defaults overlaid with ``params``; unknown keys are rejected."""
    entry = _entry(name)
    merged = copy.deepcopy(entry.defaults)
    extra = set(params or {}) - set(merged)
    if extra:
        raise ValueError(f"unknown parameters for {name}: {sorted(extra)}; known: {sorted(merged)}")
    merged.update(copy.deepcopy(params or {}))
    return merged


def run_scenario(scenario: Scenario) -> InequalityReport:
    entry = _entry(scenario.name)
    params = resolve_params(scenario.name, scenario.params)
    start = time.perf_counter()
    report = entry.runner(params, int(scenario.seed))
    report.runtime_ms = (time.perf_counter() - start) * 1e3
    report.scenario = entry.name
    report.params = dict(echo(params), seed=int(scenario.seed))
    report.verdict = verdict_of(report)
    return report


def run_many(scenarios: Sequence[Scenario], workers: int = 1) -> list[InequalityReport]:
    """Run scenarios, in order; with ``workers > 1`` they run on a thread pool."""
    if workers <= 1:
        return [run_scenario(s) for s in scenarios]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run_scenario, scenarios))


def describe_catalog() -> list[dict[str, Any]]:
    return [{"name": e.name, "statement": e.statement} for e in CATALOG.values()]
