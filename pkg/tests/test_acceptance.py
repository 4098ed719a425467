"""Acceptance criteria, one test (or test pair) per criterion.

Each test records its outcome; the terminal summary prints one PASS/FAIL
line per criterion.
"""

from __future__ import annotations

import time
from contextlib import contextmanager
from fractions import Fraction as F

import numpy as np
import pytest

from conftest import record_criterion
from weightlab.exponents import (INF, admissible, characterization_indices, derived_deltas, dual_tuple,
                                 factorization_exponents, fmt, multilinear_target_check, offdiagonal_chain,
                                 one_var_extrapolation)
from weightlab.grid import CubeFamily, make_grid
from weightlab.harness import Scenario, catalog_names, report_json, run_many, run_scenario
from weightlab.harness.classes import _constant
from weightlab.harness.verdicts import BLOWUP_FACTOR
from weightlab.norms import OrliczFunction, bmo_norm, lebesgue_norm, lorentz_norm, luxemburg_norm, morrey_norm
from weightlab.weights import Weight, ap_constant, apq_constant, apqr_constant, partial_constant, rh_constant


@contextmanager
def criterion(request, number: int, part: str = "all"):
    details: list[str] = []
    try:
        yield details
    except BaseException as exc:
        msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        record_criterion(request.config, number, part, False, "; ".join(details + [msg])[:160])
        raise
    record_criterion(request.config, number, part, True, "; ".join(details))


def _scenario(request, number, name, budget_s, part="all", **params):
    with criterion(request, number, part) as notes:
        rep = run_scenario(Scenario(name, params))
        notes.append(f"{name} {rep.verdict}, {rep.runtime_ms / 1e3:.1f} s")
        assert rep.verdict == "pass", [r["name"] for r in rep.results if r.get("value") is False]
        assert rep.runtime_ms < budget_s * 1e3
    return rep


def test_01_trivial_exactness(request):
    with criterion(request, 1) as notes:
        start = time.perf_counter()
        g = make_grid(1, 1.0, 256)
        fam = CubeFamily(g)
        one = Weight.one(g)
        constants = [ap_constant(one, p, fam).value for p in (1, F(3, 2), 2, 4, INF)]
        constants += [
            apq_constant([one, one], [2, 2], 1, fam).value,
            apqr_constant([one], [2], 2, [1, 1], fam).value,
            partial_constant([one], one, [2], 2, fam).value,
            rh_constant(one, 3, fam).value,
        ]
        assert all(abs(c - 1.0) <= 1e-12 for c in constants), constants
        zero = g.constant(0.0)
        norms = [lebesgue_norm(zero, p) for p in (1, 2, INF)]
        norms += [lorentz_norm(zero, 2, q) for q in (1, 2, INF)]
        norms += [morrey_norm(zero, 3, 2, fam).value, bmo_norm(zero, fam).value,
                  luxemburg_norm(zero, OrliczFunction("power", 2))]
        assert all(n == 0 for n in norms), norms
        elapsed = time.perf_counter() - start
        notes.append(f"{len(constants)} constants, {len(norms)} norms in {elapsed:.2f} s")
        assert elapsed < 1.0


def test_02_duality(request):
    rep = _scenario(request, 2, "duality", 30)
    assert rep.results[0]["inputs"]["value"] <= 1e-12


def test_03_characterization(request):
    _scenario(request, 3, "characterization", 60)


def _composite_oracle(p, p0, r, r0):
    # composite weight exponents written out per case
    gamma = F(1) / r + 1 - F(1) / p
    if p < p0:
        return gamma * (r - r0) / r0, F(r) / r0
    return gamma * (r - r0) / ((r * gamma - 1) * r0), r * (r0 * gamma - 1) / ((r * gamma - 1) * r0)


def test_04_factorization(request):
    rep = _scenario(request, 4, "factorization", 60, part="per-cube slack")
    with criterion(request, 4, "exponent oracle"):
        for case, (p, p0, r, r0) in rep.params["cases"].items():
            p, p0, r, r0 = (F(x) for x in (p, p0, r, r0))
            fe = factorization_exponents(p, p0, r, r0)
            assert fe.case == case
            assert (fe.mu_exp, fe.w_exp) == _composite_oracle(p, p0, r, r0)
            stored = rep.result(f"case_{case}_u0_exponents")
            assert stored == [fmt(fe.gamma), fmt(fe.mu_exp), fmt(fe.w_exp)]


def test_05_power_gate_members(request):
    _scenario(request, 5, "power-gate", 300, part="member drift < 5%")


@pytest.mark.xfail(strict=True, reason="measured growth per L doubling is about 1.22 for b=-3/4 and 1.09 for b=3/5, "
                                      "below the 1.5 factor; see the decision ledger")
def test_05_power_gate_non_members_blow_up(request):
    with criterion(request, 5, "non-member growth >= 1.5 per L doubling") as notes:
        growth = []
        for b in (F(-3, 4), F(3, 5)):
            vals = [_constant(make_grid(1, L, 1024 * L), b, F(1, 2), 2, 1) for L in (1, 2, 4)]
            steps = [c / a for a, c in zip(vals, vals[1:])]
            notes.append(f"b={b}: growth {', '.join(f'{x:.3f}' for x in steps)}")
            growth += steps
        assert all(x >= BLOWUP_FACTOR for x in growth)


def test_06_sharpness(request):
    _scenario(request, 6, "sharpness", 60)


def test_07_rubio_de_francia(request):
    rep = _scenario(request, 7, "rdf", 120)
    assert rep.result("majorizes") and rep.result("norm_bound") and rep.result("class_bound")


def test_08_domination(request):
    rep = _scenario(request, 8, "domination", 60)
    assert rep.result("gap_nonnegative")


def test_09_weighted_fractional_integral(request):
    _scenario(request, 9, "lp-lq-ia", 600)


def test_10_exponent_calculus(request):
    with criterion(request, 10):
        assert admissible((1, 1), (2,), 2) and not admissible((3, 1), (2,), 2)
        de = derived_deltas((1, 1), (2,), 2)
        assert de.delta == (2, 2) and de.kappa == 1 and de.rho == 1
        assert derived_deltas((1, 1), (INF,), 1).kappa == 2
        assert one_var_extrapolation(2, 2, 2, 3) == (3, 3)
        chain = offdiagonal_chain(1, F(9, 10), F(1, 5), F(11, 10), F(6, 5))
        assert chain.k0 == 5 and chain[2].beta == F(21, 40) and chain.limit == F(17, 20)
        assert dual_tuple((2,), 3, 1) == ((F(3, 2),), 2)
        assert dual_tuple((2, 4), 2, 2) == ((2, 2), F(4, 3))
        ci = characterization_indices((2,), 2)
        assert ci.slot_index == (2,) and ci.product_index == 2
        assert characterization_indices((2, 2), 4).product_index == 5
        fe = factorization_exponents(2, 3, 1, F(3, 2))
        assert fe.gamma == F(3, 2) and fe.case == "ii" and fe.mu_exp == F(-1, 2)
        assert factorization_exponents(3, 2, F(3, 2), 1).case == "iv"
        assert multilinear_target_check((2, 2), 1, (4, 4), 2, (1, 1, 1))
        assert not multilinear_target_check((4, 4), F(1, 2), (8, 8), F(2, 3), (1, 1, 1))


def test_11_commutator_dichotomy(request):
    _scenario(request, 11, "commutator-bmo", 120, part="log symbol stable")
    _scenario(request, 11, "commutator-not-bmo", 120, part="linear symbol blows up")


def test_12_good_lambda(request):
    rep = _scenario(request, 12, "good-lambda", 120)
    assert rep.result("symbol") == "sgn" and rep.result("constant_finite")


def test_13_determinism(request):
    with criterion(request, 13) as notes:
        scen = [Scenario(n) for n in catalog_names()]
        serial = [report_json(r, include_runtime=False) for r in run_many(scen)]
        again = [report_json(r, include_runtime=False) for r in run_many(scen, workers=4)]
        same = sum(a == b for a, b in zip(serial, again))
        notes.append(f"{same}/{len(scen)} scenarios byte-identical serial vs parallel")
        assert same == len(scen)
        assert np.all([len(s) > 0 for s in serial])
