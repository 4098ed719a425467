from __future__ import annotations

import json

import numpy as np
import pytest

from weightlab.grid import Grid
from weightlab.harness import (CATALOG, Scenario, UnknownScenario, catalog_names, emit_report, load_report,
                               ratio_scan, recompute_verdict, report_json, run_many, run_scenario, sharpness_scan,
                               table_csv, table_svg)
from weightlab.harness.scan import fit_log, fit_power, good_lambda_measure, graded_integral, upsample
from weightlab.harness.scenarios import resolve_params
from weightlab.harness.verdicts import aggregate, blowup, check, drift, stable, within
from weightlab.norms import lebesgue_norm
from weightlab.probes import DEFAULT_SEED, indicator, probe_family, probe_names
from weightlab.reports import InequalityReport, ScanTable

EXPECTED = {
    "mam", "lp-lq-m", "lp-lq-ia", "ia-ma", "fefferman-phong", "hardy-leray", "poincare", "ckn",
    "commutator-bmo", "commutator-not-bmo", "good-lambda", "bump", "domination", "rdf", "majorant",
    "power-gate", "sharpness", "factorization", "characterization", "duality", "rh-openness", "eta-power",
    "class-union", "embedding", "a1-product", "lorentz-embed", "offdiag-chain", "extrapolation-spot",
}


# -- catalog ----------------------------------------------------------------

def test_catalog_covers_every_statement_once():
    names = catalog_names()
    assert len(names) == len(set(names)) == 28
    assert set(names) == EXPECTED
    statements = [CATALOG[n].statement for n in names]
    assert all(statements) and len(set(statements)) == len(statements)


def test_unknown_scenario_lists_catalog():
    with pytest.raises(UnknownScenario) as err:
        run_scenario(Scenario("no-such-thing"))
    msg = str(err.value)
    assert "no-such-thing" in msg and all(n in msg for n in EXPECTED)


def test_unknown_parameter_rejected():
    with pytest.raises(ValueError, match="unknown parameters"):
        resolve_params("duality", {"bogus": 1})
    merged = resolve_params("duality", {"count": 3})
    assert merged["count"] == 3 and CATALOG["duality"].defaults["count"] == 20


def test_probe_family_shape():
    g = Grid(1, 2.0, 128)
    fam = probe_family(g)
    assert len(fam) == 8 and len(probe_names()) == 8
    again = probe_family(g, DEFAULT_SEED)
    assert all(np.array_equal(a.values, b.values) for a, b in zip(fam, again))
    assert DEFAULT_SEED == 0xC0FFEE


# -- verdict rules ----------------------------------------------------------

def test_verdict_rules():
    assert stable([1.0, 1.05, 1.1]) and not stable([1.0, 1.2]) and not stable([1.0, float("inf")])
    assert stable([2.0, 1.0])  # decreasing is fine
    assert drift([1.0, 1.04], 0.05) and not drift([1.0, 0.9], 0.05)
    assert blowup([1, 1.5, 2.25, 3.4], 1.5, 3) and not blowup([1, 1.5, 2.0, 3.4], 1.5, 3)
    assert within(1.1, 1.0, 0.2) and not within(1.3, 1.0, 0.2)
    assert aggregate([True, None]) == "inconclusive" and aggregate([True, False, None]) == "fail"
    assert aggregate([]) == "pass"


def test_diagnostic_checks_do_not_vote():
    rep = InequalityReport("x", "pass")
    check(rep, "main", "truth", value=True)
    check(rep, "side", "truth", diagnostic=True, value=False)
    payload = json.loads(report_json(rep))
    assert recompute_verdict(payload) == "pass"


# -- scans ------------------------------------------------------------------

def test_ratio_scan_identity_is_exactly_one():
    def side(f, _):
        return lebesgue_norm(f, 2)
    table = ratio_scan(side, side, [(2, 64), (2, 128)])
    assert table.column("max_ratio") == [1.0, 1.0]
    assert all(all(r == 1.0 for r in row) for row in table.meta["ratios"])


def test_ratio_scan_rejects_zero_rhs_probes():
    def fam(grid):
        return {"zero": grid.constant(0.0), "one": grid.constant(1.0)}
    table = ratio_scan(lambda f, _: 2.0, lambda f, _: float(f.values.sum()), [(1, 16)], family=fam)
    assert table.meta["rejected"] == [[1.0, 16, "zero"]]
    assert table.column("worst_probe") == ["one"]
    with pytest.raises(ValueError):
        ratio_scan(lambda f, _: 1.0, lambda f, _: 0.0, [(1, 16)], family=fam)
    with pytest.raises(ValueError):
        ratio_scan(lambda f, _: 1.0, lambda f, _: 1.0, [])


def test_ratio_scan_parallel_matches_serial():
    def lhs(f, _):
        return float(np.max(np.abs(f.values)))
    def rhs(f, _):
        return lebesgue_norm(f, 2)
    a = ratio_scan(lhs, rhs, [(2, 64)])
    b = ratio_scan(lhs, rhs, [(2, 64)], workers=4)
    assert a.rows == b.rows and a.meta == b.meta


def test_fits_recover_exact_models():
    r = [2, 4, 8, 16]
    assert fit_power(r, [3 * x ** 1.25 for x in r])["exponent"] == pytest.approx(1.25, abs=1e-12)
    fl = fit_log(r, [2 + 0.5 * np.log(x) for x in r])
    assert fl["slope"] == pytest.approx(0.5, abs=1e-12) and fl["residual"] < 1e-12


def test_sharpness_scan_models():
    t = sharpness_scan(lambda r: r ** 0.75, [2, 4, 8, 16, 32, 64], "power", predicted=0.75)
    assert t.meta["power"]["exponent"] == pytest.approx(0.75, rel=1e-12) and t.meta["monotone"]
    t = sharpness_scan(lambda r: 1 + np.log(r), [2, 4, 8, 16, 32, 64], "log")
    assert t.meta["log"]["residual"] < t.meta["power"]["residual"]
    with pytest.raises(ValueError):
        sharpness_scan(lambda r: r, [4, 2])
    with pytest.raises(ValueError):
        sharpness_scan(lambda r: r, [2, 4], model="cubic")


def test_graded_integral_singular_endpoint():
    # the innermost 2^-61 sliver of x^{-1/2} carries about 1e-9 of the mass
    assert graded_integral(lambda x: x ** -0.5, 0.0, 1.0) == pytest.approx(2.0, rel=1e-8)
    assert graded_integral(lambda x: np.log(x), 0.0, 1.0) == pytest.approx(-1.0, rel=1e-12)
    assert graded_integral(lambda x: (1 - x) ** -0.25, 0.0, 1.0) == pytest.approx(4 / 3, rel=1e-8)


def test_upsample_preserves_integrals():
    g = Grid(1, 1.0, 16)
    f = g.evaluate(lambda x: x ** 2)
    fine = upsample(f, Grid(1, 1.0, 64))
    assert fine.values.sum() * fine.grid.h == pytest.approx(f.values.sum() * g.h, rel=1e-14)
    with pytest.raises(ValueError):
        upsample(f, Grid(1, 2.0, 64))


# -- good lambda -------------------------------------------------------------

def test_good_lambda_constant_symbol_gives_empty_sets():
    g = Grid(1, 4.0, 256)
    m = good_lambda_measure(g.constant(2.0), indicator(g, 0, 1), 0.5, 1.5, 0.5, 2.0, [0.1, 1.0])
    assert m.lhs == (0.0, 0.0) and m.constant == 0.0 and not m.all_rhs_zero


def test_good_lambda_halving_gamma1_at_most_doubles_constant():
    g = Grid(1, 4.0, 256)
    b, f = g.evaluate(np.sign), indicator(g, 0, 1)
    lams = np.geomspace(1e-3, 2.0, 25)
    c1 = good_lambda_measure(b, f, 0.5, 1.5, 0.5, 2.0, lams).constant
    c2 = good_lambda_measure(b, f, 0.5, 1.5, 0.25, 2.0, lams).constant
    assert np.isfinite(c1) and c2 <= 2 * c1 + 1e-15


def test_good_lambda_validates_inputs():
    g = Grid(1, 4.0, 64)
    with pytest.raises(ValueError):
        good_lambda_measure(g.constant(1.0), g.constant(1.0), 0.5, 1.5, 0.5, 1.0, [1.0])
    with pytest.raises(ValueError):
        good_lambda_measure(g.constant(1.0), g.constant(1.0), 0.5, 3, 0.5, 2.0, [1.0])


# -- emission ---------------------------------------------------------------

def test_empty_report_is_valid_json(tmp_path):
    rep = InequalityReport("empty", "pass")
    (out,) = emit_report(rep, ["json"], tmp_path)
    payload = load_report(out)
    assert payload["results"] == [] and payload["schema_version"] == 1 and payload["verdict"] == "pass"
    assert set(payload) == {"schema_version", "scenario", "params", "grid", "cube_family", "results",
                            "tables", "verdict", "runtime_ms"}


def test_csv_has_header_and_rows():
    t = ScanTable("t", ("a", "b"), [(1, 2.0), (2, 3.0), (3, None), (4, float("inf"))])
    lines = table_csv(t).splitlines()
    assert len(lines) == 5 and lines[0] == "a,b" and lines[3] == "3," and lines[4] == "4,inf"


def test_svg_is_deterministic():
    t = ScanTable("t", ("N", "ratio"), [(256, 1.0), (512, 1.1), (1024, 1.15)])
    a, b = table_svg(t), table_svg(t)
    assert a == b and a.lstrip().startswith("<?xml")


def test_emit_round_trip(tmp_path):
    rep = run_scenario(Scenario("lorentz-embed", {"N": 256}))
    paths = emit_report(rep, ["json", "csv", "svg"], tmp_path / "out")
    assert {p.suffix for p in paths} == {".json", ".csv", ".svg"}
    payload = load_report(paths[0])
    assert recompute_verdict(payload) == rep.verdict == payload["verdict"]
    assert payload["params"]["seed"] == DEFAULT_SEED and payload["params"]["N"] == 256
    with pytest.raises(ValueError):
        emit_report(rep, ["pdf"], tmp_path)


def test_determinism_serial_and_parallel():
    scen = [Scenario("duality", {"count": 4, "N": 256}), Scenario("offdiag-chain"),
            Scenario("power-gate", {"refine_N": [256, 512]})]
    serial = [report_json(r, include_runtime=False) for r in run_many(scen)]
    parallel = [report_json(r, include_runtime=False) for r in run_many(scen, workers=3)]
    assert serial == parallel


def test_seed_changes_random_draws():
    a = run_scenario(Scenario("duality", {"count": 3, "N": 256}, seed=1))
    b = run_scenario(Scenario("duality", {"count": 3, "N": 256}, seed=2))
    assert report_json(a, False) != report_json(b, False)


# -- every scenario runs with its defaults ----------------------------------

@pytest.mark.slow
@pytest.mark.parametrize("name", sorted(EXPECTED))
def test_scenario_defaults_pass(name):
    rep = run_scenario(Scenario(name))
    assert rep.verdict == "pass", [r for r in rep.results if r.get("value") is False]
    assert recompute_verdict(json.loads(report_json(rep))) == "pass"


def test_power_gate_non_member_reports_fail():
    rep = run_scenario(Scenario("power-gate", {"b": ["-3/4"], "refine_N": [256, 512], "growth_L": [1, 2]}))
    assert rep.verdict == "fail"


def test_power_gate_boundary_is_inconclusive():
    rep = run_scenario(Scenario("power-gate", {"b": ["-1/2"], "refine_N": [256, 512]}))
    assert rep.verdict == "inconclusive"
