from __future__ import annotations

import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from weightlab.cli import main
from weightlab.harness import recompute_verdict

SRC = str(Path(__file__).resolve().parents[1] / "src")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_norm_outputs_json(capsys):
    code, out, _ = run(capsys, "norm", "--kind", "lebesgue", "--f", "const:3", "--p", "2", "--L", "1", "--N", "64")
    assert code == 0
    payload = json.loads(out)
    assert payload["value"] == pytest.approx(3 * 2 ** 0.5, rel=1e-12)
    assert payload["grid"] == {"d": 1, "L": 1.0, "N": 64}


def test_norm_of_zero(capsys):
    for kind in ("lebesgue", "weak", "lorentz", "luxemburg"):
        code, out, _ = run(capsys, "norm", "--kind", kind, "--f", "zero", "--N", "64")
        assert code == 0 and json.loads(out)["value"] == 0


def test_weight_constant_identity(capsys):
    code, out, _ = run(capsys, "weight-constant", "--class", "ap", "--w", "one", "--N", "64")
    assert code == 0 and json.loads(out)["estimate"]["value"] == pytest.approx(1.0, abs=1e-12)


def test_operator_summary(capsys):
    code, out, _ = run(capsys, "operator", "--op", "maximal", "--f", "const:2", "--N", "64")
    payload = json.loads(out)
    assert code == 0 and payload["max"] == pytest.approx(2.0)


def test_exponents_chain(capsys):
    code, out, _ = run(capsys, "exponents", "chain", "--d", "1", "--alpha", "9/10", "--beta", "1/5",
                       "--p", "11/10", "--s", "6/5")
    payload = json.loads(out)
    assert code == 0 and payload["k0"] == 5
    assert "21/40" in json.dumps(payload)


def test_exponents_dual(capsys):
    code, out, _ = run(capsys, "exponents", "dual", "--p", "2,4", "--q", "2", "--i", "2")
    assert code == 0 and "4/3" in out


def test_exponents_bad_input_is_usage_error(capsys):
    code, _, err = run(capsys, "exponents", "extrapolation", "--p0", "1", "--q0", "2", "--t0", "2", "--p", "2")
    assert code == 3 and "error" in err


def test_verify_pass_writes_report(capsys, tmp_path):
    out_path = tmp_path / "chain.json"
    code, out, err = run(capsys, "verify", "offdiag-chain", "--out", str(out_path))
    assert code == 0 and out == "" and "PASS" in err
    payload = json.loads(out_path.read_text())
    assert payload["verdict"] == "pass" and recompute_verdict(payload) == "pass"


def test_verify_fail_and_inconclusive_codes(capsys):
    code, _, _ = run(capsys, "verify", "power-gate", "--quiet", "--set", 'b=["-3/4"]',
                     "--set", "refine_N=[256,512]", "--set", "growth_L=[1,2]")
    assert code == 1
    code, _, _ = run(capsys, "verify", "power-gate", "--quiet", "--set", 'b=["-1/2"]',
                     "--set", "refine_N=[256,512]")
    assert code == 2


def test_usage_errors(capsys):
    assert run(capsys, "verify", "nope")[0] == 3
    assert run(capsys, "verify", "duality", "--set", "bogus=1")[0] == 3
    assert run(capsys, "frobnicate")[0] == 3
    assert run(capsys, "norm", "--N", "100")[0] == 3
    assert run(capsys, "verify")[0] == 3


def test_unknown_scenario_lists_catalog(capsys):
    code, _, err = run(capsys, "verify", "nope")
    assert code == 3 and "offdiag-chain" in err and "duality" in err


def test_list(capsys):
    code, out, _ = run(capsys, "verify", "--list")
    assert code == 0 and len(out.strip().splitlines()) == 28


def test_config_supplies_params_and_seed(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"seed": 5, "params": {"count": 2, "N": 128}}))
    code, out, _ = run(capsys, "verify", "duality", "--config", str(cfg))
    payload = json.loads(out)
    assert code == 0 and payload["params"]["seed"] == 5 and payload["params"]["count"] == 2


def test_grid_flags_override_scenario_params(capsys):
    code, out, _ = run(capsys, "verify", "duality", "--N", "128", "--set", "count=2")
    assert code == 0 and json.loads(out)["params"]["N"] == 128


def test_scan_writes_csv_and_svg(capsys, tmp_path):
    code, _, _ = run(capsys, "scan", "lorentz-embed", "--set", "N=256", "--out", str(tmp_path / "le"),
                     "--emit-plot")
    assert code == 0
    names = sorted(p.name for p in tmp_path.iterdir())
    assert "le.json" in names
    assert any(n.endswith(".csv") for n in names) and any(n.endswith(".svg") for n in names)


def test_module_entry_point(tmp_path):
    env = dict(os.environ, PYTHONPATH=SRC)
    proc = subprocess.run([sys.executable, "-m", "weightlab.cli", "exponents", "modified", "--p", "2", "--q", "2"],
                          capture_output=True, text=True, env=env, cwd=tmp_path)
    assert proc.returncode == 0, proc.stderr
    assert json.loads(proc.stdout)
