"""Command-line entry point: ``weightlab <subcommand>``.

Exit codes: 0 pass (or a successful evaluation), 1 fail verdict,
2 inconclusive verdict, 3 usage or validation error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import exponents as ex
from .grid import CubeFamily, Grid, GriddedFunction
from .harness import CATALOG, Scenario, UnknownScenario, emit_report, report_json, run_many
from .harness.common import bracket
from .harness.scenarios import resolve_params
from .harness.verdicts import aggregate
from .norms import OrliczFunction, bmo_norm, lebesgue_norm, lorentz_norm, luxemburg_norm, morrey_norm
from .operators import (commutator, fractional_integral, fractional_maximal, gradient_magnitude,
                        truncated_commutator_sup)
from .probes import DEFAULT_SEED, b_probes, probe_family, probe_names
from .reports import jsonable
from .weights import (Weight, ap_constant, apq_constant, partial_constant, power_weight, reverse_holder_index,
                      rh_constant)

EXIT = {"pass": 0, "fail": 1, "inconclusive": 2}
USAGE_ERROR = 3


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------
# argument helpers


def _rational(text: str):
    text = str(text).strip()
    if text.lower() in ("inf", "infinity", "∞"):
        return ex.INF
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a rational number: {text!r}") from None


def _rationals(text: str) -> list:
    return [_rational(t) for t in str(text).split(",") if t.strip()]


def _levels(text: str | None, grid: Grid) -> tuple[int, int]:
    if not text:
        return 0, grid.levels
    try:
        lo, hi = text.split(":")
        return int(lo), int(hi)
    except ValueError:
        raise UsageError(f"--levels expects lmin:lmax, got {text!r}") from None


def _grid(args) -> Grid:
    try:
        return Grid(int(args.d), float(args.L), int(args.N))
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None


def _cubes(args, grid: Grid) -> CubeFamily:
    lmin, lmax = _levels(args.levels, grid)
    shifts = [_rational(s) for s in args.shifts.split(",")] if args.shifts else (0, Fraction(1, 3), Fraction(2, 3))
    try:
        return CubeFamily(grid, lmin, lmax, shifts)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _function(spec: str, grid: Grid, seed: int) -> GriddedFunction:
    """Parse a function spec.

    Accepted forms: a probe name (``gauss0`` ... ``step1``), ``b:<name>`` for
    commutator symbols, ``power:<e>`` for ``|x|^e``, ``bracket:<e>`` for
    ``(1+|x|)^e``, ``const:<c>`` and ``zero``.
    """
    if spec in probe_names():
        return dict(zip(probe_names(), probe_family(grid, seed)))[spec]
    if spec == "zero":
        return grid.constant(0.0)
    kind, _, arg = spec.partition(":")
    if kind == "b" and arg in ("const", "sgn", "log", "x"):
        return b_probes(grid)[arg]
    if kind == "const" and arg:
        return grid.constant(float(_rational(arg)))
    return _weight(spec, grid)


def _weight(spec: str, grid: Grid) -> Weight:
    kind, _, arg = spec.partition(":")
    if kind == "one" and not arg:
        return Weight.one(grid)
    if kind == "power" and arg:
        return power_weight(grid, _rational(arg))
    if kind == "bracket" and arg:
        return bracket(_rational(arg))(grid)
    raise UsageError(f"unknown function or weight {spec!r}; use a probe name, b:<sym>, power:<e>, "
                     f"bracket:<e>, const:<c>, one or zero")


def _emit_json(payload, out: str | None) -> None:
    text = json.dumps(jsonable(payload), sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    if out:
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _grid_payload(grid: Grid, cubes: CubeFamily | None = None) -> dict:
    out = {"grid": {"d": grid.d, "L": grid.L, "N": grid.N}}
    if cubes is not None:
        out["cube_family"] = cubes.descriptor()
    return out


# --------------------------------------------------------------------------
# subcommands


def cmd_norm(args) -> int:
    grid = _grid(args)
    f = _function(args.f, grid, args.seed)
    kind = args.kind
    cubes = None
    if kind == "lebesgue":
        value = lebesgue_norm(f, _rational(args.p))
    elif kind == "weak":
        value = lorentz_norm(f, _rational(args.p), ex.INF)
    elif kind == "lorentz":
        value = lorentz_norm(f, _rational(args.p), _rational(args.q))
    elif kind == "morrey":
        cubes = _cubes(args, grid)
        value = morrey_norm(f, _rational(args.p), _rational(args.s), cubes)
    elif kind == "bmo":
        cubes = _cubes(args, grid)
        value = bmo_norm(f, cubes)
    else:
        value = luxemburg_norm(f, OrliczFunction(args.orlicz, float(_rational(args.p)), float(_rational(args.c))))
    _emit_json({"norm": kind, "function": args.f, "value": value, **_grid_payload(grid, cubes)}, args.out)
    return 0


def cmd_weight_constant(args) -> int:
    grid = _grid(args)
    cubes = _cubes(args, grid)
    w = [_weight(s, grid) for s in args.w.split(",")]
    p = _rationals(args.p) if args.p else []
    kind = args.kind
    if kind == "ap":
        est = ap_constant(w[0], p[0], cubes)
    elif kind == "apq":
        est = apq_constant(w if len(w) > 1 else w[0], p if len(p) > 1 else p[0], _rational(args.q), cubes)
    elif kind == "partial":
        if not args.u:
            raise UsageError("--u is required for the partial class")
        est = partial_constant(w, _weight(args.u, grid), p, _rational(args.q), cubes,
                               r=_rationals(args.r) if args.r else None)
    elif kind == "rh":
        est = rh_constant(w[0], _rational(args.r), cubes)
    else:
        lo, hi = reverse_holder_index(w[0], cubes)
        _emit_json({"class": kind, "weight": args.w, "index_bracket": [lo, hi], **_grid_payload(grid, cubes)},
                   args.out)
        return 0
    _emit_json({"class": kind, "weight": args.w, "estimate": est.to_dict(), **_grid_payload(grid, cubes)}, args.out)
    return 0


def cmd_operator(args) -> int:
    grid = _grid(args)
    f = _function(args.f, grid, args.seed)
    alpha = _rational(args.alpha)
    cubes = None
    if args.op == "maximal":
        cubes = _cubes(args, grid)
        g = fractional_maximal(f, 0.0, float(_rational(args.s)), cubes)
    elif args.op == "fractional-maximal":
        cubes = _cubes(args, grid)
        g = fractional_maximal(f, float(alpha), float(_rational(args.s)), cubes)
    elif args.op == "fractional-integral":
        g = fractional_integral(f, alpha)
    elif args.op == "commutator":
        g = commutator(_function(args.b, grid, args.seed), f, alpha)
    elif args.op == "truncated-commutator":
        g = truncated_commutator_sup(_function(args.b, grid, args.seed), f, alpha)
    else:
        g = gradient_magnitude(f)
    vals = np.abs(g.values)
    i = np.unravel_index(int(np.argmax(vals)), vals.shape)
    payload = {
        "operator": args.op,
        "function": args.f,
        "max": float(vals[i]),
        "argmax_cell": [int(k) for k in i],
        "norms": {"L1": lebesgue_norm(g, 1), "L2": lebesgue_norm(g, 2), "Linf": lebesgue_norm(g, ex.INF)},
        **_grid_payload(grid, cubes),
    }
    _emit_json(payload, args.out)
    return 0


def _exponent_payload(args) -> dict:
    calc = args.calc
    if calc == "chain":
        chain = ex.offdiagonal_chain(_rational(args.d), _rational(args.alpha), _rational(args.beta), _rational(args.p),
                                     _rational(args.s))
        return {"k0": chain.k0, "limit": chain.limit, "violations": list(chain.violations),
                "steps": [asdict(st) for st in chain.steps]}
    if calc == "dual":
        p_new, target = ex.dual_tuple(_rationals(args.p), _rational(args.q), int(args.i))
        return {"p": list(p_new), "target": target}
    if calc == "characterization":
        idx = ex.characterization_indices(_rationals(args.p), _rational(args.q), partial=args.partial)
        return asdict(idx)
    if calc == "factorization":
        p, p0, r, r0 = (_rational(x) for x in (args.p, args.p0, args.r, args.r0))
        return asdict(ex.factorization_exponents(p, p0, r, r0))
    if calc == "extrapolation":
        q, t = ex.one_var_extrapolation(_rational(args.p0), _rational(args.q0), _rational(args.t0), _rational(args.p))
        return {"q": q, "t": t}
    if calc == "derived":
        de = ex.derived_deltas(_rationals(args.r), _rationals(args.p), _rational(args.q))
        return {**asdict(de), "delta": list(de.delta), "rho": de.rho, "theta": list(de.theta)}
    if calc == "admissible":
        v = ex.admissible(_rationals(args.r), _rationals(args.p), _rational(args.q), strict=args.strict)
        return {"ok": v.ok, "failed": list(v.failed)}
    mm = ex.modified_maximal_exponents(_rational(args.p), _rational(args.q))
    return asdict(mm)


def cmd_exponents(args) -> int:
    _emit_json({"calc": args.calc, **_exponent_payload(args)}, args.out)
    return 0


def _scenario_params(args, name: str) -> dict:
    params = dict(args.config.get("params", args.config)) if args.config else {}
    params.pop("seed", None)
    for item in args.set or []:
        key, sep, raw = item.partition("=")
        if not sep:
            raise UsageError(f"--set expects key=value, got {item!r}")
        try:
            params[key] = json.loads(raw)
        except json.JSONDecodeError:
            params[key] = raw
    defaults = CATALOG[name].defaults
    for flag in ("d", "L", "N"):
        value = getattr(args, flag)
        if value is not None and flag in defaults:
            params[flag] = json.loads(value) if isinstance(value, str) else value
    resolve_params(name, params)
    return params


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    if args.config and "seed" in args.config:
        return int(args.config["seed"])
    return DEFAULT_SEED


def _run_scenarios(args, formats: list[str]) -> int:
    if args.list:
        for entry in CATALOG.values():
            print(f"{entry.name:20s} {entry.statement}")
        return 0
    if not args.scenario:
        raise UsageError("name a scenario, 'all', or pass --list")
    names = list(CATALOG) if args.scenario == ["all"] else args.scenario
    for name in names:
        if name not in CATALOG:
            raise UnknownScenario(f"unknown scenario {name!r}; choose from: {', '.join(CATALOG)}")
    seed = _seed(args)
    scenarios = [Scenario(n, _scenario_params(args, n), seed) for n in names]
    reports = run_many(scenarios, workers=args.workers)
    for rep in reports:
        if args.out:
            target = Path(args.out)
            if len(reports) > 1 and target.suffix != ".json":
                target.mkdir(parents=True, exist_ok=True)
            elif len(reports) > 1:
                target = target.parent
            emit_report(rep, formats, target if len(reports) > 1 else args.out)
        elif len(reports) == 1 and not args.quiet:
            sys.stdout.write(report_json(rep))
        print(f"{rep.scenario}: {rep.verdict.upper()} ({rep.runtime_ms:.0f} ms)", file=sys.stderr)
    return EXIT[aggregate({"pass": True, "fail": False, "inconclusive": None}[r.verdict] for r in reports)]


def cmd_verify(args) -> int:
    return _run_scenarios(args, ["json"] + (["svg"] if args.emit_plot else []))


def cmd_scan(args) -> int:
    return _run_scenarios(args, ["json", "csv"] + (["svg"] if args.emit_plot else []))


# --------------------------------------------------------------------------
# parser


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--d", default=None, help="dimension (1, 2 or 3)")
    common.add_argument("--L", default=None, help="half-width of the domain [-L, L]^d")
    common.add_argument("--N", default=None, help="cells per axis, a power of two")
    common.add_argument("--levels", default=None, help="cube levels as lmin:lmax")
    common.add_argument("--shifts", default=None, help="comma-separated shifts, e.g. 0,1/3,2/3")
    common.add_argument("--seed", type=int, default=None, help=f"probe seed (default {DEFAULT_SEED:#x})")
    common.add_argument("--out", default=None, help="output file or directory")
    common.add_argument("--emit-plot", action="store_true", help="also write SVG plots of scan tables")
    common.add_argument("--config", default=None, help="JSON file supplying option values or scenario params")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="weightlab", description="Numerical laboratory for weighted inequalities.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("norm", parents=[common], help="evaluate a function-space norm")
    p.add_argument("--kind", choices=["lebesgue", "weak", "lorentz", "morrey", "bmo", "luxemburg"], default="lebesgue")
    p.add_argument("--f", default="gauss0", help="function spec (probe name, power:<e>, bracket:<e>, b:<sym>, ...)")
    p.add_argument("--p", default="2")
    p.add_argument("--q", default="2")
    p.add_argument("--s", default="1")
    p.add_argument("--orlicz", default="power", help="Orlicz function kind for the Luxemburg norm")
    p.add_argument("--c", default="1", help="Orlicz bump parameter")
    p.set_defaults(handler=cmd_norm)

    p = sub.add_parser("weight-constant", parents=[common], help="estimate a weight-class constant")
    p.add_argument("--class", dest="kind", choices=["ap", "apq", "partial", "rh", "rh-index"], default="ap")
    p.add_argument("--w", default="power:1/2", help="weight spec, comma-separated for vectors")
    p.add_argument("--u", default=None, help="partial weight spec")
    p.add_argument("--p", default="2", help="exponent or comma-separated vector")
    p.add_argument("--q", default="2")
    p.add_argument("--r", default=None, help="reverse Holder exponent, or r vector for the partial class")
    p.set_defaults(handler=cmd_weight_constant)

    p = sub.add_parser("operator", parents=[common], help="apply an operator and summarise the result")
    p.add_argument("--op", choices=["maximal", "fractional-maximal", "fractional-integral", "commutator",
                                    "truncated-commutator", "gradient"], default="maximal")
    p.add_argument("--f", default="gauss0")
    p.add_argument("--b", default="b:log", help="symbol for commutators")
    p.add_argument("--alpha", default="1/2")
    p.add_argument("--s", default="1")
    p.set_defaults(handler=cmd_operator)

    p = sub.add_parser("exponents", parents=[common], help="exact exponent calculus")
    p.add_argument("calc", choices=["chain", "dual", "characterization", "factorization", "extrapolation",
                                    "derived", "admissible", "modified"])
    for name in ("alpha", "beta", "p", "q", "s", "r", "i", "p0", "q0", "t0", "r0"):
        p.add_argument(f"--{name}", default=None)
    p.add_argument("--partial", action="store_true", help="append the partial-weight slot")
    p.add_argument("--strict", action="store_true", help="strict admissibility")
    p.set_defaults(handler=cmd_exponents)

    for name, handler, text in (("verify", cmd_verify, "run catalog scenarios and report verdicts"),
                                ("scan", cmd_scan, "run scenarios and write their scan tables")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("scenario", nargs="*", help="scenario names, or 'all'")
        p.add_argument("--list", action="store_true", help="list the catalog")
        p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a scenario parameter (JSON value)")
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--quiet", action="store_true", help="do not print the JSON report")
        p.set_defaults(handler=handler)
    return parser


_GRID_DEFAULTS = {"d": "1", "L": "4", "N": "256"}


def _apply_config(args) -> None:
    config = {}
    if args.config:
        try:
            config = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(config, dict):
            raise UsageError("config must be a JSON object")
    args.config = config
    if args.command in ("verify", "scan"):
        return
    for key, value in config.items():
        dest = key.replace("-", "_")
        if hasattr(args, dest) and getattr(args, dest) in (None, False):
            setattr(args, dest, value)
    for key, value in _GRID_DEFAULTS.items():
        if getattr(args, key) is None:
            setattr(args, key, value)
    if args.seed is None:
        args.seed = DEFAULT_SEED


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else USAGE_ERROR
    try:
        _apply_config(args)
        return args.handler(args)
    except (UsageError, UnknownScenario, ex.ExponentError, ValueError, KeyError, TypeError) as exc:
        print(f"weightlab: error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
