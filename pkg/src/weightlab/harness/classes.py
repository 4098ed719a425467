"""Scenarios about membership, constants and inclusions of weight classes."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from ..estimate import estimate_blocks, log_blocks
from ..exponents import INF, conj, factorization_exponents, fmt, recip
from ..grid import CubeFamily, Grid
from ..weights import (Weight, _class_terms, _slack, apq_constant, characterization_check, duality_check,
                       factorization_check, partial_constant, power_gate, power_weight, reverse_holder_index)
from . import verdicts
from .common import (bracket, exact, exact_list, grid_of, new_report, num, power, require, schedule, tag,
                     values_table)
from .scan import power_sharpness_quantity, sharpness_scan


def _constant(grid: Grid, b, a, p, q, cubes=None) -> float:
    """Partial constant of ``|x|^b`` against ``u = |x|^{-a}``."""
    cubes = cubes or CubeFamily(grid)
    return partial_constant(power_weight(grid, b), power_weight(grid, -a), [p], q, cubes).value


def _blocks(cubes, logs, p, q, logu=None):
    return log_blocks(cubes, _class_terms(logs, p, q, logu=logu))


def _inclusion(rep, name, smaller, larger, cubes, diagnostic=False):
    """Per-cube ``smaller <= larger``; records the smallest relative slack."""
    slack, at = _slack(smaller, larger, cubes)
    rep.add(f"{name}_slack", slack, argmax=at)
    return verdicts.check(rep, name, "at_least", diagnostic=diagnostic, value=slack, bound=-1e-9)


# --------------------------------------------------------------------------
# power weights


def run_power_gate(P: dict, seed: int):
    d, p, q, a = P["d"], exact(P["p"]), exact(P["q"]), exact(P["a"])
    refine = [int(n) for n in P["refine_N"]]
    growth_L = [float(L) for L in P["growth_L"]]
    rep = new_report("power-gate")
    for b in exact_list(P["b"]):
        gate = power_gate(d, p, q, a, b, shared=True)
        label = f"b={fmt(b)}"
        rep.add(f"{label}_gate", gate.status, condition=gate.condition)
        if gate.status == "member":
            rows = [(P["refine_L"], N, _constant(Grid(d, P["refine_L"], N), b, a, p, q)) for N in refine]
            table = values_table(f"member_{tag(b)}", ("L", "N", "constant"), rows, b=fmt(b))
            rep.tables.append(table)
            verdicts.check(rep, f"{label}_drift", "drift", values=table.column("constant"), tol=P["member_tol"])
        elif gate.status == "non-member":
            h_cells = refine[0] / P["refine_L"]
            rows = [(L, int(h_cells * L), _constant(Grid(d, L, int(h_cells * L)), b, a, p, q)) for L in growth_L]
            table = values_table(f"non_member_{tag(b)}", ("L", "N", "constant"), rows, b=fmt(b))
            rep.tables.append(table)
            verdicts.check(rep, f"{label}_blowup", "blowup", values=table.column("constant"),
                           factor=verdicts.BLOWUP_FACTOR, doublings=len(growth_L) - 1)
            # refinement growth at fixed L, where the singularity lives
            ref = [(1.0, N, _constant(Grid(d, 1.0, N), b, a, p, q)) for N in refine]
            rtab = values_table(f"non_member_{tag(b)}_refine", ("L", "N", "constant"), ref)
            rep.tables.append(rtab)
            verdicts.check(rep, f"{label}_refinement_growth", "increasing", diagnostic=True,
                           values=rtab.column("constant"))
        else:
            verdicts.check(rep, f"{label}_boundary", "inconclusive")
    rep.grid = {"d": d, "L": float(P["refine_L"]), "N": refine[-1]}
    rep.cube_family = CubeFamily(Grid(d, P["refine_L"], refine[-1])).descriptor()
    return rep


def run_sharpness(P: dict, seed: int):
    d, p, q, a = P["d"], exact(P["p"]), exact(P["q"]), exact(P["a"])
    require(d == 1, "the sharpness quantity is evaluated in one dimension")
    x_A = float(exact(P["x_A"]))
    radii = [float(r) for r in P["radii"]]
    rep = new_report("sharpness")
    rep.add("x_A", x_A)
    cases = {"interior": ("power", P["b_interior"]), "boundary": ("log", P["b_boundary"]),
             "member": ("power", P["b_member"])}
    expected = {"interior": "non-member", "boundary": "boundary", "member": "member"}
    for label, (model, b) in cases.items():
        b = exact(b)
        # separated singularities: the gate without the shared-point relaxation
        gate = power_gate(d, p, q, a, b, shared=q < Fraction(d) / a)
        rep.add(f"{label}_gate", gate.status, b=fmt(b))
        verdicts.check(rep, f"{label}_gate_agrees", "truth", value=gate.status == expected[label])
        rate = a * q - b * q - d
        table = sharpness_scan(power_sharpness_quantity(p, q, a, b, x_A), radii, model,
                               predicted=float(rate) if label == "interior" else None, name=label)
        rep.tables.append(table)
        fit_p, fit_l = table.meta["power"], table.meta["log"]
        if not table.meta["monotone"]:
            verdicts.check(rep, f"{label}_rate", "inconclusive")
        elif label == "interior":
            verdicts.check(rep, f"{label}_rate", "within", value=fit_p["exponent"], target=float(rate),
                           rel=P["rate_tol"])
        elif label == "boundary":
            verdicts.check(rep, f"{label}_log_fits_better", "at_most", value=fit_l["residual"],
                           bound=fit_p["residual"])
        else:
            verdicts.check(rep, f"{label}_flat", "at_most", value=abs(fit_p["exponent"]), bound=P["flat_tol"])
    return rep


# --------------------------------------------------------------------------
# factorization, characterization, duality


def run_factorization(P: dict, seed: int):
    d = P["d"]
    grid = grid_of(d, (P["L"], P["N"]))
    cubes = CubeFamily(grid)
    rep = new_report("factorization", grid, cubes)
    mu_w = {"mu": power(P["mu_exponent"])(grid), "w": power(P["w_exponent"])(grid)}
    for u_exp in P["u_exponents"]:
        u = power(u_exp)(grid)
        for case, (p, p0, r, r0) in P["cases"].items():
            fe = factorization_exponents(*(exact(x) for x in (p, p0, r, r0)))
            sub = factorization_check(u, mu_w["mu"], mu_w["w"], p, p0, r, r0, case, cubes)
            label = f"case_{case}_u{tag(u_exp)}"
            slack = sub.result("per_cube_bound")
            rep.add(f"{label}_exponents", [fmt(fe.gamma), fmt(fe.mu_exp), fmt(fe.w_exp)])
            rep.add(f"{label}_bound_exponents", sub.result("bound_exponents"))
            verdicts.check(rep, label, "at_least", value=slack, bound=-1e-9)
    return rep


def _random_vectors(seed: int, count: int, partial: bool) -> list[dict]:
    """Seeded power-weight vectors with ``m = 2`` inside their classes."""
    rng = np.random.default_rng(seed)
    choices = [Fraction(3, 2), Fraction(2), Fraction(3), Fraction(4)]
    out = []
    while len(out) < count:
        p = [choices[int(rng.integers(len(choices)))] for _ in range(2)]
        inv = sum(1 / x for x in p)
        inv_q = inv if inv <= 1 else inv - Fraction(1, 2)
        q = 1 / inv_q
        b = [Fraction(int(rng.integers(-20, 21)), 100) for _ in range(2)]
        a = Fraction(int(rng.integers(10, 41)), 100) if partial else Fraction(0)
        margin = Fraction(1, 20)
        if any(bi * conj(pi) >= 1 - margin for bi, pi in zip(b, p)):
            continue
        if (sum(b) - a) * q <= -1 + margin:
            continue
        out.append({"p": p, "q": q, "b": b, "a": a})
    return out


def _vector_weights(grid: Grid, v: dict):
    ws = [power_weight(grid, bi) for bi in v["b"]]
    u = power_weight(grid, -v["a"]) if v["a"] else None
    return ws, u


def run_characterization(P: dict, seed: int):
    d = P["d"]
    grid = grid_of(d, (P["L"], P["N"]))
    cubes = CubeFamily(grid)
    rep = new_report("characterization", grid, cubes)
    rows = []
    for partial in (False, True):
        for k, v in enumerate(_random_vectors(seed + int(partial), P["count"], partial)):
            ws, u = _vector_weights(grid, v)
            sub = characterization_check(ws, v["p"], v["q"], cubes, u)
            slacks = [r["value"] for r in sub.results if "holds" in r and not r.get("diagnostic")
                      and not r["name"].startswith("duality")]
            worst = min(slacks) if slacks else math.inf
            rows.append((int(partial), k, [fmt(x) for x in v["p"]], fmt(v["q"]), [fmt(x) for x in v["b"]],
                         fmt(v["a"]), worst, sub.verdict))
    table = values_table("vectors", ("partial", "index", "p", "q", "b", "a", "min_slack", "verdict"), rows)
    rep.tables.append(table)
    verdicts.check(rep, "min_slack", "at_least", value=min(table.column("min_slack")), bound=-1e-9)
    verdicts.check(rep, "all_pass", "truth", value=all(v == "pass" for v in table.column("verdict")))
    return rep


def run_duality(P: dict, seed: int):
    d = P["d"]
    grid = grid_of(d, (P["L"], P["N"]))
    cubes = CubeFamily(grid)
    rep = new_report("duality", grid, cubes)
    rows = []
    for partial in (False, True):
        for k, v in enumerate(_random_vectors(seed + int(partial), P["count"], partial)):
            ws, u = _vector_weights(grid, v)
            for i in (1, 2):
                sub = duality_check(ws, v["p"], v["q"], i, cubes, u)
                rows.append((int(partial), k, i, sub.result("relative_deviation"),
                             sub.result("per_cube_deviation")))
    table = values_table("deviations", ("partial", "index", "slot", "relative", "per_cube"), rows)
    rep.tables.append(table)
    verdicts.check(rep, "max_relative_deviation", "at_most", value=max(table.column("relative")),
                   bound=P["tolerance"])
    rep.add("max_per_cube_deviation", max(table.column("per_cube")))
    return rep


# --------------------------------------------------------------------------
# openness, powers, unions and inclusions


def run_rh_openness(P: dict, seed: int):
    d, p, q = P["d"], exact(P["p"]), exact(P["q"])
    require(1 < p < INF and 0 < q < INF, "need 1 < p < inf and 0 < q < inf")
    w_of, u_of = power(P["w_exponent"]), power(P["u_exponent"])
    coarse, fine = (grid_of(d, (P["L"], N)) for N in P["N"])
    rep = new_report("rh-openness", fine)
    fam = {g: CubeFamily(g) for g in (coarse, fine)}

    def const(g, pp, qq):
        return partial_constant(w_of(g), u_of(g), [pp], qq, fam[g]).value

    rows = []
    for eps in exact_list(P["eps"]):
        up = [const(g, p, q * (1 + eps)) for g in (coarse, fine)]
        down = [const(g, p * (1 - eps), q) for g in (coarse, fine)] if eps < p - 1 else [math.nan, math.nan]
        rows.append((fmt(eps), *up, *down))
    table = values_table("openness", ("eps", "up_coarse", "up_fine", "down_coarse", "down_fine"), rows)
    rep.tables.append(table)
    for side in ("up", "down"):
        stable = [(r[0], (r[table.columns.index(f"{side}_coarse")], r[table.columns.index(f"{side}_fine")]))
                  for r in rows]
        good = [(e, v) for e, v in stable if verdicts.drift(v, verdicts.STABILITY_TOL)]
        e, vals = good[-1] if good else stable[0]
        rep.add(f"{side}_eps", e)
        verdicts.check(rep, f"{side}_stable", "drift", values=list(vals), tol=verdicts.STABILITY_TOL)

    # per-cube inclusions at the largest listed eps
    g, cubes = fine, fam[fine]
    lw, lu = w_of(g).log, u_of(g).log
    eps = exact_list(P["eps"])[-1]
    _inclusion(rep, "up_inclusion", _blocks(cubes, [lw], [p * (1 + eps)], q * (1 + eps), lu),
               _blocks(cubes, [lw], [p], q * (1 + eps), lu), cubes)
    e2 = min(eps, (p - 1) / 2)
    _inclusion(rep, "down_inclusion", _blocks(cubes, [lw], [p * (1 - e2)], q * (1 - e2), lu),
               _blocks(cubes, [lw], [p * (1 - e2)], q, lu), cubes)

    # reverse Hölder indices of (uw)^q and w^{-p'}
    cc = fam[coarse]
    pc = conj(p)
    rh0 = reverse_holder_index(lambda g: Weight(g, log=num(q) * (u_of(g).log + w_of(g).log)), cc)
    rh1 = reverse_holder_index(lambda g: w_of(g).power(-num(pc)), cc)
    rep.add("rh_index_uw_q", list(rh0))
    rep.add("rh_index_w_dual", list(rh1))
    verdicts.check(rep, "rh_uw_open", "at_least", value=rh0[0], bound=1.0 + 1e-6)
    verdicts.check(rep, "rh_dual_open", "at_least", value=rh1[0], bound=1.0 + 1e-6)
    return rep


def _series(d, L, Ns, b, a, p, q):
    return [_constant(Grid(d, L, N), b, a, p, q) for N in Ns]


def run_eta_power(P: dict, seed: int):
    d, p, a, eta = P["d"], exact(P["p"]), exact(P["a"]), exact(P["eta"])
    require(0 < eta < 1, "need 0 < eta < 1")
    L, Ns = float(P["L"]), [int(n) for n in P["N"]]
    r_u = Fraction(d) / a
    rep = new_report("eta-power")
    rep.grid = {"d": d, "L": L, "N": Ns[-1]}
    rep.cube_family = CubeFamily(Grid(d, L, Ns[-1])).descriptor()
    rows = []

    # q <= r_u: powers below one stay in the class
    q1, b1 = exact(P["q_small"]), exact(P["b_small"])
    require(q1 <= r_u, "first case needs q <= r_u")
    base = _series(d, L, Ns, b1, a, p, q1)
    low = _series(d, L, Ns, eta * b1, a, p, q1)
    rows += [("eta_small_q", N, x, y, y / x ** num(eta)) for N, x, y in zip(Ns, base, low)]
    verdicts.check(rep, "eta_member_gate", "truth", value=power_gate(d, p, q1, a, eta * b1).status == "member")
    verdicts.check(rep, "eta_stable", "stable", values=low)

    # q > r_u: the shared-singularity example leaves the class
    q2, b2 = exact(P["q_large"]), exact(P["b_large"])
    require(q2 > r_u, "converse needs q > r_u")
    g_w, g_eta = power_gate(d, p, q2, a, b2), power_gate(d, p, q2, a, eta * b2)
    rep.add("converse_gates", [g_w.status, g_eta.status])
    verdicts.check(rep, "converse_gates", "truth", value=(g_w.status, g_eta.status) == ("member", "non-member"))
    w_vals = _series(d, L, Ns, b2, a, p, q2)
    e_vals = _series(d, L, Ns, eta * b2, a, p, q2)
    rows += [("eta_large_q", N, x, y, y / x ** num(eta)) for N, x, y in zip(Ns, w_vals, e_vals)]
    verdicts.check(rep, "converse_w_stable", "stable", values=w_vals)
    verdicts.check(rep, "converse_eta_grows", "increasing", values=e_vals)

    # powers slightly above one
    q3, b3, lift = exact(P["q_small"]), exact(P["b_small"]), exact(P["lift"])
    up = _series(d, L, Ns, (1 + lift) * b3, a, p, q3)
    rows += [("lift", N, x, y, y / x ** num(1 + lift)) for N, x, y in zip(Ns, base, up)]
    verdicts.check(rep, "lift_stable", "stable", values=up)
    rep.tables.append(values_table("eta_constants", ("case", "N", "w", "power", "ratio_to_power_bound"), rows))
    return rep


def run_class_union(P: dict, seed: int):
    d, p, q = P["d"], exact(P["p"]), exact(P["q"])
    u_of, w_of = power(P["u_exponent"]), power(P["w_exponent"])
    a0 = exact(P["a"])
    require(0 <= a0 < 1, "need 0 <= a < 1")
    ladder = sorted(exact_list(P["ladder"]))
    grid = grid_of(d, (P["L"], P["N"][-1]))
    cubes = CubeFamily(grid)
    rep = new_report("class-union", grid, cubes)
    lw, lu = w_of(grid).log, u_of(grid).log
    for lo, hi in zip(ladder, ladder[1:]):
        _inclusion(rep, f"monotone_{tag(lo)}_{tag(hi)}",
                   _blocks(cubes, [lw], [p], q, float(lo) * lu), _blocks(cubes, [lw], [p], q, float(hi) * lu), cubes)
    rows = []
    for b in [x for x in exact_list(P["b_candidates"]) if a0 < x <= 1]:
        vals = []
        for N in P["N"]:
            g = grid_of(d, (P["L"], N))
            vals.append(partial_constant(w_of(g), u_of(g).power(num(b)), [p], q, CubeFamily(g)).value)
        rows.append((fmt(b), *vals))
    cols = ("b",) + tuple(f"N{n}" for n in P["N"])
    table = values_table("candidates", cols, rows)
    rep.tables.append(table)
    good = [r for r in rows if verdicts.drift(r[1:], verdicts.STABILITY_TOL)]
    pick = good[-1] if good else rows[0]
    rep.add("chosen_b", pick[0])
    verdicts.check(rep, "some_b_stable", "drift", values=list(pick[1:]), tol=verdicts.STABILITY_TOL)
    base = [partial_constant(w_of(grid_of(d, (P["L"], N))), u_of(grid_of(d, (P["L"], N))).power(num(a0)),
                             [p], q, CubeFamily(grid_of(d, (P["L"], N)))).value for N in P["N"]]
    rep.add("base_constants", base)
    verdicts.check(rep, "base_member", "drift", values=base, tol=verdicts.STABILITY_TOL)
    return rep


def run_embedding(P: dict, seed: int):
    d = P["d"]
    Ns = [int(n) for n in P["N"]]
    grids = [grid_of(d, (P["L"], N)) for N in Ns]
    fams = [CubeFamily(g) for g in grids]
    rep = new_report("embedding", grids[-1], fams[-1])
    u_of, w_of = power(P["u_exponent"]), power(P["w_exponent"])
    a = -exact(P["u_exponent"])
    r_u = Fraction(d) / a
    p, q = exact(P["p"]), exact(P["q"])
    g, cubes = grids[-1], fams[-1]
    lw, lu = w_of(g).log, u_of(g).log

    # plain class below the partial class, per cube
    _inclusion(rep, "plain_below_partial", _blocks(cubes, [lw], [p], q), _blocks(cubes, [lw], [p], q, lu), cubes)
    # uw in the plain class with at most the partial constant
    _inclusion(rep, "uw_plain", _blocks(cubes, [lw + lu], [p], q), _blocks(cubes, [lw], [p], q, lu), cubes)

    def series(make_w, make_u, pp, qq):
        return [partial_constant(make_w(gr), make_u(gr), [pp], qq, fam).value for gr, fam in zip(grids, fams)]

    rows = []
    # u^{-1} w for w in the plain class with 1 < p < r_u
    require(1 < p < r_u, "need 1 < p < r_u")
    target = p * r_u / (r_u - p)
    shifted = lambda gr: Weight(gr, log=w_of(gr).log - u_of(gr).log)
    vals = series(shifted, u_of, target, q)
    rows.append(("shifted_index", fmt(target), *vals))
    verdicts.check(rep, "shifted_stable", "stable", values=vals)

    # A_{1,q} weights: any r above r_u' works
    one_w = power(P["w1_exponent"])
    for r in exact_list(P["r_above"]):
        require(r > conj(r_u), "r must exceed r_u'")
        vals = series(lambda gr: Weight(gr, log=one_w(gr).log - u_of(gr).log), u_of, r, q)
        rows.append((f"a1_r{tag(r)}", fmt(r), *vals))
        verdicts.check(rep, f"a1_r{tag(r)}_stable", "stable", values=vals)
    # at r = r_u' the constant is reported without a verdict
    edge = series(lambda gr: Weight(gr, log=one_w(gr).log - u_of(gr).log), u_of, conj(r_u), q)
    rows.append(("a1_edge", fmt(conj(r_u)), *edge))

    # plain class into the partial class with 1/q~ = 1/q + 1/r_u
    q_small = exact(P["q_plain"])
    require(q_small < r_u, "need q < r_u")
    q_tilde = 1 / (1 / q_small + 1 / r_u)
    vals = series(w_of, u_of, p, q_tilde)
    rows.append(("plain_to_partial", fmt(q_tilde), *vals))
    verdicts.check(rep, "plain_to_partial_stable", "stable", values=vals)

    # partial class for u2 into the class for u u2
    u2_of = bracket(P["u2_exponent"])
    q2 = exact(P["q2"])
    require(1 < p and q2 < r_u, "need 1 < p and q2 < r_u")
    q1 = 1 / (1 / q2 + 1 / r_u)
    require(p <= q1, "need p <= q1")
    v2 = series(w_of, u2_of, p, q2)
    v1 = series(w_of, lambda gr: u_of(gr).times(u2_of(gr)), p, q1)
    rows.append(("u2_class", fmt(q2), *v2))
    rows.append(("u1_class", fmt(q1), *v1))
    verdicts.check(rep, "u2_stable", "stable", values=v2)
    verdicts.check(rep, "u1_stable", "stable", values=v1)
    cols = ("case", "exponent") + tuple(f"N{n}" for n in Ns)
    rep.tables.append(values_table("constants", cols, rows))
    return rep
