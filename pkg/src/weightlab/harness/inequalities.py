"""Scenarios that test weighted operator inequalities by ratio scans."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from ..exponents import INF, conj, fmt, recip
from ..grid import CubeFamily, Grid, GriddedFunction
from ..norms import OrliczFunction, bmo_norm, lebesgue_norm, lorentz_norm, luxemburg_blocks, morrey_norm
from ..operators import (commutator, domination_gap, fractional_integral, fractional_maximal,
                         gradient_magnitude, multilinear_fractional_maximal, rdf_iterate)
from ..probes import b_probes, indicator, probe_family, probe_names
from ..weights import Weight, ap_constant, apq_constant, as_weight, construct_majorant, partial_constant
from ..estimate import estimate_blocks
from . import verdicts
from .common import (bracket, describe, exact, exact_list, grid_of, new_report, num, power, probes,
                     require, schedule, split_power, stability, values_table, wide_gaussians, wnorm)
from .scan import good_lambda_check, ratio_scan


def _majorant_u(U: GriddedFunction, r, cubes: CubeFamily) -> Weight:
    """``M(U^r)^{1/r}``."""
    return as_weight(fractional_maximal(U, 0, num(r), cubes))


# --------------------------------------------------------------------------
# multilinear fractional maximal function


def run_mam(P: dict, seed: int):
    d, alpha, q = P["d"], exact(P["alpha"]), exact(P["q"])
    ps, bs, bad = exact_list(P["p"]), exact_list(P["b"]), exact_list(P["b_nonmember"])
    m = len(ps)
    require(len(bs) == m and len(bad) == m, "one weight exponent per slot")
    require(0 <= alpha < m * d, "need 0 <= alpha < m d")
    require(all(p is INF or p > 1 for p in ps), "need 1 < p_i <= inf")
    inv_p = sum((recip(p) for p in ps), Fraction(0))
    require(q is not INF and q > 0 and inv_p > 0 and inv_p == recip(q) + alpha / d,
            "need 1/p = sum 1/p_i = 1/q + alpha/d > 0")
    sched = schedule(P["schedule"])
    names = probe_names()
    # bilinear probe pairs (f_k, f_{k+1}); m-linear tuples wrap around
    def family(grid):
        fs = probe_family(grid, seed)
        return {"+".join(names[(k + j) % len(fs)] for j in range(m)): tuple(fs[(k + j) % len(fs)] for j in range(m))
                for k in range(len(fs))}

    def setup(grid):
        cubes = CubeFamily(grid)
        ws = [power(b)(grid) for b in bs]
        prod = Weight(grid, log=np.add.reduce([w.log for w in ws]))
        return cubes, ws, prod

    def lhs(fs, ctx):
        cubes, _, prod = ctx
        return wnorm(multilinear_fractional_maximal(fs, num(alpha), cubes), num(q), prod)

    def rhs(fs, ctx):
        _, ws, _ = ctx
        return math.prod(wnorm(f, num(p), w) for f, p, w in zip(fs, ps, ws))

    table = ratio_scan(lhs, rhs, sched, family, d, setup)
    grid = grid_of(d, sched[-1])
    rep = new_report("mam", grid)
    stability(rep, table)
    rows = []
    for entry in sched:
        g = grid_of(d, entry)
        cubes = CubeFamily(g)
        good = apq_constant([power(b)(g) for b in bs], ps, q, cubes).value
        nonm = apq_constant([power(b)(g) for b in bad], ps, q, cubes).value
        rows.append((g.L, g.N, good, nonm))
    const = values_table("class_constants", ("L", "N", "member", "non_member"), rows)
    rep.tables.append(const)
    verdicts.check(rep, "member_constant_stable", "stable", values=const.column("member"))
    # necessity: the class constant itself is the ratio for f_i = w_i^{-p_i'} on one cube
    verdicts.check(rep, "non_member_constant_grows", "increasing", values=const.column("non_member"))
    return rep


# --------------------------------------------------------------------------
# weighted M_alpha and I_alpha with a partial weight


def _balance(d, p, q, beta):
    require(1 < p <= q and q is not INF, "need 1 < p <= q < inf")
    require(recip(p) - recip(q) == beta / d, "need 1/p - 1/q = beta/d")


def run_lp_lq_m(P: dict, seed: int):
    d, alpha, beta, p, q = P["d"], *(exact(P[k]) for k in ("alpha", "beta", "p", "q"))
    require(0 <= beta < alpha < d, "need 0 <= beta < alpha < d")
    _balance(d, p, q, beta)
    u_of, w_of = bracket(P["u_exponent"]), power(P["w_exponent"])
    lor_p = Fraction(d) / (alpha - beta)
    sched = schedule(P["schedule"])

    def setup(grid):
        cubes = CubeFamily(grid)
        u, w = u_of(grid), w_of(grid)
        return cubes, u, w, lorentz_norm(u, float(lor_p), 1)

    def lhs(f, ctx):
        cubes, u, w, _ = ctx
        return wnorm(fractional_maximal(f, num(alpha), 1, cubes), num(q), u * w)

    def rhs(f, ctx):
        _, _, w, lor = ctx
        return lor * wnorm(f, num(p), w)

    table = ratio_scan(lhs, rhs, sched, probes(seed), d, setup)
    grid = grid_of(d, sched[-1])
    cubes, u, w, lor = setup(grid)
    rep = new_report("lp-lq-m", grid, cubes)
    rep.add("lorentz_norm_u", lor, exponent=fmt(lor_p))
    rep.add("u_a1_constant", ap_constant(u, 1, cubes))
    rep.add("w_partial_constant", partial_constant(w, u, [p], q, cubes))
    stability(rep, table)
    return rep


def run_lp_lq_ia(P: dict, seed: int):
    d, alpha, beta, p, q, r, s = P["d"], *(exact(P[k]) for k in ("alpha", "beta", "p", "q", "r", "s"))
    require(0 <= beta < alpha < d, "need 0 <= beta < alpha < d")
    require(1 < r < s, "need 1 < r < s")
    _balance(d, p, q, beta)
    U_of, w_of = bracket(P["U_exponent"]), power(P["w_exponent"])
    morrey_p = Fraction(d) / (alpha - beta)
    sched = schedule(P["schedule"])

    def setup(grid):
        cubes = CubeFamily(grid)
        U, w = U_of(grid), w_of(grid)
        return cubes, U, w, morrey_norm(U, morrey_p, s, cubes).value

    def lhs(f, ctx):
        _, U, w, _ = ctx
        return wnorm(fractional_integral(f, num(alpha)), num(q), U * w)

    def rhs(f, ctx):
        _, _, w, mor = ctx
        return mor * wnorm(f, num(p), w)

    names = P["probes"]
    table = ratio_scan(lhs, rhs, sched, probes(seed, names), d, setup)
    grid = grid_of(d, sched[-1])
    cubes, U, w, mor = setup(grid)
    u = _majorant_u(U, r, cubes)
    rep = new_report("lp-lq-ia", grid, cubes)
    rep.add("morrey_norm_U", mor, exponent=fmt(morrey_p), s=fmt(s))
    rep.add("u_a1_constant", ap_constant(u, 1, cubes))
    rep.add("w_partial_constant", partial_constant(w, u, [p], q, cubes))
    stability(rep, table)

    # maximal-function companion bound: needs r < s < p and U in the Lorentz space
    require(s < p, "the maximal-function bound needs r < s < p")
    Uc_of = bracket(P["U_cor_exponent"])

    def lhs_c(f, ctx):
        cubes, U, w = ctx
        return wnorm(fractional_maximal(f, num(alpha), 1, cubes), num(q), U * w)

    def rhs_c(f, ctx):
        return wnorm(f, num(p), ctx[2])

    cor_sched = schedule(P["corollary_schedule"])
    cor = ratio_scan(lhs_c, rhs_c, cor_sched, probes(seed), d,
                     lambda g: (CubeFamily(g), Uc_of(g), w_of(g)), name="maximal_ratios")
    Uc = Uc_of(grid_of(d, cor_sched[-1]))
    rep.add("lorentz_norm_U_cor", lorentz_norm(Uc, float(morrey_p), num(s)))
    stability(rep, cor, "maximal_stability")
    return rep


def run_ia_ma(P: dict, seed: int):
    d, alpha, q = P["d"], exact(P["alpha"]), exact(P["q"])
    require(0 < alpha < d and q is not INF and q > 0, "need 0 < alpha < d and 0 < q < inf")
    w_of = power(P["w_exponent"])
    sched = schedule(P["schedule"])

    def setup(grid):
        return CubeFamily(grid), w_of(grid)

    def lhs(f, ctx):
        return wnorm(fractional_integral(f, num(alpha)), num(q), ctx[1] ** (1 / num(q))) ** num(q)

    def rhs(f, ctx):
        cubes, w = ctx
        return wnorm(fractional_maximal(f, num(alpha), 1, cubes), num(q), w ** (1 / num(q))) ** num(q)

    table = ratio_scan(lhs, rhs, sched, probes(seed), d, setup)
    grid = grid_of(d, sched[-1])
    cubes, w = setup(grid)
    rep = new_report("ia-ma", grid, cubes)
    rep.add("w_ainf_constant", ap_constant(w, INF, cubes))
    rep.tables.append(table)
    verdicts.check(rep, "drift", "drift", values=table.column("max_ratio"), tol=verdicts.STABILITY_TOL)
    return rep


# --------------------------------------------------------------------------
# gradient inequalities


def _gradient_setup(P: dict, d: int):
    p, q, beta, q0, r = (exact(P[k]) for k in ("p", "q", "beta", "q0", "r"))
    require(0 <= beta < d, "need 0 <= beta < d")
    _balance(d, p, q, beta)
    require(1 < q0 <= q and 1 < r < q0, "need 1 < r < q0 <= q")
    return p, q, beta, q0, r


def run_fefferman_phong(P: dict, seed: int):
    d = P["d"]
    p, q, beta, q0, r = _gradient_setup(P, d)
    U_of, w_of = bracket(P["U_exponent"]), power(P["w_exponent"])
    sched = schedule(P["schedule"])

    def lhs(f, ctx):
        return wnorm(f, num(q), ctx[0] * ctx[1])

    def rhs(f, ctx):
        return wnorm(gradient_magnitude(f), num(p), ctx[1])

    table = ratio_scan(lhs, rhs, sched, probes(seed, P["probes"]), d, lambda g: (U_of(g), w_of(g)))
    grid = grid_of(d, sched[-1])
    cubes = CubeFamily(grid)
    U, w = U_of(grid), w_of(grid)
    u = _majorant_u(U, r, cubes)
    rep = new_report("fefferman-phong", grid, cubes)
    rep.add("lorentz_norm_U", lorentz_norm(U, float(Fraction(d) / (1 - beta)), num(q0)))
    rep.add("w_partial_constant", partial_constant(w, u, [p], q, cubes))
    stability(rep, table)
    return rep


def run_poincare(P: dict, seed: int):
    d = P["d"]
    p, q, beta, q0, r = _gradient_setup(P, d)
    lo, hi = (float(exact(x)) for x in P["omega"])
    U_of, w_of = bracket(P["U_exponent"]), power(P["w_exponent"])
    sched = schedule(P["schedule"])

    def setup(grid):
        omega = indicator(grid, lo, hi)
        return U_of(grid), w_of(grid), omega

    def lhs(f, ctx):
        U, w, omega = ctx
        inside = omega.values > 0
        mean = float(np.mean(f.values[inside]))
        return wnorm((f - mean) * omega, num(q), U * w)

    def rhs(f, ctx):
        _, w, omega = ctx
        return wnorm(gradient_magnitude(f) * omega, num(p), w)

    table = ratio_scan(lhs, rhs, sched, probes(seed, P["probes"]), d, setup)
    grid = grid_of(d, sched[-1])
    rep = new_report("poincare", grid)
    rep.add("omega", [lo, hi])
    stability(rep, table)
    return rep


def run_hardy_leray(P: dict, seed: int):
    d = P["d"]
    require(d >= 3, "the axis-weighted form needs d >= 3")
    sched = schedule(P["schedule"])

    def setup(grid):
        r, rp = grid.radius(), grid.radius(0.0, grid.d - 1)
        return r, rp

    def lhs(f, ctx):
        r, rp = ctx
        return float(np.sum(f.values ** 2 / (r * rp))) * f.grid.cell_volume

    def rhs(f, ctx):
        r, rp = ctx
        return float(np.sum(gradient_magnitude(f).values ** 2 * rp / r)) * f.grid.cell_volume

    table = ratio_scan(lhs, rhs, sched, wide_gaussians, d, setup)
    grid = grid_of(d, sched[-1])
    rep = new_report("hardy-leray", grid)

    # the general form with w = (|x'|/|x|)^{1/2}, u = |x|^{-1}
    w_of = split_power(Fraction(-1, 2), Fraction(1, 2))

    def lhs_h(f, ctx):
        return wnorm(f * ctx[0] ** -1.0, 2, ctx[1])

    def rhs_h(f, ctx):
        return wnorm(gradient_magnitude(f), 2, ctx[1])

    gen = ratio_scan(lhs_h, rhs_h, sched, wide_gaussians, d,
                     lambda g: (GriddedFunction(g, g.radius()), w_of(g)), name="weighted_ratios")
    cgrid = grid_of(d, sched[P["constant_index"]])
    ccubes = CubeFamily(cgrid)
    rep.add("w_partial_constant", partial_constant(w_of(cgrid), power(-1)(cgrid), [2], 2, ccubes),
            grid={"d": d, "L": cgrid.L, "N": cgrid.N})
    stability(rep, table)
    stability(rep, gen, "weighted_stability")
    return rep


def run_ckn(P: dict, seed: int):
    d = P["d"]
    p, p0, q, a, q0, r = (exact(P[k]) for k in ("p", "p0", "q", "a", "q0", "r"))
    g2, g3 = exact(P["gamma2"]), exact(P["gamma3"])
    require(p0 >= p > 1 and q > 0 and 0 < a <= 1, "need p0 >= p > 1, q > 0, 0 < a <= 1")
    require(q0 > r > 1, "need q0 > r > 1")
    inv_s = a / p0 + (1 - a) / q
    require(inv_s > 0 and inv_s <= a / p + (1 - a) / q, "need 1/s = a/p0 + (1-a)/q <= a/p + (1-a)/q")
    s = 1 / inv_s
    # U = |x|^{-(1 - d/p + d/p0)} lies in the weak Lorentz space of the statement
    U_exp = -(1 - Fraction(d) / p + Fraction(d) / p0)
    w_exp = a * U_exp + a * g2 + (1 - a) * g3
    U_of, w1_of, w2_of, w_of = power(U_exp), power(g2), power(g3), power(w_exp)
    sched = schedule(P["schedule"])

    def setup(grid):
        return w_of(grid), w1_of(grid), w2_of(grid)

    def lhs(f, ctx):
        return wnorm(f, num(s), ctx[0])

    def rhs(f, ctx):
        _, w1, w2 = ctx
        return (wnorm(gradient_magnitude(f), num(p), w1) ** num(a)
                * wnorm(f, num(q), w2) ** (1 - num(a)))

    table = ratio_scan(lhs, rhs, sched, wide_gaussians, d, setup)
    grid = grid_of(d, sched[-1])
    rep = new_report("ckn", grid)
    rep.add("s", fmt(s))
    rep.add("U_exponent", fmt(U_exp))
    rep.add("w_exponent", fmt(w_exp))
    cgrid = grid_of(d, sched[P["constant_index"]])
    ccubes = CubeFamily(cgrid)
    u = _majorant_u(U_of(cgrid), r, ccubes)
    rep.add("w1_partial_constant", partial_constant(w1_of(cgrid), u, [p], p0, ccubes),
            grid={"d": d, "L": cgrid.L, "N": cgrid.N})
    stability(rep, table)
    return rep


# --------------------------------------------------------------------------
# commutators


def _commutator(P: dict, seed: int, name: str):
    d, alpha, beta, p, q, s = P["d"], *(exact(P[k]) for k in ("alpha", "beta", "p", "q", "s"))
    require(0 <= beta < alpha < d, "need 0 <= beta < alpha < d")
    _balance(d, p, q, beta)
    morrey_p = Fraction(d) / (alpha - beta)
    require(1 <= s < morrey_p, "need 1 <= s < d/(alpha - beta)")
    u_of, w_of = power(P["u_exponent"]), power(P["w_exponent"])
    symbol = P["b"]
    sched = [(float(L), int(P["cells_per_unit"] * 2 * L)) for L in P["L"]]

    def setup(grid):
        cubes = CubeFamily(grid)
        u, w = u_of(grid), w_of(grid)
        return cubes, u, w, b_probes(grid)[symbol], morrey_norm(u, morrey_p, s, cubes).value

    def lhs(f, ctx):
        _, u, w, b, _ = ctx
        return wnorm(commutator(b, f, num(alpha)), num(q), u * w)

    def rhs(f, ctx):
        *_, mor = ctx
        return mor * wnorm(f, num(p), ctx[2])

    table = ratio_scan(lhs, rhs, sched, probes(seed), d, setup)
    rows = []
    for entry in sched:
        g = grid_of(d, entry)
        cubes, u, w, b, mor = setup(g)
        rows.append((g.L, g.N, bmo_norm(b, cubes).value, ap_constant(u, 1, cubes).value, mor,
                     partial_constant(w, u, [p], q, cubes).value))
    aux = values_table("normalisations", ("L", "N", "bmo_b", "u_a1", "u_morrey", "w_partial"), rows)
    rep = new_report(name, grid_of(d, sched[-1]))
    rep.add("symbol", symbol)
    rep.tables.append(aux)
    return rep, table


def run_commutator_bmo(P: dict, seed: int):
    rep, table = _commutator(P, seed, "commutator-bmo")
    stability(rep, table)
    return rep


def run_commutator_not_bmo(P: dict, seed: int):
    rep, table = _commutator(P, seed, "commutator-not-bmo")
    rep.tables.append(table)
    verdicts.check(rep, "blowup", "blowup", values=table.column("max_ratio"),
                   factor=verdicts.BLOWUP_FACTOR, doublings=verdicts.BLOWUP_DOUBLINGS)
    return rep


def run_good_lambda(P: dict, seed: int):
    d, alpha, s = P["d"], exact(P["alpha"]), exact(P["s"])
    require(0 < alpha < d and 1 < s < Fraction(d) / alpha, "need 1 < s < d/alpha")
    lo, hi = (float(exact(x)) for x in P["f_support"])
    symbol = P["b"]
    grid = grid_of(d, (P["L"], P["N"]))
    out = good_lambda_check(lambda g: b_probes(g)[symbol], lambda g: indicator(g, lo, hi),
                            alpha, s, P["gamma1"], P["gamma2"], grid=grid)
    coarse, fine = out["coarse"], out["fine"]
    rep = new_report("good-lambda", out["grids"][1])
    rep.add("symbol", symbol)
    rep.add("bmo_norm", [coarse.bmo, fine.bmo])
    rep.add("c_max", [coarse.c_max, fine.c_max])
    rep.add("constants", list(out["constants"]))
    rep.tables += [coarse.table("coarse"), fine.table("fine")]
    rep.add("all_rhs_zero", coarse.all_rhs_zero or fine.all_rhs_zero)
    verdicts.check(rep, "rhs_nonempty", "truth", value=not (coarse.all_rhs_zero or fine.all_rhs_zero))
    verdicts.check(rep, "constant_finite", "truth", value=all(math.isfinite(c) for c in out["constants"]))
    verdicts.check(rep, "drift", "drift", values=list(out["constants"]), tol=verdicts.STABILITY_TOL)
    return rep


def run_bump(P: dict, seed: int):
    d, alpha, p, q, delta = P["d"], *(exact(P[k]) for k in ("alpha", "p", "q", "delta"))
    require(0 < alpha < d and 1 < p <= q and q is not INF and delta > 0, "need 1 < p <= q < inf, delta > 0")
    pc = conj(p)
    scale = alpha / d + recip(q) - recip(p)
    u_of, sig_of = power(P["u_exponent"]), power(P["sigma_exponent"])
    forms = {
        "AB": (OrliczFunction("power-log", num(q), num(2 * q - 1 + delta)),
               OrliczFunction("power-log", num(pc), num(pc - 1 + delta))),
        "CD": (OrliczFunction("power-log", num(q), num(q - 1 + delta)),
               OrliczFunction("power-log", num(pc), num(2 * pc - 1 + delta))),
    }
    rows = []
    for entry in schedule(P["schedule"]):
        g = grid_of(d, entry)
        cubes = CubeFamily(g)
        u1 = u_of(g) ** (1 / num(q))
        s1 = sig_of(g) ** (1 / num(pc))
        vals = []
        for phi_u, phi_s in forms.values():
            a, b = luxemburg_blocks(u1, phi_u, cubes), luxemburg_blocks(s1, phi_s, cubes)
            blocks = [cubes.volumes(part) ** float(scale) * x * y for part, x, y in zip(cubes.partitions, a, b)]
            vals.append(estimate_blocks(cubes, blocks, log=False).value)
        rows.append((g.L, g.N, *vals))
    table = values_table("bump_constants", ("L", "N", "AB", "CD"), rows, scale=fmt(scale))
    rep = new_report("bump", grid_of(d, schedule(P["schedule"])[-1]))
    rep.tables.append(table)
    for form in forms:
        verdicts.check(rep, f"{form}_stable", "stable", values=table.column(form))
    return rep


def run_domination(P: dict, seed: int):
    d, alpha, beta = P["d"], exact(P["alpha"]), exact(P["beta"])
    require(0 <= beta < alpha < d, "need 0 <= beta < alpha < d")
    grid = grid_of(d, (P["L"], P["N"]))
    cubes = CubeFamily(grid)
    u = bracket(P["u_exponent"])(grid)
    rows = []
    for name, f in zip(probe_names(), probe_family(grid, seed)):
        f = abs(f)
        gap = domination_gap(f, u, alpha, beta, cubes)
        lhs = fractional_maximal(f, num(alpha), 1, cubes)
        rel = gap.values / np.maximum(lhs.values, np.finfo(float).tiny)
        rows.append((name, float(rel.min()), float(gap.values.min())))
    table = values_table("gaps", ("probe", "min_relative_gap", "min_gap"), rows)
    rep = new_report("domination", grid, cubes)
    rep.add("lorentz_norm_u", lorentz_norm(u, float(Fraction(d) / (alpha - beta)), 1))
    rep.tables.append(table)
    verdicts.check(rep, "gap_nonnegative", "at_least", value=min(table.column("min_relative_gap")),
                   bound=-P["tolerance"])
    return rep


def run_rdf(P: dict, seed: int):
    d, p, t = P["d"], exact(P["p"]), exact(P["t"])
    require(1 < p and p is not INF and t > 0, "need 1 < p < inf, t > 0")
    gamma = recip(t) + 1 - recip(p)
    require(gamma <= 1, "need gamma = 1/t + 1/p' <= 1")
    K = int(P["K"])
    grid = grid_of(d, (P["L"], P["N"]))
    cubes = CubeFamily(grid)
    u, w = bracket(P["u_exponent"])(grid), power(P["w_exponent"])(grid)
    a1 = ap_constant(u, 1, cubes).value
    rows = []
    norm_est = None
    names = P["probes"]
    fam = dict(zip(probe_names(), probe_family(grid, seed)))
    for name in names:
        f = abs(fam[name])
        res = rdf_iterate(f, u, gamma, t, w, K, cubes)
        norm_est = res.norm_estimate
        R = res.function
        sigma = GriddedFunction(grid, w.values ** num(t))
        nR = lebesgue_norm(R, num(t * gamma), sigma)
        weight = Weight(grid, log=-u.log + num(gamma) * np.log(R.values))
        const = partial_constant(weight, u, [1], 1 / gamma, cubes).value
        rows.append((name, float((R.values - f.values).min()), nR / res.norm_f, const))
    bound = 2.0 * norm_est ** num(gamma) * a1 * P["slack"]
    table = values_table("rdf", ("probe", "min_excess", "norm_ratio", "partial_constant"), rows)
    rep = new_report("rdf", grid, cubes)
    rep.add("gamma", fmt(gamma))
    rep.add("norm_estimate", norm_est)
    rep.add("u_a1_constant", a1)
    rep.add("constant_bound", bound)
    rep.tables.append(table)
    verdicts.check(rep, "majorizes", "at_least", value=min(table.column("min_excess")), bound=0.0)
    verdicts.check(rep, "norm_bound", "at_most", value=max(table.column("norm_ratio")), bound=2.0 + 2.0 ** -K)
    verdicts.check(rep, "class_bound", "at_most", value=max(table.column("partial_constant")), bound=bound)

    # companion pair: (w^{1/γ}, u^{1/γ}) in the (qγ, ∞) class
    qg = t * gamma
    rep.add("q_gamma", fmt(qg), flag="q gamma <= 1" if qg <= 1 else None)
    if qg > 1:
        pair = [w.power(1 / num(gamma)), u.power(1 / num(gamma))]
        pc = apq_constant(pair, [qg, INF], qg, cubes).value
        wpart = partial_constant(w, u, [p], t, cubes).value
        pb = a1 ** (1 / num(gamma) - 1) * wpart ** (1 / num(gamma))
        rep.add("pair_constant", pc)
        rep.add("pair_bound", pb)
        verdicts.check(rep, "pair_within_bound", "at_most", value=pc, bound=pb * (1 + 1e-9))
    return rep


def run_majorant(P: dict, seed: int):
    d = P["d"]
    beta1, beta2, alpha, eps0, s2 = (exact(P[k]) for k in ("beta1", "beta2", "alpha", "eps0", "s2"))
    U_of, u2_of = power(P["U_exponent"]), bracket(P["u2_exponent"])
    rep = None
    variants = {"general": alpha, "endpoint": beta2}
    for label, a in variants.items():
        rows = []
        for entry in schedule(P["schedule"]):
            g = grid_of(d, entry)
            cubes = CubeFamily(g)
            U, u2 = U_of(g), u2_of(g)
            u1 = construct_majorant(U, u2 if a != beta2 else None, beta1, beta2, a, s2, eps0, cubes)
            base = U if a == beta2 else U * u2
            ratio = float((u1.values / base.values).min())
            s1 = exact(P["s1"])
            mor = morrey_norm(u1, Fraction(d) / (a - beta1), s1, cubes).value if a > beta1 and \
                s1 < Fraction(d) / (a - beta1) else math.nan
            rows.append((g.L, g.N, ratio, ap_constant(u1, 1, cubes).value, mor))
        table = values_table(f"majorant_{label}", ("L", "N", "min_ratio", "a1_constant", "morrey_norm"), rows)
        if rep is None:
            rep = new_report("majorant", grid_of(d, schedule(P["schedule"])[-1]))
        rep.tables.append(table)
        verdicts.check(rep, f"{label}_dominates", "at_least", value=min(table.column("min_ratio")),
                       bound=1 - 1e-12)
        verdicts.check(rep, f"{label}_a1_stable", "stable", values=table.column("a1_constant"))
        verdicts.check(rep, f"{label}_morrey_finite", "truth",
                       value=all(math.isfinite(x) for x in table.column("morrey_norm")))
    return rep


def run_a1_product(P: dict, seed: int):
    d = P["d"]
    s1, s2 = exact(P["s1"]), exact(P["s2"])
    require(1 < s1 and 1 < s2 and 1 / s1 + 1 / s2 < 1, "need 1/s1 + 1/s2 < 1")
    n1, n2 = P["f1"], P["f2"]
    rows = []
    for entry in schedule(P["schedule"]):
        g = grid_of(d, entry)
        cubes = CubeFamily(g)
        fam = dict(zip(probe_names(), probe_family(g, seed)))
        m1 = fractional_maximal(abs(fam[n1]), 0, 1, cubes)
        m2 = fractional_maximal(abs(fam[n2]), 0, 1, cubes)
        lg = np.log(m1.values) / num(s1) + np.log(m2.values) / num(s2)
        prod = ap_constant(Weight(g, log=lg), 1, cubes).value
        edge = ap_constant(Weight(g, log=0.5 * np.log(m1.values) + 0.5 * np.log(m2.values)), 1, cubes).value
        rows.append((g.L, g.N, prod, edge))
    table = values_table("a1_constants", ("L", "N", "product", "endpoint_half_half"), rows)
    rep = new_report("a1-product", grid_of(d, schedule(P["schedule"])[-1]))
    rep.tables.append(table)
    verdicts.check(rep, "product_stable", "stable", values=table.column("product"))
    return rep


def _lorentz_family(grid: Grid, seed: int) -> dict[str, GriddedFunction]:
    rng = np.random.default_rng(seed)
    fam = {}
    for k, width in enumerate((0.05, 0.25, 1.0)):
        fam[f"box{k}"] = indicator(grid, -width, width)
    for k in range(4):
        x = grid.coords()[0]
        levels = rng.uniform(0.0, 1.0, size=16)
        idx = np.clip(((x + grid.L) / (2 * grid.L) * 16).astype(int), 0, 15)
        fam[f"steps{k}"] = GriddedFunction(grid, levels[idx])
    for name, f in zip(probe_names(), probe_family(grid, seed)):
        fam[name] = f
    return fam


def run_lorentz_embed(P: dict, seed: int):
    d = P["d"]
    grid = grid_of(d, (P["L"], P["N"]))
    fam = _lorentz_family(grid, seed)
    rep = new_report("lorentz-embed", grid)
    for p, r, q in P["triples"]:
        p, r, q = exact(p), exact(r), exact(q)
        require(p > 0 and 0 < r < q, "need p > 0 and 0 < r < q")
        # sup_t t λ(t)^{1/p} <= r^{1/r} ||f||_{p,r}, then interpolate between r and ∞
        const = num(r) ** (1 / num(r) - (0.0 if q is INF else 1 / num(q)))
        indicator_ratio = num(r) ** (1 / num(r)) / (1.0 if q is INF else num(q) ** (1 / num(q)))
        rows = []
        for name, f in fam.items():
            a = lorentz_norm(f, num(p), num(q))
            b = lorentz_norm(f, num(p), num(r))
            rows.append((name, a / b if b > 0 else 0.0))
        label = f"p{p}_r{r}_q{q}".replace("/", "_")
        table = values_table(label, ("function", "ratio"), rows, constant=const, indicator_ratio=indicator_ratio)
        rep.tables.append(table)
        verdicts.check(rep, f"{label}_bound", "at_most", value=max(table.column("ratio")),
                       bound=const * (1 + 1e-12))
    return rep
