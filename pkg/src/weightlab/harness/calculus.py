"""Scenarios built mostly on exact exponent arithmetic."""

from __future__ import annotations

from fractions import Fraction

from ..exponents import (INF, derived_deltas, fmt, from_recip, modified_maximal_exponents, multilinear_target_check,
                         offdiagonal_chain, one_var_extrapolation, recip)
from ..operators import fractional_integral
from . import verdicts
from .common import (bracket, describe, exact, exact_list, grid_of, new_report, num, power, probes, require,
                     schedule, values_table, wnorm)
from .scan import ratio_scan


def run_offdiag_chain(P: dict, seed: int):
    d, alpha, beta, p, s = (exact(P[k]) for k in ("d", "alpha", "beta", "p", "s"))
    chain = offdiagonal_chain(d, alpha, beta, p, s)
    rep = new_report("offdiag-chain")
    rows = [(st.k, fmt(st.beta), fmt(st.q), fmt(st.s)) for st in chain.steps]
    rep.tables.append(values_table("chain", ("k", "beta", "q", "s"), rows, limit=fmt(chain.limit)))
    rep.add("k0", chain.k0)
    rep.add("limit", fmt(chain.limit))
    rep.add("violations", list(chain.violations))
    verdicts.check(rep, "k0", "truth", value=chain.k0 == int(P["expected_k0"]))
    if len(chain.steps) > 1:
        verdicts.check(rep, "beta2", "truth", value=fmt(chain[2].beta) == fmt(exact(P["expected_beta2"])))
    steps = chain.steps
    verdicts.check(rep, "limit_identity", "truth",
                   value=all(2 * b.beta - a.beta == chain.limit for a, b in zip(steps, steps[1:])))
    verdicts.check(rep, "no_violations", "truth", value=not chain.violations)
    return rep


def run_extrapolation_spot(P: dict, seed: int):
    rep = new_report("extrapolation-spot")

    # one-variable extrapolation
    p0, q0, t0, p = exact_list(P["one_var"])
    q, t = one_var_extrapolation(p0, q0, t0, p)
    rep.add("one_var", [fmt(q), fmt(t)])
    verdicts.check(rep, "one_var_shift", "truth",
                   value=recip(p) - recip(p0) == recip(q) - recip(q0) == recip(t) - recip(t0))

    # modified maximal exponents used by the companion pair check
    mm = modified_maximal_exponents(*exact_list(P["modified"]))
    rep.add("modified_maximal", {"gamma": fmt(mm.gamma), "q_gamma": fmt(mm.q_gamma), "degenerate": mm.degenerate})

    # multilinear target
    mt = P["multilinear"]
    ver = multilinear_target_check(exact_list(mt["p"]), exact(mt["q"]), exact_list(mt["p_star"]),
                                   exact(mt["q_star"]), exact_list(mt["r"]))
    rep.add("multilinear_failed", list(ver.failed))
    verdicts.check(rep, "multilinear_target", "truth", value=ver.ok)
    de = derived_deltas(exact_list(mt["r"]), exact_list(mt["p"]), exact(mt["q"]))
    rep.add("derived", {"kappa": fmt(de.kappa), "rho": fmt(de.rho), "delta": [fmt(x) for x in de.delta]})
    verdicts.check(rep, "kappa_positive", "truth", value=de.kappa > 0 and de.inv_rho > 0)

    # majorant window for the off-diagonal bounds
    d, b1, b2, eps0 = (exact(P["window"][k]) for k in ("d", "beta1", "beta2", "eps0"))
    crit = d / (b2 - b1)
    rep.add("majorant_theta", fmt(crit - eps0))
    verdicts.check(rep, "majorant_window", "truth", value=0 < eps0 < crit - 1)

    # numeric spot checks
    alpha, beta, p = (exact(P["spot"][k]) for k in ("alpha", "beta", "p"))
    dd = int(P["spot"]["d"])
    q = from_recip(recip(p) - alpha / dd)
    t = from_recip(recip(p) - beta / dd)
    require(q is not INF and 1 < p <= t < q, "need 1 < p <= t < q < inf")
    rep.add("spot_exponents", {"q": fmt(q), "t": fmt(t)})
    sched = schedule(P["spot"]["schedule"])
    u_of, v_of = bracket(P["spot"]["u_exponent"]), power(P["spot"]["v_exponent"])

    def lhs_u(f, ctx):
        return wnorm(fractional_integral(f, num(alpha)), num(q), ctx[0])

    def rhs_u(f, ctx):
        return wnorm(f, num(p))

    t1 = ratio_scan(lhs_u, rhs_u, sched, probes(seed), dd, lambda g: (u_of(g),), name="lorentz_weight_spot")

    def lhs_v(f, ctx):
        return wnorm(fractional_integral(f, num(alpha)), num(q), ctx[0])

    def rhs_v(f, ctx):
        return wnorm(f, num(p), ctx[0])

    t2 = ratio_scan(lhs_v, rhs_v, sched, probes(seed), dd, lambda g: (v_of(g),), name="power_weight_spot")
    for tab in (t1, t2):
        rep.tables.append(tab)
        verdicts.check(rep, f"{tab.name}_stable", "stable", values=tab.column("max_ratio"))
    g = grid_of(dd, sched[-1])
    describe(rep, g)
    return rep
