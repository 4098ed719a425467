"""Weights, weight-class constants and the checks built on them.

Every class constant is a product of cube statistics (power means and
essential bounds), so it is described as a list of :class:`Term` objects
and evaluated per cube in log space.  Per-cube log values are kept around
so inequalities between constants can be compared cube by cube.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .estimate import ConstantEstimate, Term, estimate_blocks, geo_term, log_blocks, pow_term, sup_term
from .exponents import (INF, ExponentError, characterization_indices, conj, ext, factorization_exponents,
                        fmt, recip)
from .grid import CubeFamily, Grid, GriddedFunction
from .operators import fractional_maximal
from .reports import InequalityReport

__all__ = [
    "Weight",
    "WeightVector",
    "ConstantEstimate",
    "GateResult",
    "power_weight",
    "ap_constant",
    "apq_constant",
    "apqr_constant",
    "partial_constant",
    "rh_constant",
    "reverse_holder_index",
    "power_gate",
    "factorization_check",
    "characterization_check",
    "duality_check",
    "construct_majorant",
]

SLACK_TOL = 1e-9


def _exact(x):
    """Exponent as an exact ``Fraction`` or ``INF``; floats are rationalised."""
    if isinstance(x, float):
        if math.isinf(x) and x > 0:
            return INF
        return Fraction(x).limit_denominator(10 ** 9)
    if isinstance(x, np.floating):
        return _exact(float(x))
    if isinstance(x, np.integer):
        return Fraction(int(x))
    return ext(x)


# --------------------------------------------------------------------------
# weight types


class Weight(GriddedFunction):
    """Strictly positive gridded function with its logarithm cached.

    ``recipe`` (``grid -> Weight``) lets refinement scans resample the same
    weight on another grid.
    """

    __slots__ = ("log", "recipe")

    def __init__(self, grid: Grid, values=None, *, log=None,
                 recipe: Callable[[Grid], "Weight"] | None = None):
        if (values is None) == (log is None):
            raise ValueError("give exactly one of values and log")
        if log is not None:
            lg = np.array(log, dtype=float)
            if lg.shape != grid.shape and lg.ndim == 1 and lg.size == grid.size:
                lg = lg.reshape(grid.shape, order="F")
            with np.errstate(over="ignore"):
                values = np.exp(lg)
        super().__init__(grid, values)
        if not np.all(self.values > 0):
            raise ValueError("weights must be strictly positive")
        if log is None:
            lg = np.log(self.values)
        lg.setflags(write=False)
        self.log = lg
        self.recipe = recipe

    def __repr__(self):
        return f"Weight(d={self.grid.d}, L={self.grid.L}, N={self.grid.N})"

    @classmethod
    def from_function(cls, f: GriddedFunction) -> "Weight":
        if isinstance(f, Weight):
            return f
        return cls(f.grid, f.values)

    @classmethod
    def one(cls, grid: Grid) -> "Weight":
        return cls(grid, log=np.zeros(grid.shape), recipe=cls.one)

    def power(self, e) -> "Weight":
        e = float(e)
        recipe = None if self.recipe is None else (lambda g, r=self.recipe: r(g).power(e))
        return Weight(self.grid, log=e * self.log, recipe=recipe)

    def times(self, other: "Weight") -> "Weight":
        if other.grid != self.grid:
            raise ValueError("weights live on different grids")
        recipe = None
        if self.recipe is not None and other.recipe is not None:
            recipe = lambda g, a=self.recipe, b=other.recipe: a(g).times(b(g))
        return Weight(self.grid, log=self.log + other.log, recipe=recipe)

    def resample(self, grid: Grid) -> "Weight":
        if grid == self.grid:
            return self
        if self.recipe is None:
            raise ValueError("weight has no recipe, cannot resample")
        return self.recipe(grid)


def as_weight(w) -> Weight:
    if isinstance(w, Weight):
        return w
    if isinstance(w, GriddedFunction):
        return Weight.from_function(w)
    raise TypeError(f"expected a Weight, got {type(w).__name__}")


class WeightVector:
    """Component weights ``w_1..w_m``, an optional partial weight and their product."""

    def __init__(self, components: Sequence, u=None):
        comps = tuple(as_weight(w) for w in components)
        if not comps:
            raise ValueError("need at least one component weight")
        grid = comps[0].grid
        if any(w.grid != grid for w in comps):
            raise ValueError("component weights live on different grids")
        self.components = comps
        self.u = None if u is None else as_weight(u)
        if self.u is not None and self.u.grid != grid:
            raise ValueError("partial weight lives on a different grid")
        self.grid = grid
        self.log_product = np.add.reduce([w.log for w in comps]) if len(comps) > 1 else comps[0].log
        self.product = Weight(grid, log=self.log_product)

    @property
    def m(self) -> int:
        return len(self.components)

    def __len__(self):
        return self.m

    def __getitem__(self, i) -> Weight:
        return self.components[i]

    def logs(self) -> list[np.ndarray]:
        return [w.log for w in self.components]

    def resample(self, grid: Grid) -> "WeightVector":
        return WeightVector([w.resample(grid) for w in self.components],
                            None if self.u is None else self.u.resample(grid))


def _vector(w) -> WeightVector:
    if isinstance(w, WeightVector):
        return w
    if isinstance(w, GriddedFunction):
        return WeightVector([w])
    return WeightVector(list(w))


def power_weight(grid: Grid, b=0, anchor=0.0, axis_split=None) -> Weight:
    """``|x - anchor|^b``, or ``|x - anchor|^{b_full} |x' - anchor'|^{b_partial}``.

    ``x'`` is the first ``d - 1`` coordinates.  Cell centres never hit a
    lattice point, so the weight is finite and positive on the grid.
    """
    if axis_split is not None:
        if grid.d < 2:
            raise ValueError("axis_split needs d >= 2")
        b_full, b_part = (float(_exact(x)) for x in axis_split)
        lg = b_full * np.log(grid.radius(anchor)) + b_part * np.log(grid.radius(anchor, grid.d - 1))
    else:
        b = float(_exact(b))
        lg = np.zeros(grid.shape) if b == 0 else b * np.log(grid.radius(anchor))
    return Weight(grid, log=lg, recipe=lambda g: power_weight(g, b if axis_split is None else 0,
                                                              anchor, axis_split))


# --------------------------------------------------------------------------
# class constants as term lists


def _ap_terms(logw: np.ndarray, p) -> list[Term]:
    p = _exact(p)
    if p is not INF and p < 1:
        raise ExponentError(f"A_p needs p >= 1, got {p}")
    if p == 1:
        return [pow_term(logw, 1, 1), sup_term(logw, -1)]
    if p is INF:
        return [pow_term(logw, 1, 1), geo_term(logw, -1)]
    return [pow_term(logw, 1, 1), pow_term(logw, -1 / (p - 1), p - 1)]


def _class_terms(logs: Sequence[np.ndarray], p, q, r=None, logu=None) -> list[Term]:
    """Terms of the multilinear constant with ``r⃗`` (all ones by default).

    With ``logu`` the vector is extended by the partial weight, whose slot is
    always the essential bound of ``u^{-1}``.
    """
    m = len(logs)
    p = tuple(_exact(x) for x in (p if isinstance(p, (list, tuple)) else [p]))
    q = _exact(q)
    if len(p) != m:
        raise ExponentError(f"{m} weights but {len(p)} exponents")
    if any(x is not INF and x < 1 for x in p):
        raise ExponentError("p_i must lie in [1, inf]")
    if q is not INF and q <= 0:
        raise ExponentError("q must be positive")
    r = (Fraction(1),) * (m + 1) if r is None else tuple(_exact(x) for x in r)
    if len(r) != m + 1:
        raise ExponentError("r⃗ needs m+1 entries")
    for i, (ri, pi) in enumerate(zip(r, p), start=1):
        if ri is INF or ri < 1 or ri > pi:
            raise ExponentError(f"inadmissible r_{i} = {fmt(ri)} for p_{i} = {fmt(pi)}")
    if r[-1] is INF or r[-1] < 1:
        raise ExponentError(f"r_{m + 1} must lie in [1, inf)")
    logprod = np.add.reduce(list(logs)) if m > 1 else logs[0]
    if logu is not None:
        logprod = logprod + logu
    terms = []
    inv = recip(q) - 1 + recip(r[-1])
    if inv < 0:
        raise ExponentError(f"inadmissible: r'_{m + 1} < q")
    terms.append(sup_term(logprod, 1) if inv == 0 else pow_term(logprod, 1 / inv, inv))
    for lw, pi, ri in zip(logs, p, r):
        inv_i = recip(ri) - recip(pi)
        terms.append(sup_term(lw, -1) if inv_i == 0 else pow_term(lw, -1 / inv_i, inv_i))
    if logu is not None:
        terms.append(sup_term(logu, -1))
    return terms


def _r_terms(logw: np.ndarray, r) -> list[Term]:
    r = float(_exact(r))
    return [pow_term(logw, r, 1 / r), pow_term(logw, 1, -1)]


def ap_constant(w, p, cubes: CubeFamily) -> ConstantEstimate:
    return estimate_blocks(cubes, log_blocks(cubes, _ap_terms(as_weight(w).log, p)))


def apq_constant(w, p, q, cubes: CubeFamily) -> ConstantEstimate:
    wv = _vector(w)
    return estimate_blocks(cubes, log_blocks(cubes, _class_terms(wv.logs(), p, q)))


def apqr_constant(w, p, q, r, cubes: CubeFamily) -> ConstantEstimate:
    wv = _vector(w)
    return estimate_blocks(cubes, log_blocks(cubes, _class_terms(wv.logs(), p, q, r)))


def partial_constant(w, u, p, q, cubes: CubeFamily, r=None) -> ConstantEstimate:
    """Partial-class constant; ``r⃗`` covers the ``m`` slots and the product."""
    wv = _vector(w)
    return estimate_blocks(cubes, log_blocks(cubes, _class_terms(wv.logs(), p, q, r, as_weight(u).log)))


def rh_constant(w, r, cubes: CubeFamily) -> ConstantEstimate:
    """``sup_Q ⟨w^r⟩^{1/r} / ⟨w⟩`` over the family."""
    return estimate_blocks(cubes, log_blocks(cubes, _r_terms(as_weight(w).log, r)))


# --------------------------------------------------------------------------
# reverse Hölder index


def _refined_family(cubes: CubeFamily, grid: Grid) -> CubeFamily:
    extra = grid.levels - cubes.grid.levels
    return CubeFamily(grid, cubes.lmin, cubes.lmax + extra, cubes.shifts)


def reverse_holder_index(w, cubes: CubeFamily, r_max=8.0, bisections: int = 20,
                         threshold: float = 0.10) -> tuple[float, float]:
    """Bracket the largest ``r`` whose RH constant is stable under one refinement.

    ``w`` is a Weight with a recipe or a callable ``grid -> Weight``.  An
    exponent is *inside* when the constant changes by less than
    ``threshold`` (relative) from ``N`` to ``2N``.
    """
    r_max = float(r_max)
    if not r_max > 1:
        raise ValueError("r_max must exceed 1")
    grid = cubes.grid
    fine = Grid(grid.d, grid.L, 2 * grid.N)
    fine_cubes = _refined_family(cubes, fine)
    make = w if callable(w) and not isinstance(w, GriddedFunction) else as_weight(w).resample
    coarse_w, fine_w = as_weight(make(grid)), as_weight(make(fine))

    def inside(r: float) -> bool:
        a = rh_constant(coarse_w, r, cubes).value
        b = rh_constant(fine_w, r, fine_cubes).value
        return abs(b / a - 1.0) < threshold

    if inside(r_max):
        return (r_max, r_max)
    lo, hi = 1.0, r_max
    for _ in range(bisections):
        mid = 0.5 * (lo + hi)
        if inside(mid):
            lo = mid
        else:
            hi = mid
    return (lo, hi)


# --------------------------------------------------------------------------
# power gate


@dataclass(frozen=True)
class GateResult:
    status: str
    condition: str

    def __str__(self):
        return f"{self.status}: {self.condition}"


def power_gate(d, p, q, a, b, shared: bool = True) -> GateResult:
    """Predict whether ``|x|^b`` lies in the partial class for ``u = |x - x_A|^{-a}``.

    ``shared`` means ``u`` is singular at the origin too.  Exact rationals
    throughout; floats are rationalised first.
    """
    d, p, q, a, b = (_exact(x) for x in (d, p, q, a, b))
    if not 0 < a < d:
        raise ExponentError(f"singularity exponent must lie in (0, d), got {fmt(a)}")
    if p is INF or p < 1:
        raise ExponentError("p must lie in [1, inf)")
    if q is INF or q <= 0:
        raise ExponentError("q must lie in (0, inf)")
    r_u = d / a
    lower = -d / q + a
    if not shared and q >= r_u:
        return GateResult("non-member", f"q = {fmt(q)} >= r_u = {fmt(r_u)}")
    if p == 1:
        upper, upper_open, upper_txt = Fraction(0), False, "0"
    else:
        upper, upper_open, upper_txt = d / conj(p), True, "d/p'"
    if b == lower:
        return GateResult("boundary", f"b = -d/q + d/r_u = {fmt(lower)}")
    if upper_open and b == upper:
        return GateResult("boundary", f"b = {upper_txt} = {fmt(upper)}")
    if b < lower:
        return GateResult("non-member", f"b < -d/q + d/r_u = {fmt(lower)}")
    if b > upper:
        return GateResult("non-member", f"b > {upper_txt} = {fmt(upper)}")
    close = "<" if upper_open else "<="
    return GateResult("member", f"{fmt(lower)} < b {close} {fmt(upper)}")


# --------------------------------------------------------------------------
# per-cube comparisons


def _slack(lhs: list[np.ndarray], rhs: list[np.ndarray], cubes: CubeFamily) -> tuple[float, dict]:
    """Smallest ``rhs/lhs - 1`` over all cubes, from log-space blocks."""
    best, where = math.inf, None
    for part, a, b in zip(cubes.partitions, lhs, rhs):
        diff = b - a
        i = int(np.argmin(diff))
        v = float(diff.reshape(-1)[i])
        if v < best:
            best, where = v, (part, np.unravel_index(i, part.block_shape))
    part, block = where
    cube = part.cube(tuple(int(x) for x in block), cubes.grid.cell_volume)
    return math.expm1(best), cube.describe()


def _deviation(lhs: list[np.ndarray], rhs: list[np.ndarray]) -> float:
    return max(float(np.max(np.abs(np.expm1(b - a)))) for a, b in zip(lhs, rhs))


def _scaled(blocks: list[np.ndarray], c) -> list[np.ndarray]:
    c = float(c)
    return [c * x for x in blocks]


def _sum(*block_lists) -> list[np.ndarray]:
    return [np.add.reduce(list(xs)) for xs in zip(*block_lists)]


def _record(report: InequalityReport, name: str, lhs, rhs, cubes, diagnostic: bool = False) -> bool:
    slack, at = _slack(lhs, rhs, cubes)
    ok = slack >= -SLACK_TOL
    report.add(name, slack, argmax=at, holds=ok, diagnostic=diagnostic,
               lhs=math.exp(max(float(x.max()) for x in lhs)),
               rhs=math.exp(max(float(x.max()) for x in rhs)))
    return ok or diagnostic


# --------------------------------------------------------------------------
# factorization


def factorization_check(u, mu, w, p, p0, r, r0, case: str, cubes: CubeFamily) -> InequalityReport:
    """Per-cube check of the factorization bound for the composite weight."""
    fe = factorization_exponents(*(_exact(x) for x in (p, p0, r, r0)))
    if fe.case != case:
        raise ExponentError(f"exponents fall in case {fe.case!r}, not {case!r}")
    if not fe.balanced:
        raise ExponentError("factorization needs 1/p - 1/p0 = 1/r - 1/r0")
    u, mu, w = as_weight(u), as_weight(mu), as_weight(w)
    gamma = fe.gamma
    comp = Weight(w.grid, log=float(fe.mu_exp) * mu.log + float(fe.w_exp) * w.log)
    if case in ("i", "iii"):
        factor_log, factor_q = float(gamma) * mu.log - u.log, 1 / gamma
    else:
        factor_log, factor_q = mu.log - u.log, Fraction(1)
    lhs = log_blocks(cubes, _class_terms([comp.log], [p0], r0, logu=u.log))
    factor = log_blocks(cubes, _class_terms([factor_log], [1], factor_q, logu=u.log))
    wclass = log_blocks(cubes, _class_terms([w.log], [p], r, logu=u.log))
    rhs = _sum(_scaled(factor, fe.factor_exp), _scaled(wclass, fe.w_bound_exp))
    report = InequalityReport("factorization", "pass",
                              params={"p": fmt(_exact(p)), "p0": fmt(_exact(p0)), "r": fmt(_exact(r)),
                                      "r0": fmt(_exact(r0)), "case": case},
                              grid={"d": cubes.grid.d, "L": cubes.grid.L, "N": cubes.grid.N},
                              cube_family=cubes.descriptor())
    report.add("gamma", fmt(gamma))
    report.add("composite_exponents", [fmt(fe.mu_exp), fmt(fe.w_exp)])
    report.add("bound_exponents", [fmt(fe.factor_exp), fmt(fe.w_bound_exp)])
    report.add("composite_constant", estimate_blocks(cubes, lhs))
    report.add("factor_constant", estimate_blocks(cubes, factor))
    report.add("w_constant", estimate_blocks(cubes, wclass))
    if not _record(report, "per_cube_bound", lhs, rhs, cubes):
        report.verdict = "fail"
    return report


# --------------------------------------------------------------------------
# characterization and duality


def _dual_blocks(wv: WeightVector, p, q, i: int, cubes: CubeFamily, u: Weight | None):
    """Log blocks of the original constant and of the ``i``-th dual vector."""
    p = [_exact(x) for x in p]
    q = _exact(q)
    pi = p[i - 1]
    if pi is INF or pi <= 1:
        raise ExponentError("dual slot needs 1 < p_i < inf")
    if q is not INF and q < 1:
        raise ExponentError("duality needs q >= 1")
    logs = wv.logs()
    logu = None if u is None else u.log
    new_slot = -wv.log_product if u is None else -(wv.log_product + u.log)
    dual_logs = list(logs)
    dual_logs[i - 1] = new_slot
    dual_p = list(p)
    dual_p[i - 1] = conj(q)
    orig = log_blocks(cubes, _class_terms(logs, p, q, logu=logu))
    dual = log_blocks(cubes, _class_terms(dual_logs, dual_p, conj(pi), logu=logu))
    return orig, dual


def duality_check(w, p, q, i: int, cubes: CubeFamily, u=None) -> InequalityReport:
    """Compare the constant of ``w⃗`` with that of its ``i``-th dual (1-based)."""
    wv = _vector(w)
    u = None if u is None else as_weight(u)
    orig, dual = _dual_blocks(wv, p, q, i, cubes, u)
    a, b = estimate_blocks(cubes, orig), estimate_blocks(cubes, dual)
    rel = abs(b.value - a.value) / a.value
    report = InequalityReport("duality", "pass" if rel <= 1e-12 else "fail",
                              params={"i": i, "partial": u is not None},
                              cube_family=cubes.descriptor())
    report.add("constant", a)
    report.add("dual_constant", b)
    report.add("relative_deviation", rel)
    report.add("per_cube_deviation", _deviation(orig, dual))
    return report


def characterization_check(w, p, q, cubes: CubeFamily, u=None) -> InequalityReport:
    """Component and product characterization, evaluated on one cube family.

    Each inequality is recorded with its smallest per-cube relative slack.
    With ``u`` the partial weight becomes an extra slot whose component is
    ``u^{-1}``; the literal converse with that slot is recorded as a
    diagnostic only.
    """
    wv = _vector(w)
    u = None if u is None else as_weight(u)
    p = [_exact(x) for x in p]
    q = _exact(q)
    m = wv.m
    idx = characterization_indices(p, q, partial=u is not None)
    logu = None if u is None else u.log
    main = log_blocks(cubes, _class_terms(wv.logs(), p, q, logu=logu))
    slot_logs = list(wv.logs()) + ([u.log] if u is not None else [])
    slot_p = list(p) + ([INF] if u is not None else [])
    logprod = wv.log_product if u is None else wv.log_product + u.log

    report = InequalityReport("characterization", "pass",
                              params={"p": [fmt(x) for x in p], "q": fmt(q), "partial": u is not None},
                              grid={"d": cubes.grid.d, "L": cubes.grid.L, "N": cubes.grid.N},
                              cube_family=cubes.descriptor())
    report.add("constant", estimate_blocks(cubes, main))
    ok = True
    skipped = []
    slot_blocks = {}
    for k, (lw, pk, s) in enumerate(zip(slot_logs, slot_p, idx.slot_index), start=1):
        name = f"slot_{k}" if k <= m else "partial_slot"
        if pk == 1:
            a = idx.a1_power
            lhs = log_blocks(cubes, _ap_terms(float(a) * lw, 1))
            ok &= _record(report, name, lhs, _scaled(main, a), cubes)
            continue
        if s is None or not s > 1:
            skipped.append(name)
            continue
        pc = conj(pk)
        lhs = log_blocks(cubes, _ap_terms(-float(pc) * lw, s))
        slot_blocks[k] = (lhs, pc)
        ok &= _record(report, name, lhs, _scaled(main, pc), cubes)
    prod_blocks = None
    if q is INF:
        inv = len(slot_p) - sum((recip(x) for x in slot_p), Fraction(0))
        if inv > 0:
            lhs = log_blocks(cubes, _ap_terms(-float(1 / inv) * logprod, 1))
            ok &= _record(report, "product_a1", lhs, _scaled(main, 1 / inv), cubes)
    elif idx.product_index is not None and idx.product_index > 1:
        prod_blocks = log_blocks(cubes, _ap_terms(float(q) * logprod, idx.product_index))
        ok &= _record(report, "product", prod_blocks, _scaled(main, q), cubes)
    else:
        skipped.append("product")

    # converse: every slot and the product must carry a proper A_s index
    if prod_blocks is not None and len(slot_blocks) == len(slot_logs):
        parts = [_scaled(prod_blocks, 1 / q)] + [_scaled(b, 1 / pc) for b, pc in slot_blocks.values()]
        rhs = _sum(*parts)
        if u is None:
            ok &= _record(report, "converse", main, rhs, cubes)
        else:
            # classical form: the u-slot enters through its average, not its bound
            classical = log_blocks(cubes, _class_terms(slot_logs, slot_p, q))
            ok &= _record(report, "converse", classical, rhs, cubes)
            _record(report, "converse_partial_literal", main, rhs, cubes, diagnostic=True)
    else:
        skipped.append("converse")

    dual_slots = [i for i, x in enumerate(p, start=1) if x is not INF and x > 1]
    if q is INF or q >= 1:
        for i in dual_slots:
            orig, dual = _dual_blocks(wv, p, q, i, cubes, u)
            dev = _deviation(orig, dual)
            report.add(f"duality_{i}", dev, holds=dev <= 1e-12)
            ok &= dev <= 1e-12
    report.add("skipped", skipped)
    report.add("flags", list(idx.flags))
    if not ok:
        report.verdict = "fail"
    return report


# --------------------------------------------------------------------------
# majorant construction


def construct_majorant(U: GriddedFunction, u2, beta1, beta2, alpha, s2, eps0,
                       cubes: CubeFamily | None = None, q2=None) -> Weight:
    """``u_1 = M(U^θ)^{1/θ} · M(u_2^{s_2-ε_0})^{1/(s_2-ε_0)}`` with ``θ = d/(β_2-β_1) - ε_0``.

    When ``β_2 = α`` the second factor is dropped (``u_2`` may be None).
    ``q2``, if given, tightens the window to ``ε_0 < d/(β_2-β_1) - q_2``.
    """
    grid = U.grid
    d = Fraction(grid.d)
    beta1, beta2, alpha, eps0 = (_exact(x) for x in (beta1, beta2, alpha, eps0))
    if not 0 <= beta1 < beta2 <= alpha < d:
        raise ExponentError("need 0 <= beta1 < beta2 <= alpha < d")
    if np.any(U.values < 0):
        raise ValueError("U must be nonnegative")
    if not np.any(U.values > 0):
        raise ValueError("U vanishes identically")
    crit = d / (beta2 - beta1)
    theta = crit - eps0
    upper = crit - 1 if q2 is None else min(crit - 1, crit - _exact(q2))
    if not 0 < eps0 < upper:
        raise ExponentError(f"eps0 must lie in (0, {fmt(upper)})")
    cubes = cubes or CubeFamily(grid)
    u = fractional_maximal(U, 0, float(theta), cubes)
    log_u = np.log(u.values)
    if beta2 != alpha:
        if u2 is None:
            raise ValueError("u2 is required when beta2 < alpha")
        s = _exact(s2) - eps0
        if s < 1:
            raise ExponentError("need s2 - eps0 >= 1")
        u2 = as_weight(u2)
        log_u = log_u + np.log(fractional_maximal(u2, 0, float(s), cubes).values)
    return Weight(grid, log=log_u)
