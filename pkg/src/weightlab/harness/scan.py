"""Ratio scans over probe families, growth-rate fits and the good-λ measurement."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable, Mapping, Sequence

import numpy as np

from ..exponents import ExponentError
from ..grid import CubeFamily, Grid, GriddedFunction
from ..norms import _exp, bmo_norm
from ..operators import fractional_integral, fractional_maximal, truncated_commutator_sup
from ..probes import DEFAULT_SEED, probe_family, probe_names
from ..reports import ScanTable

__all__ = [
    "ratio_scan",
    "probe_dict",
    "as_grid",
    "sharpness_scan",
    "fit_power",
    "fit_log",
    "power_sharpness_quantity",
    "graded_integral",
    "GoodLambda",
    "good_lambda_measure",
    "good_lambda_check",
    "upsample",
]

Recipe = Callable[[Grid], GriddedFunction]


def as_grid(entry, d: int = 1) -> Grid:
    if isinstance(entry, Grid):
        return entry
    L, N = entry
    return Grid(d, L, int(N))


def probe_dict(seed: int = DEFAULT_SEED) -> Callable[[Grid], dict[str, GriddedFunction]]:
    """The standard eight-member probe family as a ``grid -> {name: probe}`` recipe."""
    def family(grid: Grid) -> dict[str, GriddedFunction]:
        return dict(zip(probe_names(), probe_family(grid, seed)))
    return family


# --------------------------------------------------------------------------
# ratio scans


def ratio_scan(lhs: Callable[[GriddedFunction, Any], float],
               rhs: Callable[[GriddedFunction, Any], float],
               schedule: Sequence,
               family: Callable[[Grid], Mapping[str, GriddedFunction]] | None = None,
               d: int = 1,
               setup: Callable[[Grid], Any] | None = None,
               name: str = "ratios",
               workers: int = 1) -> ScanTable:
    """Largest ``lhs/rhs`` over the family at every schedule entry.

    ``schedule`` holds ``(L, N)`` pairs or grids.  ``setup(grid)`` builds
    whatever the two sides share on a grid (weights, cube family) and is
    passed to them as the second argument.  Probes with ``rhs == 0`` are
    rejected and listed in ``meta["rejected"]``.
    """
    if not schedule:
        raise ValueError("empty schedule")
    family = family or probe_dict()
    rows, per_probe, rejected = [], [], []
    names: list[str] | None = None
    for entry in schedule:
        grid = as_grid(entry, d)
        probes = dict(family(grid))
        if not probes:
            raise ValueError("empty probe family")
        if names is None:
            names = list(probes)
        ctx = setup(grid) if setup is not None else None

        def one(item):
            pname, f = item
            return pname, float(lhs(f, ctx)), float(rhs(f, ctx))

        items = list(probes.items())
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                evaluated = list(pool.map(one, items))
        else:
            evaluated = [one(it) for it in items]
        ratios = {}
        for pname, a, b in evaluated:
            if b == 0:
                rejected.append([grid.L, grid.N, pname])
                continue
            ratios[pname] = a / b
        if not ratios:
            raise ValueError(f"every probe has a vanishing right-hand side on L={grid.L}, N={grid.N}")
        worst = max(ratios, key=lambda k: (ratios[k], -names.index(k)))
        rows.append((grid.L, grid.N, ratios[worst], worst, sum(1 for r in rejected if r[:2] == [grid.L, grid.N])))
        per_probe.append([ratios.get(k) for k in names])
    return ScanTable(name, ("L", "N", "max_ratio", "worst_probe", "rejected"), rows,
                     {"probes": names, "ratios": per_probe, "rejected": rejected})


# --------------------------------------------------------------------------
# growth fits


def fit_power(r: Sequence[float], v: Sequence[float]) -> dict:
    """Least squares ``log v = c + k log r``; residual is the relative RMS in ``v``."""
    lr, lv = np.log(np.asarray(r, float)), np.log(np.asarray(v, float))
    k, c = np.polyfit(lr, lv, 1)
    pred = np.exp(c + k * lr)
    res = float(np.sqrt(np.mean(((pred - np.exp(lv)) / np.exp(lv)) ** 2)))
    return {"exponent": float(k), "intercept": float(c), "residual": res}


def fit_log(r: Sequence[float], v: Sequence[float]) -> dict:
    """Least squares ``v = A + B log r``; residual is the relative RMS in ``v``."""
    lr, vv = np.log(np.asarray(r, float)), np.asarray(v, float)
    B, A = np.polyfit(lr, vv, 1)
    pred = A + B * lr
    res = float(np.sqrt(np.mean(((pred - vv) / vv) ** 2)))
    return {"slope": float(B), "intercept": float(A), "residual": res}


def sharpness_scan(quantity: Callable[[float], float], radii: Sequence[float], model: str = "power",
                   predicted: float | None = None, name: str = "sharpness") -> ScanTable:
    """Evaluate ``quantity(r)`` on increasing radii and fit both growth models.

    ``meta`` records both fits, the requested ``model``, the predicted
    exponent (if any) and whether the data are monotone.
    """
    if model not in ("power", "log"):
        raise ValueError("model must be 'power' or 'log'")
    radii = [float(r) for r in radii]
    if len(radii) < 2 or any(b <= a for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be increasing with at least two entries")
    values = [float(quantity(r)) for r in radii]
    if not all(math.isfinite(v) and v > 0 for v in values):
        raise ValueError("quantity must be finite and positive")
    diffs = np.diff(values)
    monotone = bool(np.all(diffs >= 0) or np.all(diffs <= 0))
    meta = {"model": model, "power": fit_power(radii, values), "log": fit_log(radii, values),
            "monotone": monotone, "predicted": predicted}
    return ScanTable(name, ("r", "value"), list(zip(radii, values)), meta)


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


def graded_integral(fn: Callable[[np.ndarray], np.ndarray], lo: float, hi: float, depth: int = 60) -> float:
    """Integral over ``[lo, hi]`` with geometric grading toward both ends.

    Integrable endpoint singularities of power type converge geometrically
    in ``depth``.
    """
    if hi <= lo:
        return 0.0
    mid = 0.5 * (lo + hi)
    half = mid - lo
    # breakpoints lo + half*2^-k and hi - half*2^-k
    ks = 2.0 ** -np.arange(depth + 1)
    left = np.concatenate(([lo], lo + half * ks[::-1]))
    right = np.concatenate((hi - half * ks, [hi]))
    edges = np.unique(np.concatenate((left, right)))
    a, b = edges[:-1], edges[1:]
    # grading stops at float resolution; the dropped slivers are negligible
    keep = (b - a) > 64 * np.finfo(float).eps * np.maximum(np.abs(a), np.abs(b))
    a, b = a[keep], b[keep]
    c, w = 0.5 * (a + b), 0.5 * (b - a)
    x = c[:, None] + w[:, None] * _GL_NODES[None, :]
    return float(np.sum(w[:, None] * _GL_WEIGHTS[None, :] * fn(x)))


def power_sharpness_quantity(p, q, a, b, x_A: float = 0.25) -> Callable[[float], float]:
    """Normalised class quantity for ``|x|^b`` against ``u = |x - x_A|^{-a}`` on ``[-r, r]``.

    Returns ``r -> ⟨u^q |x|^{bq}⟩ ⟨u⟩^{-q} ⟨|x|^{-bp'}⟩^{q/p'}``, the q-th
    power of the per-cube class expression with the sup of ``u^{-1}``
    replaced by ``⟨u⟩^{-1}`` (equivalent for ``u`` in ``A_1``).  One
    dimension; all integrals by graded Gauss-Legendre quadrature.
    """
    p, q, a, b = (_exp(x) for x in (p, q, a, b))
    if not 1 < p < math.inf:
        raise ExponentError("sharpness quantity needs 1 < p < inf")
    pc = p / (p - 1)
    if x_A == 0:
        raise ValueError("x_A must be nonzero")

    def integral(fn, r):
        pts = sorted({-r, 0.0, x_A, r})
        return sum(graded_integral(fn, lo, hi) for lo, hi in zip(pts, pts[1:]))

    def quantity(r: float) -> float:
        if r <= abs(x_A):
            raise ValueError("r must exceed |x_A|")
        vol = 2.0 * r
        top = integral(lambda x: np.abs(x - x_A) ** (-a * q) * np.abs(x) ** (b * q), r) / vol
        mean_u = integral(lambda x: np.abs(x - x_A) ** (-a), r) / vol
        dual = integral(lambda x: np.abs(x) ** (-b * pc), r) / vol
        return top / mean_u ** q * dual ** (q / pc)

    return quantity


# --------------------------------------------------------------------------
# good-λ


def upsample(f: GriddedFunction, grid: Grid) -> GriddedFunction:
    """Piecewise-constant transfer to a grid refined by a power of two."""
    if grid.d != f.grid.d or grid.L != f.grid.L or grid.N % f.grid.N:
        raise ValueError("target grid must refine the source grid")
    k = grid.N // f.grid.N
    v = f.values
    for ax in range(grid.d):
        v = np.repeat(v, k, axis=ax)
    return GriddedFunction(grid, v)


@dataclass(frozen=True)
class GoodLambda:
    """Set measurements on one grid."""

    lambdas: tuple[float, ...]
    lhs: tuple[float, ...]
    rhs: tuple[float, ...]
    constant: float
    bmo: float
    control_max: float
    c_max: float
    all_rhs_zero: bool

    def table(self, name: str) -> ScanTable:
        rows = [(lam, a, b) for lam, a, b in zip(self.lambdas, self.lhs, self.rhs)]
        return ScanTable(name, ("lambda", "lhs_measure", "rhs_measure"), rows,
                         {"constant": self.constant, "bmo": self.bmo, "all_rhs_zero": self.all_rhs_zero})


def _good_lambda_fields(b: GriddedFunction, f: GriddedFunction, alpha, s, cubes: CubeFamily | None):
    grid = f.grid
    alpha_f, s_f = _exp(alpha), _exp(s)
    if not 1 < s_f < grid.d / alpha_f:
        raise ExponentError(f"need 1 < s < d/alpha, got s={s_f}")
    cubes = cubes or CubeFamily(grid)
    if np.ptp(b.values) == 0:
        cvals = np.zeros(grid.shape)
    else:
        cvals = truncated_commutator_sup(b, f, alpha_f).values
    absf = GriddedFunction(grid, np.abs(f.values))
    bmo = float(bmo_norm(b, cubes).value)
    control = bmo * (fractional_integral(absf, alpha_f).values
                     + fractional_maximal(f, alpha_f, s_f, cubes).values)
    return cvals, control, bmo


def _good_lambda_count(fields, vol: float, gamma1: float, gamma2: float, lambdas) -> GoodLambda:
    cvals, control, bmo = fields
    lhs, rhs = [], []
    for lam in lambdas:
        big = cvals > gamma2 * lam
        lhs.append(float(np.count_nonzero(big & (control <= gamma1 * lam))) * vol)
        rhs.append(float(np.count_nonzero(cvals > lam)) * vol)
    ratios = [a / (gamma1 * r) for a, r in zip(lhs, rhs) if r > 0]
    zero = not np.any(cvals > 0)
    constant = max(ratios) if ratios else 0.0
    return GoodLambda(tuple(float(x) for x in lambdas), tuple(lhs), tuple(rhs), float(constant), bmo,
                      float(control.max()), float(cvals.max()), bool(not ratios and not zero))


def _check_gammas(gamma1: float, gamma2: float):
    if not gamma2 > 1 or not gamma1 > 0:
        raise ValueError("need gamma1 > 0 and gamma2 > 1")


def good_lambda_measure(b: GriddedFunction, f: GriddedFunction, alpha, s, gamma1: float, gamma2: float,
                        lambdas: Sequence[float], cubes: CubeFamily | None = None) -> GoodLambda:
    """Measure both sides of the good-λ inequality by counting cells.

    ``lhs(λ) = |{C > γ₂λ, ‖b‖_BMO (I_α|f| + M_{α,s} f) ≤ γ₁λ}|`` and
    ``rhs(λ) = |{C > λ}|``; the fitted constant is the largest
    ``lhs/(γ₁ rhs)`` over λ with ``rhs > 0``.  A symbol with no oscillation
    gives ``C ≡ 0`` exactly.
    """
    _check_gammas(gamma1, gamma2)
    fields = _good_lambda_fields(b, f, alpha, s, cubes)
    return _good_lambda_count(fields, f.grid.cell_volume, gamma1, gamma2, lambdas)


def default_lambdas(c_max: float, count: int = 41) -> tuple[float, ...]:
    if c_max <= 0:
        return (1.0,)
    return tuple(float(x) for x in np.geomspace(c_max * 1e-3, c_max, count))


def good_lambda_check(b, f, alpha, s, gamma1: float, gamma2: float, lambdas: Sequence[float] | None = None,
                      grid: Grid | None = None) -> dict:
    """Good-λ measurement on a grid and on its refinement by one doubling.

    ``b`` and ``f`` are gridded functions (transferred to the fine grid by
    :func:`upsample`) or recipes ``grid -> GriddedFunction`` (sampled on
    both grids, ``grid`` required).  The λ grid defaults to 41 geometric
    points spanning three decades below the coarse maximum of ``C(b, f)``
    and is shared by both grids.
    """
    if callable(b) and not isinstance(b, GriddedFunction):
        if grid is None:
            raise ValueError("recipes need a grid")
        coarse = grid
        fine = Grid(grid.d, grid.L, 2 * grid.N)
        b0, f0, b1, f1 = b(coarse), f(coarse), b(fine), f(fine)
    else:
        coarse = f.grid
        fine = Grid(coarse.d, coarse.L, 2 * coarse.N)
        b0, f0 = b, f
        b1, f1 = upsample(b, fine), upsample(f, fine)
    _check_gammas(gamma1, gamma2)
    fields0 = _good_lambda_fields(b0, f0, alpha, s, None)
    if lambdas is None:
        lambdas = default_lambdas(float(fields0[0].max()))
    lambdas = tuple(float(x) for x in lambdas)
    m0 = _good_lambda_count(fields0, coarse.cell_volume, gamma1, gamma2, lambdas)
    fields1 = _good_lambda_fields(b1, f1, alpha, s, None)
    m1 = _good_lambda_count(fields1, fine.cell_volume, gamma1, gamma2, lambdas)
    return {"coarse": m0, "fine": m1, "grids": (coarse, fine), "lambdas": lambdas,
            "constants": (m0.constant, m1.constant)}
