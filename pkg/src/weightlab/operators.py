"""Maximal functions, Riesz potentials, commutators and the Rubio de Francia series."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .grid import CubeFamily, GriddedFunction, Grid, block_reduce, broadcast
from .norms import _exp, lebesgue_norm, lorentz_norm

__all__ = [
    "KernelBudgetError",
    "fractional_maximal",
    "multilinear_fractional_maximal",
    "fractional_integral",
    "commutator",
    "truncated_commutator_sup",
    "truncated_integrals",
    "modified_maximal",
    "RdfResult",
    "rdf_iterate",
    "domination_gap",
    "gradient_magnitude",
    "default_eps",
]

SPHERE_AREA = {1: 2.0, 2: 2.0 * math.pi, 3: 4.0 * math.pi}
BLOCK = 256


class KernelBudgetError(ValueError):
    """The requested dense kernel evaluation exceeds the configured budget."""


# --------------------------------------------------------------------------
# maximal functions


def _product_sup(arrays: Sequence[np.ndarray], alpha: float, cubes: CubeFamily) -> np.ndarray:
    """Per cell: max over family cubes containing it of ``|Q|^{α/d} Π ⟨a_i⟩_Q``."""
    grid = cubes.grid
    out = np.full(grid.shape, -np.inf)
    for part in cubes.partitions:
        counts = part.cell_counts()
        prod = None
        for a in arrays:
            mean = block_reduce(a, part) / counts
            prod = mean if prod is None else prod * mean
        if alpha:
            prod = (counts * grid.cell_volume) ** (alpha / grid.d) * prod
        np.maximum(out, broadcast(prod, part), out=out)
    return out


def fractional_maximal(f: GriddedFunction, alpha=0.0, s=1.0, cubes: CubeFamily | None = None) -> GriddedFunction:
    """``(M_α |f|^s)^{1/s}`` over the family; ``α = 0, s = 1`` is the maximal function."""
    alpha, s = _exp(alpha), _exp(s)
    cubes = cubes or CubeFamily(f.grid)
    if not 0 <= alpha < f.grid.d:
        raise ValueError(f"alpha must lie in [0, d), got {alpha}")
    if s < 1:
        raise ValueError(f"s must be >= 1, got {s}")
    a = np.abs(f.values)
    if s != 1:
        a = a ** s
    m = _product_sup([a], alpha, cubes)
    return GriddedFunction(f.grid, m if s == 1 else m ** (1.0 / s))


def multilinear_fractional_maximal(fs: Sequence[GriddedFunction], alpha=0.0,
                                   cubes: CubeFamily | None = None) -> GriddedFunction:
    if not fs:
        raise ValueError("need at least one function")
    grid = fs[0].grid
    if any(f.grid != grid for f in fs):
        raise ValueError("all functions must share one grid")
    alpha = _exp(alpha)
    if not 0 <= alpha < len(fs) * grid.d:
        raise ValueError(f"alpha must lie in [0, m d), got {alpha}")
    cubes = cubes or CubeFamily(grid)
    return GriddedFunction(grid, _product_sup([np.abs(f.values) for f in fs], alpha, cubes))


def modified_maximal(f: GriddedFunction, u: GriddedFunction, gamma, cubes: CubeFamily | None = None) -> GriddedFunction:
    """``u^{1/γ} sup_{Q∋x} ⟨f⟩_Q ⟨u^{-1/γ}⟩_Q``."""
    gamma = _exp(gamma)
    if not 0 < gamma <= 1:
        raise ValueError(f"gamma must lie in (0, 1], got {gamma}")
    cubes = cubes or CubeFamily(f.grid)
    uinv = u.values ** (-1.0 / gamma)
    sup = _product_sup([np.abs(f.values), uinv], 0.0, cubes)
    return GriddedFunction(f.grid, u.values ** (1.0 / gamma) * sup)


# --------------------------------------------------------------------------
# Riesz potential


def _check_budget(grid: Grid):
    limit = 2 ** 13 if grid.d == 1 else 2 ** 14
    if grid.size > limit:
        raise KernelBudgetError(f"dense kernel on {grid.size} cells exceeds the budget of {limit} cells")


def _index_coords(grid: Grid) -> np.ndarray:
    idx = np.indices(grid.shape).reshape(grid.d, -1).T
    return idx.astype(np.int64)


def _kernel_table(grid: Grid, alpha: float) -> np.ndarray:
    """Kernel weight per absolute index offset, self term at offset zero."""
    h, d = grid.h, grid.d
    off = np.indices((grid.N,) * d).astype(float)
    dist = np.sqrt((off ** 2).sum(axis=0)) * h
    with np.errstate(divide="ignore"):
        table = dist ** (alpha - d) * grid.cell_volume
    ball = {1: 2.0, 2: math.pi, 3: 4.0 * math.pi / 3.0}[d]
    rho = (grid.cell_volume / ball) ** (1.0 / d)
    table[(0,) * d] = SPHERE_AREA[d] / alpha * rho ** alpha
    return table


def _kernel_rows(grid: Grid, table: np.ndarray, coords: np.ndarray, rows: slice):
    diff = np.abs(coords[rows, None, :] - coords[None, :, :])
    K = table[tuple(diff[..., a] for a in range(grid.d))]
    d2 = (diff ** 2).sum(axis=-1)
    return K, d2


def _apply_kernel(grid: Grid, alpha: float, columns: np.ndarray) -> np.ndarray:
    """``columns`` has shape (cells, k) in C order; returns the same shape."""
    _check_budget(grid)
    table = _kernel_table(grid, alpha)
    coords = _index_coords(grid)
    n = grid.size
    out = np.empty_like(columns)
    for start in range(0, n, BLOCK):
        rows = slice(start, min(n, start + BLOCK))
        K, _ = _kernel_rows(grid, table, coords, rows)
        out[rows] = K @ columns
    return out


def fractional_integral(f: GriddedFunction, alpha) -> GriddedFunction:
    """``I_α f`` by a dense sum over cells with an exact self-cell term."""
    alpha = _exp(alpha)
    if not 0 < alpha < f.grid.d:
        raise ValueError(f"alpha must lie in (0, d), got {alpha}")
    col = f.values.reshape(-1, 1)
    return GriddedFunction(f.grid, _apply_kernel(f.grid, alpha, col).reshape(f.grid.shape))


def commutator(b: GriddedFunction, f: GriddedFunction, alpha) -> GriddedFunction:
    """``b I_α f - I_α(b f)`` from one kernel pass over both inputs."""
    alpha = _exp(alpha)
    if not 0 < alpha < f.grid.d:
        raise ValueError(f"alpha must lie in (0, d), got {alpha}")
    cols = np.stack([f.values.reshape(-1), (b.values * f.values).reshape(-1)], axis=1)
    res = _apply_kernel(f.grid, alpha, cols)
    out = b.values.reshape(-1) * res[:, 0] - res[:, 1]
    return GriddedFunction(f.grid, out.reshape(f.grid.shape))


def default_eps(grid: Grid) -> tuple[float, ...]:
    return tuple(2.0 ** j * grid.h for j in range(grid.levels, -1, -1))


def _box_mean(values: np.ndarray, radius: int) -> np.ndarray:
    """Mean over the clipped box of half-width ``radius`` cells around each cell."""
    total, count = values, np.ones_like(values)
    for ax in range(values.ndim):
        total = _window_sum(total, radius, ax)
        count = _window_sum(count, radius, ax)
    return total / count


def _window_sum(a: np.ndarray, r: int, axis: int) -> np.ndarray:
    a = np.moveaxis(a, axis, 0)
    n = a.shape[0]
    c = np.concatenate([np.zeros((1,) + a.shape[1:]), np.cumsum(a, axis=0)], axis=0)
    i = np.arange(n)
    hi = np.minimum(n, i + r + 1)
    lo = np.maximum(0, i - r)
    return np.moveaxis(c[hi] - c[lo], 0, axis)


def truncated_integrals(f: GriddedFunction, alpha, eps: Sequence[float]) -> np.ndarray:
    """``∫_{|x-y|>ε} f(y)|x-y|^{α-d} dy`` per ε; shape ``(len(eps),) + grid.shape``."""
    grid = f.grid
    _check_budget(grid)
    alpha = _exp(alpha)
    table = _kernel_table(grid, alpha)
    coords = _index_coords(grid)
    thresholds = [(e / grid.h) ** 2 for e in eps]
    col = f.values.reshape(-1)
    n = grid.size
    out = np.empty((len(eps), n))
    for start in range(0, n, BLOCK):
        rows = slice(start, min(n, start + BLOCK))
        K, d2 = _kernel_rows(grid, table, coords, rows)
        for k, thr in enumerate(thresholds):
            out[k, rows] = np.where(d2 > thr, K, 0.0) @ col
    return out.reshape((len(eps),) + grid.shape)


def truncated_commutator_sup(b: GriddedFunction, f: GriddedFunction, alpha,
                             eps_set: Sequence[float] | None = None,
                             per_eps: bool = False):
    """``max_ε |b(x) - ⟨b⟩_{Q(x,ε)}| · |∫_{|x-y|>ε} f(y)|x-y|^{α-d} dy|``.

    ``Q(x, ε)`` is the clipped box of cells within ``ε`` of ``x`` in the
    max-norm.  With ``per_eps`` the per-radius values are returned too.
    """
    grid = f.grid
    eps = tuple(eps_set) if eps_set is not None else default_eps(grid)
    if not eps:
        raise ValueError("empty eps set")
    if min(eps) < grid.h * (1 - 1e-12):
        raise ValueError("truncation radii must be at least one cell width")
    tails = truncated_integrals(f, alpha, eps)
    vals = np.empty_like(tails)
    for k, e in enumerate(eps):
        centred = b.values - _box_mean(b.values, int(math.floor(e / grid.h + 1e-9)))
        vals[k] = np.abs(centred) * np.abs(tails[k])
    out = GriddedFunction(grid, vals.max(axis=0))
    return (out, vals) if per_eps else out


def gradient_magnitude(f: GriddedFunction) -> GriddedFunction:
    """Euclidean norm of the centred-difference gradient."""
    if f.grid.d == 1:
        g = np.gradient(f.values, f.grid.h)
        return GriddedFunction(f.grid, np.abs(g))
    parts = np.gradient(f.values, f.grid.h)
    return GriddedFunction(f.grid, np.sqrt(sum(p ** 2 for p in parts)))


# --------------------------------------------------------------------------
# Rubio de Francia


@dataclass(frozen=True)
class RdfResult:
    """Truncated Rubio de Francia series and the numbers it was built from."""

    function: GriddedFunction
    norm_estimate: float
    denominator: float
    probe_ratios: tuple[float, ...]
    norm_f: float
    tail_bound: float
    terms: int


def rdf_iterate(f: GriddedFunction, u: GriddedFunction, gamma, t, w: GriddedFunction,
                K: int = 30, cubes: CubeFamily | None = None,
                probes: Sequence[GriddedFunction] | None = None) -> RdfResult:
    """``Σ_{k<K} M_{u,γ}^k f / (2‖M_{u,γ}‖)^k`` on ``L^{tγ}(w^t)``.

    The operator norm is taken as twice the largest probe ratio.
    """
    gamma, t = _exp(gamma), _exp(t)
    if gamma > 1:
        raise ValueError("gamma > 1: use gamma = 1")
    cubes = cubes or CubeFamily(f.grid)
    if probes is None:
        from .probes import probe_family
        probes = [abs(g) for g in probe_family(f.grid)]
    exponent = t * gamma
    sigma = GriddedFunction(f.grid, w.values ** t)

    def norm(g):
        return lebesgue_norm(g, exponent, sigma)

    ratios = []
    for g in probes:
        ng = norm(g)
        if ng == 0:
            continue
        ratios.append(norm(modified_maximal(g, u, gamma, cubes)) / ng)
    if not ratios:
        raise ValueError("probe family is degenerate (all norms vanish)")
    norm_est = 2.0 * max(ratios)
    denom = 2.0 * norm_est
    total = np.array(f.values, dtype=float)
    term = f
    scale = 1.0
    for _ in range(1, K):
        term = modified_maximal(term, u, gamma, cubes)
        scale /= denom
        total = total + scale * term.values
    nf = norm(f)
    return RdfResult(GriddedFunction(f.grid, total), norm_est, denom, tuple(ratios), nf,
                     2.0 ** (-K) * nf, K)


# --------------------------------------------------------------------------
# domination


def domination_gap(f: GriddedFunction, u: GriddedFunction, alpha, beta,
                   cubes: CubeFamily | None = None) -> GriddedFunction:
    """``‖u‖_{L^{d/(α-β),1}} M_{β,2}(f, u^{-1}) - M_α f`` cell-wise."""
    alpha, beta = _exp(alpha), _exp(beta)
    d = f.grid.d
    if not 0 <= beta < alpha < d:
        raise ValueError("need 0 <= beta < alpha < d")
    cubes = cubes or CubeFamily(f.grid)
    if not np.all(np.isfinite(u.values)) or np.max(u.values) > 1e150:
        raise OverflowError("weight too large for a finite Lorentz norm")
    lor = lorentz_norm(u, d / (alpha - beta), 1)
    if not math.isfinite(lor):
        raise OverflowError("Lorentz norm of u is not finite")
    lhs = _product_sup([np.abs(f.values)], alpha, cubes)
    rhs = _product_sup([np.abs(f.values), 1.0 / u.values], beta, cubes)
    return GriddedFunction(f.grid, lor * rhs - lhs)
