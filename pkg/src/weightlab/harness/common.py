"""Small helpers shared by the scenario modules."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Any, Callable, Mapping, Sequence

import numpy as np

from ..exponents import INF, ExponentError, fmt
from ..grid import CubeFamily, Grid, GriddedFunction
from ..norms import lebesgue_norm
from ..probes import gaussian, probe_family, probe_names
from ..reports import InequalityReport, ScanTable
from ..weights import Weight, _exact, power_weight
from . import verdicts

Recipe = Callable[[Grid], Weight]


def exact(x):
    return _exact(x)


def num(x) -> float:
    """Float value of an exponent parameter (``"inf"`` allowed)."""
    e = _exact(x)
    return math.inf if e is INF else float(e)


def tag(x) -> str:
    """Exponent as a label fragment: ``-3/4`` becomes ``-3_4``."""
    return str(_exact(x)).replace("/", "_")


def exact_list(xs) -> list:
    return [_exact(x) for x in xs]


def schedule(entries) -> list[tuple[float, int]]:
    out = [(float(L), int(N)) for L, N in entries]
    if not out:
        raise ValueError("empty schedule")
    return out


def grid_of(d: int, entry) -> Grid:
    L, N = entry
    return Grid(d, L, int(N))


def new_report(name: str, grid: Grid | None = None, cubes: CubeFamily | None = None) -> InequalityReport:
    rep = InequalityReport(name, "pass")
    if grid is not None:
        describe(rep, grid, cubes)
    return rep


def describe(rep: InequalityReport, grid: Grid, cubes: CubeFamily | None = None) -> None:
    """Record the finest grid and its cube family on the report."""
    rep.grid = {"d": grid.d, "L": grid.L, "N": grid.N}
    rep.cube_family = (cubes or CubeFamily(grid)).descriptor()


def require(cond: bool, msg: str) -> None:
    if not cond:
        raise ExponentError(msg)


# --------------------------------------------------------------------------
# weight recipes


def power(b, anchor=0.0) -> Recipe:
    """``|x - anchor|^b``."""
    return lambda g: power_weight(g, b, anchor)


def bracket(e) -> Recipe:
    """``(1 + |x|)^e``."""
    e = float(_exact(e))

    def make(g: Grid) -> Weight:
        return Weight(g, log=e * np.log1p(g.radius()), recipe=make)
    return make


def split_power(b_full, b_part) -> Recipe:
    """``|x|^{b_full} |x'|^{b_part}`` in ``d >= 2``."""
    return lambda g: power_weight(g, axis_split=(b_full, b_part))


def one() -> Recipe:
    return Weight.one


# --------------------------------------------------------------------------
# probe families


def probes(seed: int, names: Sequence[str] | None = None) -> Callable[[Grid], dict[str, GriddedFunction]]:
    """The standard probe family, optionally restricted to ``names``."""
    def family(grid: Grid) -> dict[str, GriddedFunction]:
        full = dict(zip(probe_names(), probe_family(grid, seed)))
        if names is None:
            return full
        return {k: full[k] for k in names}
    return family


def wide_gaussians(grid: Grid) -> dict[str, GriddedFunction]:
    """Gaussians resolved on coarse 3-d grids."""
    return {"gauss0": gaussian(grid, 0.0, 0.3), "gauss3": gaussian(grid, 0.5, 0.2)}


# --------------------------------------------------------------------------
# norms and checks


def wnorm(f: GriddedFunction, p, w: GriddedFunction | None = None) -> float:
    """``‖f w‖_{L^p}``."""
    g = f if w is None else f * w
    return lebesgue_norm(g, p)


def stability(rep: InequalityReport, table: ScanTable, name: str = "stability",
              tol: float = verdicts.STABILITY_TOL, column: str = "max_ratio") -> bool | None:
    rep.tables.append(table)
    return verdicts.check(rep, name, "stable", values=table.column(column), tol=tol)


def values_table(name: str, columns: Sequence[str], rows: Sequence[Sequence], **meta) -> ScanTable:
    return ScanTable(name, tuple(columns), [tuple(r) for r in rows], dict(meta))


def echo(params: Mapping[str, Any]) -> dict:
    """Parameter echo with exponents written as ``"num/den"``."""
    def conv(v):
        if isinstance(v, float) and v.is_integer():
            return int(v)
        if isinstance(v, Fraction) or v is INF:
            return fmt(v)
        if isinstance(v, (list, tuple)):
            return [conv(x) for x in v]
        if isinstance(v, dict):
            return {k: conv(x) for k, x in v.items()}
        return v
    return {k: conv(v) for k, v in params.items()}
