"""Fixed test-function families, defined in physical coordinates.

Supports lie inside ``[-1, 1]^d`` so the same probe can be sampled on every
grid of a refinement or domain-growth schedule.
"""

from __future__ import annotations

import numpy as np

from .grid import Grid, GriddedFunction

__all__ = ["DEFAULT_SEED", "probe_family", "probe_names", "b_probes", "indicator", "gaussian", "random_step"]

DEFAULT_SEED = 0xC0FFEE

_GAUSSIANS = ((0.0, 0.3), (0.25, 0.1), (-0.4, 0.05), (0.5, 0.2))
_INDICATORS = ((0.0, 1.0), (-0.5, 0.25))
_STEP_PIECES = 8


def gaussian(grid: Grid, center: float, width: float) -> GriddedFunction:
    r2 = sum((x - center) ** 2 for x in grid.coords())
    return GriddedFunction(grid, np.exp(-r2 / (2.0 * width ** 2)))


def indicator(grid: Grid, lo: float, hi: float) -> GriddedFunction:
    """Indicator of the box ``[lo, hi]^d``."""
    mask = np.ones(grid.shape, dtype=bool)
    for x in grid.coords():
        mask &= (x >= lo) & (x <= hi)
    return GriddedFunction(grid, mask.astype(float))


def random_step(grid: Grid, rng: np.random.Generator) -> GriddedFunction:
    """Piecewise constant on a uniform partition of ``[-1, 1]^d``, zero outside."""
    vals = rng.uniform(-1.0, 1.0, size=(_STEP_PIECES,) * grid.d)
    idx = []
    inside = np.ones(grid.shape, dtype=bool)
    for x in grid.coords():
        k = np.floor((x + 1.0) / 2.0 * _STEP_PIECES).astype(int)
        inside &= (k >= 0) & (k < _STEP_PIECES)
        idx.append(np.clip(k, 0, _STEP_PIECES - 1))
    return GriddedFunction(grid, np.where(inside, vals[tuple(idx)], 0.0))


def probe_names() -> tuple[str, ...]:
    return tuple([f"gauss{i}" for i in range(len(_GAUSSIANS))]
                 + [f"ind{i}" for i in range(len(_INDICATORS))]
                 + ["step0", "step1"])


def probe_family(grid: Grid, seed: int = DEFAULT_SEED) -> list[GriddedFunction]:
    """Four Gaussian bumps, two indicators, two seeded random step functions."""
    rng = np.random.default_rng(seed)
    out = [gaussian(grid, c, w) for c, w in _GAUSSIANS]
    out += [indicator(grid, lo, hi) for lo, hi in _INDICATORS]
    out += [random_step(grid, rng), random_step(grid, rng)]
    return out


def b_probes(grid: Grid) -> dict[str, GriddedFunction]:
    """Symbols for commutator tests, functions of the first coordinate."""
    x = grid.coords()[0]
    return {
        "const": grid.constant(1.0),
        "sgn": GriddedFunction(grid, np.sign(x)),
        "log": GriddedFunction(grid, np.log(np.abs(x))),
        "x": GriddedFunction(grid, x),
    }
