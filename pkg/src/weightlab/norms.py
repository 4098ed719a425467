"""Function-space norms on gridded functions."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .estimate import ConstantEstimate, estimate_blocks
from .grid import Cube, CubeFamily, GriddedFunction, Partition, block_reduce, broadcast, integrate

__all__ = [
    "OrliczFunction",
    "DistributionProfile",
    "distribution_profile",
    "superlevel_measure",
    "lebesgue_norm",
    "lorentz_norm",
    "morrey_norm",
    "luxemburg_norm",
    "luxemburg_blocks",
    "bmo_norm",
    "bmo_blocks",
]


def _exp(x) -> float:
    """Exponent as a float; accepts ``INF``, Fractions and strings."""
    if isinstance(x, str):
        x = x.strip().lower()
        if x in ("inf", "infinity"):
            return math.inf
        from fractions import Fraction
        return float(Fraction(x))
    if str(x) == "inf":
        return math.inf
    return float(x)


@dataclass(frozen=True)
class OrliczFunction:
    """Young function ``t^p`` (``kind="power"``) or ``t^p ln^c(e+t)``."""

    kind: str = "power"
    p: float = 2.0
    c: float = 0.0

    def __post_init__(self):
        if self.kind not in ("power", "power-log"):
            raise ValueError(f"unsupported Orlicz family {self.kind!r}")
        p, c = float(self.p), float(self.c)
        if self.kind == "power":
            c = 0.0
        # convexity and superlinear growth
        if p < 1 or c < 0 or (p == 1 and c == 0):
            raise ValueError(f"Orlicz function fails convexity/growth: p={p}, c={c}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "c", c)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = t ** self.p
        if self.c:
            out = out * np.log(math.e + t) ** self.c
        return out

    def inverse_at_one(self) -> float:
        """``t`` with ``Φ(t) = 1``."""
        if self.c == 0:
            return 1.0
        lo, hi = 0.0, 1.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if self(mid) < 1.0:
                lo = mid
            else:
                hi = mid
        return lo


@dataclass(frozen=True)
class DistributionProfile:
    """``λ_j = |{|f| > t_j}|`` on ``[t_j, t_{j+1})``; ``t_0 = 0``."""

    thresholds: np.ndarray
    measures: np.ndarray

    def at(self, t: float) -> float:
        j = int(np.searchsorted(self.thresholds, t, side="right")) - 1
        if j >= len(self.measures):
            return 0.0
        return float(self.measures[max(j, 0)])


def distribution_profile(f: GriddedFunction) -> DistributionProfile:
    a = np.abs(f.values).ravel(order="F")
    vals, counts = np.unique(a[a > 0], return_counts=True)
    # measure of {|f| >= vals[j]} accumulated from the top
    tail = np.cumsum(counts[::-1])[::-1].astype(float) * f.grid.cell_volume
    thresholds = np.concatenate(([0.0], vals))
    measures = np.concatenate((tail, [0.0]))
    return DistributionProfile(thresholds, measures)


def superlevel_measure(f: GriddedFunction, t: float, sigma: GriddedFunction | None = None) -> float:
    if t < 0:
        raise ValueError("threshold must be nonnegative")
    mask = np.abs(f.values) > t
    if sigma is None:
        return float(np.count_nonzero(mask)) * f.grid.cell_volume
    return integrate(GriddedFunction(f.grid, np.where(mask, sigma.values, 0.0)))


def lebesgue_norm(f: GriddedFunction, p, sigma: GriddedFunction | None = None) -> float:
    p = _exp(p)
    if p == math.inf:
        return float(np.abs(f.values).max())
    if not p > 0:
        raise ValueError(f"p must be positive, got {p}")
    integrand = np.abs(f.values) ** p
    if sigma is not None:
        integrand = integrand * sigma.values
    return integrate(GriddedFunction(f.grid, integrand)) ** (1.0 / p)


def lorentz_norm(f: GriddedFunction, p, q, rearrangement: bool = False) -> float:
    """Distribution-function Lorentz (quasi-)norm.

    The default is ``‖t^{1-1/q} λ(t)^{1/p}‖_{L^q(0,∞)}`` evaluated in closed
    form on each interval where ``λ`` is constant.  ``rearrangement=True``
    multiplies by ``p^{1/q}``, giving the ``f*``-based normalisation.
    """
    p, q = _exp(p), _exp(q)
    if not (0 < p < math.inf):
        raise ValueError(f"p must lie in (0, inf), got {p}")
    if not q > 0:
        raise ValueError(f"q must be positive, got {q}")
    prof = distribution_profile(f)
    t, lam = prof.thresholds, prof.measures[:-1]
    if len(lam) == 0:
        return 0.0
    if q == math.inf:
        return float(np.max(t[1:] * lam ** (1.0 / p)))
    pieces = lam ** (q / p) * (t[1:] ** q - t[:-1] ** q) / q
    value = float(np.add.reduce(pieces)) ** (1.0 / q)
    return value * p ** (1.0 / q) if rearrangement else value


def morrey_norm(f: GriddedFunction, p, s, cubes: CubeFamily) -> ConstantEstimate:
    p, s = _exp(p), _exp(s)
    if not (1 <= s < p):
        raise ValueError(f"Morrey norm needs 1 <= s < p, got s={s}, p={p}")
    a = np.abs(f.values) ** s
    blocks = []
    for part in cubes.partitions:
        counts = part.cell_counts()
        mean = block_reduce(a, part) / counts
        vol = counts * cubes.grid.cell_volume
        blocks.append(vol ** (1.0 / p) * mean ** (1.0 / s))
    return estimate_blocks(cubes, blocks, log=False)


def _lux_bisect(abs_vals: np.ndarray, phi: OrliczFunction, reduce_mean, expand, top: np.ndarray,
                iterations: int = 60) -> np.ndarray:
    """Geometric bisection for ``inf{λ : mean Φ(|f|/λ) <= 1}`` per block."""
    hi = top / phi.inverse_at_one()
    lo = np.minimum(1e-12, 1e-12 * hi)
    zero = top == 0
    hi = np.where(zero, 1.0, hi)
    lo = np.where(zero, 1.0, lo)
    for _ in range(iterations):
        mid = np.sqrt(lo * hi)
        ok = reduce_mean(phi(abs_vals / expand(mid))) <= 1.0
        hi = np.where(ok, mid, hi)
        lo = np.where(ok, lo, mid)
        if np.all(hi <= lo * (1 + 1e-15)):
            break
    return np.where(zero, 0.0, hi)


def luxemburg_norm(f: GriddedFunction, phi: OrliczFunction, Q: Cube | None = None) -> float:
    """Normalised Luxemburg norm of ``f`` on ``Q`` (whole domain by default)."""
    vals = np.abs(f.values if Q is None else f.values[Q.slices]).ravel()
    top = np.array(vals.max())
    out = _lux_bisect(vals, phi, lambda x: np.add.reduce(x) / x.size, lambda m: m, top)
    return float(out)


def luxemburg_blocks(f: GriddedFunction, phi: OrliczFunction, cubes: CubeFamily) -> list[np.ndarray]:
    """Luxemburg norm on every cube of every partition."""
    a = np.abs(f.values)
    out = []
    for part in cubes.partitions:
        counts = part.cell_counts()
        top = block_reduce(a, part, "max")
        out.append(_lux_bisect(a, phi, lambda x, part=part, counts=counts: block_reduce(x, part) / counts,
                               lambda m, part=part: broadcast(m, part), top))
    return out


def bmo_blocks(f: GriddedFunction, cubes: CubeFamily) -> list[np.ndarray]:
    out = []
    for part in cubes.partitions:
        counts = part.cell_counts()
        mean = block_reduce(f.values, part) / counts
        osc = np.abs(f.values - broadcast(mean, part))
        out.append(block_reduce(osc, part) / counts)
    return out


def bmo_norm(f: GriddedFunction, cubes: CubeFamily) -> ConstantEstimate:
    return estimate_blocks(cubes, bmo_blocks(f, cubes), log=False)
