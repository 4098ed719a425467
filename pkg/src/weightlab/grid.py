"""Cell-centred grids, sampled functions and shifted dyadic cube families.

A cube family is stored as a list of *partitions*: for a fixed level and
shift vector the cubes tile the domain, so every per-cube quantity can be
computed with segment reductions along each axis and broadcast back to
cells with ``np.repeat``.  All reductions go through :func:`block_reduce` so
that a per-cube sum is bit-identical wherever it is computed.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterator, Sequence

import numpy as np

__all__ = [
    "Grid",
    "GriddedFunction",
    "Cube",
    "Partition",
    "CubeFamily",
    "make_grid",
    "enumerate_cubes",
    "default_family",
    "cube_average",
    "integrate",
    "ess_range",
    "block_reduce",
    "broadcast",
    "read_csv",
    "write_csv",
    "DEFAULT_SHIFTS",
]

DEFAULT_SHIFTS = (Fraction(0), Fraction(1, 3), Fraction(2, 3))


@dataclass(frozen=True)
class Grid:
    d: int
    L: float
    N: int

    def __post_init__(self):
        if self.d not in (1, 2, 3):
            raise ValueError(f"dimension must be 1, 2 or 3, got {self.d}")
        if not (isinstance(self.N, (int, np.integer)) and self.N >= 4 and self.N & (self.N - 1) == 0):
            raise ValueError(f"N must be a power of two >= 4, got {self.N}")
        if not (math.isfinite(self.L) and self.L > 0):
            raise ValueError(f"L must be positive, got {self.L}")
        object.__setattr__(self, "L", float(self.L))
        object.__setattr__(self, "N", int(self.N))

    @property
    def h(self) -> float:
        return 2.0 * self.L / self.N

    @property
    def cell_volume(self) -> float:
        return self.h ** self.d

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.N,) * self.d

    @property
    def size(self) -> int:
        return self.N ** self.d

    @property
    def levels(self) -> int:
        """Finest level, ``log2(N)``."""
        return self.N.bit_length() - 1

    def centers_1d(self) -> np.ndarray:
        return -self.L + (np.arange(self.N) + 0.5) * self.h

    def coords(self) -> tuple[np.ndarray, ...]:
        """Cell-centre coordinate arrays, one per axis (``indexing="ij"``)."""
        c = self.centers_1d()
        return tuple(np.meshgrid(*([c] * self.d), indexing="ij"))

    def radius(self, anchor: Sequence[float] | float = 0.0, axes: int | None = None) -> np.ndarray:
        """Euclidean distance from each centre to ``anchor`` over the first ``axes`` axes."""
        xs = self.coords()
        anchor = np.broadcast_to(np.asarray(anchor, dtype=float), (self.d,))
        k = self.d if axes is None else axes
        return np.sqrt(sum((xs[i] - anchor[i]) ** 2 for i in range(k)))

    def function(self, values) -> "GriddedFunction":
        return GriddedFunction(self, values)

    def evaluate(self, fn: Callable[..., np.ndarray]) -> "GriddedFunction":
        """Sample ``fn(x_1, ..., x_d)`` at the cell centres."""
        return GriddedFunction(self, np.broadcast_to(fn(*self.coords()), self.shape))

    def constant(self, c: float) -> "GriddedFunction":
        return GriddedFunction(self, np.full(self.shape, float(c)))

    def cell_index(self, point: Sequence[float] | float) -> tuple[int, ...]:
        """Index of the cell containing ``point`` (right-open cells)."""
        pt = np.broadcast_to(np.asarray(point, dtype=float), (self.d,))
        idx = np.floor((pt + self.L) / self.h).astype(int)
        return tuple(int(min(max(i, 0), self.N - 1)) for i in idx)


def make_grid(d: int, L: float, N: int) -> Grid:
    return Grid(d, L, N)


class GriddedFunction:
    """Finite real samples on a grid; arithmetic is cell-wise."""

    __slots__ = ("grid", "values")

    def __init__(self, grid: Grid, values):
        arr = np.array(values, dtype=float)
        if arr.shape != grid.shape:
            if arr.size == grid.size and arr.ndim == 1:
                arr = arr.reshape(grid.shape, order="F")
            else:
                raise ValueError(f"values of shape {arr.shape} do not fit grid {grid.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("gridded function values must be finite")
        arr.setflags(write=False)
        self.grid = grid
        self.values = arr

    def __repr__(self):
        return f"GriddedFunction(d={self.grid.d}, L={self.grid.L}, N={self.grid.N})"

    def _other(self, other):
        if isinstance(other, GriddedFunction):
            if other.grid != self.grid:
                raise ValueError("functions live on different grids")
            return other.values
        return other

    def _wrap(self, values):
        return GriddedFunction(self.grid, values)

    def __add__(self, other):
        return self._wrap(self.values + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return self._wrap(self.values - self._other(other))

    def __rsub__(self, other):
        return self._wrap(self._other(other) - self.values)

    def __mul__(self, other):
        return self._wrap(self.values * self._other(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._wrap(self.values / self._other(other))

    def __rtruediv__(self, other):
        return self._wrap(self._other(other) / self.values)

    def __neg__(self):
        return self._wrap(-self.values)

    def __pow__(self, e):
        return self._wrap(self.values ** e)

    def __abs__(self):
        return self._wrap(np.abs(self.values))

    def flat(self) -> np.ndarray:
        """Values in file order (first axis fastest)."""
        return self.values.ravel(order="F")


# --------------------------------------------------------------------------
# cubes


@dataclass(frozen=True)
class Cube:
    """One cube of a family, with its (clipped) cell index ranges.

    ``anchor`` holds the lattice coordinates ``k`` of the lower corner
    ``-L + (k + shift) * side``; clipped boundary cubes may have ``k = -1``.
    """

    level: int
    shift: int
    anchor: tuple[int, ...]
    bounds: tuple[tuple[int, int], ...] = field(compare=False)
    cell_volume: float = field(compare=False)

    @property
    def slices(self) -> tuple[slice, ...]:
        return tuple(slice(a, b) for a, b in self.bounds)

    @property
    def count(self) -> int:
        return int(np.prod([b - a for a, b in self.bounds]))

    @property
    def volume(self) -> float:
        return self.count * self.cell_volume

    def describe(self) -> dict:
        return {"level": self.level, "shift": self.shift, "anchor": list(self.anchor),
                "cells": [[a, b] for a, b in self.bounds]}


@dataclass(frozen=True)
class Partition:
    """All cubes of one level and one shift vector; they tile the grid."""

    level: int
    shift: int
    starts: tuple[np.ndarray, ...]
    counts: tuple[np.ndarray, ...]
    anchors: tuple[np.ndarray, ...]

    @property
    def block_shape(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.starts)

    def cell_counts(self) -> np.ndarray:
        out = np.ones(self.block_shape)
        for ax, c in enumerate(self.counts):
            shape = [1] * len(self.counts)
            shape[ax] = len(c)
            out = out * c.reshape(shape)
        return out

    def cube(self, block: tuple[int, ...], cell_volume: float) -> Cube:
        bounds = tuple((int(self.starts[ax][b]), int(self.starts[ax][b] + self.counts[ax][b]))
                       for ax, b in enumerate(block))
        anchor = tuple(int(self.anchors[ax][b]) for ax, b in enumerate(block))
        return Cube(self.level, self.shift, anchor, bounds, cell_volume)


def _axis_blocks(N: int, level: int, shift: Fraction) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    side = Fraction(N, 2 ** level)  # side length in cell units
    lo_k = -1 if shift else 0
    starts, anchors = [], []
    k = lo_k
    while True:
        lo = (k + shift) * side
        if lo >= N:
            break
        # cells j with centre j + 1/2 in [lo, hi)
        start = max(0, math.ceil(lo - Fraction(1, 2)))
        stop = min(N, math.ceil(lo + side - Fraction(1, 2)))
        if stop > start:  # neighbours share faces, so nonempty blocks are contiguous
            starts.append(start)
            anchors.append(k)
        k += 1
    starts_arr = np.asarray(starts, dtype=np.intp)
    counts = np.diff(np.append(starts_arr, N))
    return starts_arr, counts, np.asarray(anchors, dtype=np.intp)


class CubeFamily:
    """Shifted dyadic cubes over a grid, enumerated deterministically.

    Levels ascend, then shift vectors in lexicographic order of their
    indices into ``shifts``, then anchors lexicographically.
    """

    def __init__(self, grid: Grid, lmin: int = 0, lmax: int | None = None,
                 shifts: Sequence = DEFAULT_SHIFTS):
        lmax = grid.levels if lmax is None else lmax
        if not (0 <= lmin <= lmax <= grid.levels):
            raise ValueError(f"levels must satisfy 0 <= {lmin} <= {lmax} <= {grid.levels}")
        shifts = tuple(Fraction(s) for s in shifts)
        if not shifts or any(not (0 <= s < 1) for s in shifts):
            raise ValueError("shifts must be nonempty fractions in [0, 1)")
        self.grid = grid
        self.lmin, self.lmax = lmin, lmax
        self.shifts = shifts
        self.shift_vectors = tuple(itertools.product(shifts, repeat=grid.d))
        parts = []
        for level in range(lmin, lmax + 1):
            per_shift = {s: _axis_blocks(grid.N, level, s) for s in shifts}
            for si, vec in enumerate(self.shift_vectors):
                axes = [per_shift[s] for s in vec]
                parts.append(Partition(level, si,
                                       tuple(a[0] for a in axes),
                                       tuple(a[1] for a in axes),
                                       tuple(a[2] for a in axes)))
        self.partitions: tuple[Partition, ...] = tuple(parts)

    def __len__(self) -> int:
        return sum(int(np.prod(p.block_shape)) for p in self.partitions)

    def __iter__(self) -> Iterator[Cube]:
        vol = self.grid.cell_volume
        for part in self.partitions:
            for block in np.ndindex(*part.block_shape):
                yield part.cube(block, vol)

    def __eq__(self, other):
        return (isinstance(other, CubeFamily) and other.grid == self.grid
                and (other.lmin, other.lmax, other.shifts) == (self.lmin, self.lmax, self.shifts))

    def __hash__(self):
        return hash((self.grid, self.lmin, self.lmax, self.shifts))

    def cubes(self) -> list[Cube]:
        return list(self)

    def descriptor(self) -> dict:
        return {"levels": [self.lmin, self.lmax],
                "shifts": [f"{s.numerator}/{s.denominator}" for s in self.shifts]}

    def volumes(self, part: Partition) -> np.ndarray:
        return part.cell_counts() * self.grid.cell_volume


def enumerate_cubes(grid: Grid, lmin: int = 0, lmax: int | None = None,
                    shifts: Sequence = DEFAULT_SHIFTS) -> CubeFamily:
    return CubeFamily(grid, lmin, lmax, shifts)


def default_family(grid: Grid) -> CubeFamily:
    return CubeFamily(grid)


# --------------------------------------------------------------------------
# reductions


def block_reduce(values: np.ndarray, part: Partition, op: str = "sum") -> np.ndarray:
    """Reduce ``values`` over every cube of ``part`` (axis 0 first)."""
    ufunc = {"sum": np.add, "max": np.maximum, "min": np.minimum}[op]
    out = values
    for ax, starts in enumerate(part.starts):
        out = ufunc.reduceat(out, starts, axis=ax)
    return out


def broadcast(block_values: np.ndarray, part: Partition) -> np.ndarray:
    """Expand per-cube values back to cells."""
    out = block_values
    for ax, counts in enumerate(part.counts):
        out = np.repeat(out, counts, axis=ax)
    return out


def _cube_reduce(values: np.ndarray, Q: Cube, op: str) -> float:
    if Q.count == 0:
        raise ValueError("cube has no cells")
    ufunc = {"sum": np.add, "max": np.maximum, "min": np.minimum}[op]
    out = values[Q.slices]
    for ax in range(out.ndim):
        out = ufunc.reduceat(out, [0], axis=ax)
    return float(out.reshape(-1)[0])


def _check_cube(f: GriddedFunction, Q: Cube):
    if any(a < 0 or b > f.grid.N for a, b in Q.bounds) or len(Q.bounds) != f.grid.d:
        raise ValueError("cube does not lie in the function's grid")


def cube_average(f: GriddedFunction, Q: Cube) -> float:
    _check_cube(f, Q)
    return _cube_reduce(f.values, Q, "sum") / Q.count


def integrate(f: GriddedFunction, region: Cube | None = None) -> float:
    if region is None:
        out = f.values
        for ax in range(out.ndim):
            out = np.add.reduceat(out, [0], axis=ax)
        return float(out.reshape(-1)[0]) * f.grid.cell_volume
    _check_cube(f, region)
    return _cube_reduce(f.values, region, "sum") * f.grid.cell_volume


def ess_range(f: GriddedFunction, Q: Cube | None = None) -> tuple[float, float]:
    if Q is None:
        return float(f.values.min()), float(f.values.max())
    _check_cube(f, Q)
    return _cube_reduce(f.values, Q, "min"), _cube_reduce(f.values, Q, "max")


def whole_domain(grid: Grid) -> Cube:
    return Cube(0, 0, (0,) * grid.d, tuple((0, grid.N) for _ in range(grid.d)), grid.cell_volume)


# --------------------------------------------------------------------------
# CSV


def write_csv(f: GriddedFunction, path: str | Path) -> None:
    g = f.grid
    lines = [f"{g.d},{g.L!r},{g.N}"]
    lines.extend(f"{v:.17g}" for v in f.flat())
    Path(path).write_text("\n".join(lines) + "\n")


def read_csv(path: str | Path) -> GriddedFunction:
    text = Path(path).read_text().split()
    d, L, N = text[0].split(",")
    grid = Grid(int(d), float(L), int(N))
    vals = np.array([float(t) for t in text[1:]])
    if vals.size != grid.size:
        raise ValueError(f"expected {grid.size} values, found {vals.size}")
    return GriddedFunction(grid, vals)
