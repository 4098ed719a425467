from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import cube_over
from weightlab.grid import (CubeFamily, Grid, GriddedFunction, block_reduce, broadcast, cube_average,
                            enumerate_cubes, ess_range, integrate, make_grid, read_csv, whole_domain, write_csv)


def test_centres_and_cell_width():
    g = make_grid(1, 1.0, 8)
    assert g.h == 0.25
    assert np.allclose(g.centers_1d(), np.linspace(-0.875, 0.875, 8))


def test_volume_sums_to_domain():
    g = make_grid(2, 2.0, 4)
    assert g.size == 16
    assert integrate(g.constant(1.0)) == pytest.approx(16.0, rel=1e-12)


@pytest.mark.parametrize("N", [7, 2, 0, 12])
def test_rejects_bad_cell_count(N):
    with pytest.raises(ValueError):
        make_grid(1, 1.0, N)


def test_rejects_bad_dimension_and_length():
    with pytest.raises(ValueError):
        make_grid(4, 1.0, 8)
    with pytest.raises(ValueError):
        make_grid(1, -1.0, 8)


def test_no_centre_at_origin():
    for N in (4, 8, 64):
        assert np.all(make_grid(1, 1.0, N).centers_1d() != 0.0)


def test_single_whole_domain_cube():
    fam = CubeFamily(make_grid(1, 1.0, 8), 0, 0, [0])
    cubes = fam.cubes()
    assert len(cubes) == 1 and cubes[0].bounds == ((0, 8),)


def test_dyadic_count():
    assert len(CubeFamily(make_grid(1, 1.0, 8), 0, 3, [0])) == 15


def _brute_count(grid: Grid, level: int, shifts) -> int:
    side = 2 * grid.L / 2 ** level
    c = grid.centers_1d()
    total = 0
    for s in shifts:
        seen = set()
        for k in range(-2, 2 ** level + 2):
            lo = -grid.L + (k + float(s)) * side
            cells = tuple(np.nonzero((c >= lo) & (c < lo + side))[0])
            if cells:
                seen.add(cells)
        total += len(seen)
    return total


@pytest.mark.parametrize("level,shifts", [(1, [0, Fraction(1, 3)]), (2, [0, Fraction(1, 3), Fraction(2, 3)]),
                                          (3, [Fraction(1, 2)])])
def test_shifted_count_matches_brute_force(level, shifts):
    g = make_grid(1, 1.0, 8)
    assert len(CubeFamily(g, level, level, shifts)) == _brute_count(g, level, shifts)


def test_family_partitions_tile_the_grid():
    g = make_grid(2, 1.0, 16)
    for part in CubeFamily(g).partitions:
        assert part.cell_counts().sum() == g.size


def test_family_rejects_bad_levels_and_shifts():
    g = make_grid(1, 1.0, 8)
    with pytest.raises(ValueError):
        CubeFamily(g, 2, 1)
    with pytest.raises(ValueError):
        CubeFamily(g, 0, 4)
    with pytest.raises(ValueError):
        CubeFamily(g, shifts=[1])


def test_descriptor():
    d = CubeFamily(make_grid(1, 1.0, 8), 1, 2).descriptor()
    assert d == {"levels": [1, 2], "shifts": ["0/1", "1/3", "2/3"]}


def test_averages(line):
    x = line.coords()[0]
    assert cube_average(line.constant(3.0), whole_domain(line)) == pytest.approx(3.0)
    assert cube_average(GriddedFunction(line, x), whole_domain(line)) == pytest.approx(0.0, abs=1e-15)
    ind = GriddedFunction(line, (x >= 0) & (x <= 1))
    assert cube_average(ind, whole_domain(line)) == 0.5


def test_integrals():
    assert integrate(make_grid(1, 1.0, 16).constant(1.0)) == pytest.approx(2.0)
    assert integrate(make_grid(2, 1.0, 16).constant(1.0)) == pytest.approx(4.0)


def test_integral_of_abs_is_second_order():
    errs = []
    for N in (8, 16, 32, 64):
        g = make_grid(1, 1.0, N)
        # midpoint rule is exact for |x| when 0 is a cell boundary
        errs.append(abs(integrate(GriddedFunction(g, np.abs(g.coords()[0]))) - 1.0))
    assert max(errs) < 1e-12


def test_ess_range(line):
    x = line.coords()[0]
    assert ess_range(line.constant(2.0)) == (2.0, 2.0)
    assert ess_range(GriddedFunction(line, (x >= 0) & (x <= 1))) == (0.0, 1.0)
    lo, hi = ess_range(GriddedFunction(line, np.abs(x)), cube_over(line, 0.5, 1.0))
    assert abs(lo - 0.5) <= line.h and abs(hi - 1.0) <= line.h


def test_block_reduce_and_broadcast_roundtrip():
    g = make_grid(2, 1.0, 8)
    vals = np.arange(64.0).reshape(8, 8)
    for part in CubeFamily(g, 1, 2).partitions:
        sums = block_reduce(vals, part)
        assert sums.sum() == pytest.approx(vals.sum())
        assert broadcast(block_reduce(np.ones_like(vals), part), part).sum() == pytest.approx(
            (part.cell_counts() ** 2).sum())


def test_csv_roundtrip(tmp_path):
    g = make_grid(2, 1.5, 4)
    f = GriddedFunction(g, np.random.default_rng(1).normal(size=g.shape))
    write_csv(f, tmp_path / "f.csv")
    back = read_csv(tmp_path / "f.csv")
    assert back.grid == g and np.array_equal(back.values, f.values)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3), st.integers(2, 4), st.floats(0.1, 10.0))
def test_volume_property(d, log_n, L):
    g = Grid(d, L, 2 ** log_n)
    assert integrate(g.constant(1.0)) == pytest.approx((2 * L) ** d, rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 5), st.sampled_from([0, Fraction(1, 3), Fraction(2, 3)]))
def test_each_partition_covers_every_cell_once(level, shift):
    g = Grid(1, 1.0, 32)
    fam = CubeFamily(g, level, level, [shift])
    cover = np.zeros(g.N)
    for Q in fam:
        cover[Q.slices] += 1
    assert np.all(cover == 1)
