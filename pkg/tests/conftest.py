from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from weightlab.grid import Cube, Grid  # noqa: E402


def cube_over(grid: Grid, lo: float, hi: float) -> Cube:
    """The cube whose cells have centres in ``[lo, hi]`` on every axis."""
    c = grid.centers_1d()
    idx = np.nonzero((c >= lo) & (c <= hi))[0]
    bounds = tuple((int(idx[0]), int(idx[-1]) + 1) for _ in range(grid.d))
    return Cube(0, 0, (0,) * grid.d, bounds, grid.cell_volume)


@pytest.fixture
def line():
    return Grid(1, 1.0, 64)


ACCEPTANCE = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[ACCEPTANCE] = {}


def record_criterion(config, number: int, part: str, ok: bool, detail: str = "") -> None:
    config.stash[ACCEPTANCE].setdefault(number, []).append((part, ok, detail))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash.get(ACCEPTANCE, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        parts = results[number]
        ok = all(p[1] for p in parts)
        text = "; ".join(f"{name}: {'ok' if good else 'FAIL'}{(' (' + detail + ')') if detail else ''}"
                         for name, good, detail in parts)
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {number:2d}: {text}")
