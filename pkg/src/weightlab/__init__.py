"""Numerical laboratory for weighted norm inequalities with partial multiple weights.

Grids and shifted dyadic cube families, function-space norms, weight-class
constants, maximal and fractional operators, exact exponent calculus and a
scenario harness that turns each weighted inequality into a refinement scan
with a reproducible verdict.
"""

from __future__ import annotations

from .exponents import INF, ExponentError
from .grid import CubeFamily, Grid, GriddedFunction, make_grid
from .reports import InequalityReport, ScanTable
from .weights import Weight, power_weight

__version__ = "0.1.0"

__all__ = [
    "INF",
    "ExponentError",
    "Grid",
    "GriddedFunction",
    "CubeFamily",
    "make_grid",
    "Weight",
    "power_weight",
    "InequalityReport",
    "ScanTable",
    "__version__",
]
