"""Suprema of per-cube quantities over a cube family.

A per-cube quantity is described as a product of *terms*, each a power mean
or essential bound of some weight.  Terms are evaluated in log space per
partition, so large exponents and ``0 < q < 1`` never overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .grid import Cube, CubeFamily, Partition, block_reduce, broadcast

__all__ = ["ConstantEstimate", "Term", "pow_term", "sup_term", "geo_term",
           "log_blocks", "estimate_terms", "estimate_blocks", "log_power_mean"]


@dataclass(frozen=True)
class ConstantEstimate:
    """Supremum over a finite cube family.

    ``profile`` holds ``(level, max over that level)`` pairs and ``value``
    is the largest of them; ``argmax`` is the first maximizing cube in
    enumeration order.
    """

    value: float
    argmax: Cube | None
    profile: tuple[tuple[int, float], ...]
    family: dict

    def __float__(self):
        return float(self.value)

    def to_dict(self) -> dict:
        return {"value": self.value,
                "argmax": None if self.argmax is None else self.argmax.describe(),
                "profile": [[lvl, v] for lvl, v in self.profile],
                "family": self.family}


@dataclass(frozen=True)
class Term:
    """``outer * log`` of a cube statistic of ``exp(exponent * logw)``.

    kind ``pow``: the mean; ``max``: the largest cell value;
    ``geo``: ``exp`` of the mean of the log.
    """

    kind: str
    logw: np.ndarray
    exponent: float
    outer: float


def pow_term(logw, exponent, outer) -> Term:
    return Term("pow", logw, float(exponent), float(outer))


def sup_term(logw, exponent, outer=1.0) -> Term:
    return Term("max", logw, float(exponent), float(outer))


def geo_term(logw, exponent, outer=1.0) -> Term:
    return Term("geo", logw, float(exponent), float(outer))


def log_power_mean(x: np.ndarray, part: Partition, counts: np.ndarray) -> np.ndarray:
    """``log`` of the cube mean of ``exp(x)``, stabilised by the cube maximum."""
    top = block_reduce(x, part, "max")
    s = block_reduce(np.exp(x - broadcast(top, part)), part, "sum")
    return top + np.log(s) - np.log(counts)


def _term_blocks(term: Term, part: Partition, counts: np.ndarray) -> np.ndarray:
    if term.outer == 0.0:
        return np.zeros(part.block_shape)
    x = term.exponent * term.logw if term.exponent != 1.0 else term.logw
    if term.kind == "pow":
        val = log_power_mean(x, part, counts)
    elif term.kind == "max":
        val = block_reduce(x, part, "max")
    elif term.kind == "geo":
        val = block_reduce(x, part, "sum") / counts
    else:
        raise ValueError(f"unknown term kind {term.kind!r}")
    return term.outer * val


def log_blocks(family: CubeFamily, terms: Sequence[Term]) -> list[np.ndarray]:
    """Per-partition arrays of ``log`` of the product of ``terms``."""
    out = []
    for part in family.partitions:
        counts = part.cell_counts()
        acc = np.zeros(part.block_shape)
        for t in terms:
            acc = acc + _term_blocks(t, part, counts)
        out.append(acc)
    return out


def estimate_blocks(family: CubeFamily, blocks: Iterable[np.ndarray], log: bool = True) -> ConstantEstimate:
    """Reduce per-partition block arrays to a :class:`ConstantEstimate`."""
    best = -math.inf
    best_at = None
    per_level: dict[int, float] = {}
    for part, vals in zip(family.partitions, blocks):
        if np.isnan(vals).any():
            raise FloatingPointError("NaN in per-cube values")
        i = int(np.argmax(vals))
        v = float(vals.reshape(-1)[i])
        if v > best or best_at is None:
            best, best_at = v, (part, np.unravel_index(i, part.block_shape))
        per_level[part.level] = max(per_level.get(part.level, -math.inf), v)
    conv: Callable[[float], float] = math.exp if log else float
    part, block = best_at
    cube = part.cube(tuple(int(b) for b in block), family.grid.cell_volume)
    profile = tuple((lvl, _safe(conv, v)) for lvl, v in sorted(per_level.items()))
    return ConstantEstimate(_safe(conv, best), cube, profile, family.descriptor())


def _safe(conv, v):
    try:
        return conv(v)
    except OverflowError:
        return math.inf


def estimate_terms(family: CubeFamily, terms: Sequence[Term]) -> ConstantEstimate:
    return estimate_blocks(family, log_blocks(family, terms))
