"""Uniform midpoint grids on a bounded open interval."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError


@dataclass(frozen=True)
class SpatialGrid:
    """Midpoint discretization of the interval (lo, hi) with n cells.

    Nodes sit at cell centers, x_i = lo + (i + 1/2) h with h = (hi - lo)/n,
    and every node carries the same quadrature weight h.  Integrals over the
    interval are h * sum(values).
    """

    lo: float
    hi: float
    n: int
    nodes: np.ndarray = field(repr=False)
    weight: float

    def integrate(self, values: np.ndarray) -> float:
        """Midpoint-rule integral of a nodal field."""
        return self.weight * float(np.sum(values))

    @property
    def span(self) -> float:
        return self.hi - self.lo


def build_grid(lo: float, hi: float, n: int) -> SpatialGrid:
    """Build the uniform midpoint grid on (lo, hi) with n >= 3 cells."""
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise ConfigError("grid endpoints must be finite")
    if not hi > lo:
        raise ConfigError(f"grid needs hi > lo, got ({lo}, {hi})")
    if n < 3:
        raise ConfigError(f"grid needs at least 3 cells, got n={n}")
    h = (hi - lo) / n
    nodes = lo + (np.arange(n) + 0.5) * h
    nodes.flags.writeable = False
    return SpatialGrid(lo=float(lo), hi=float(hi), n=int(n), nodes=nodes, weight=h)
