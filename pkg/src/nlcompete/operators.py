"""Discrete dispersal operators on midpoint grids.

The pure nonlocal operator acts as

    (K phi)_i = sum_j kmat[i, j] phi_j - adiag_i phi_i

where kmat[i, j] = k(x_i, x_j) * h is the kernel matrix with the quadrature
weight folded in.  Three outflow closures are supported:

  NoFlux    adiag_i is the column sum of kmat, the discrete mass of
            k(., x_i) over the domain; no individuals leave.
  Hostile   adiag_i = 1, the full kernel mass; anything dispersing outside
            the domain dies.
  Periodic  kmat is the kernel wrapped over integer translates of the
            period, adiag_i again the column sums, which equal the unit
            kernel mass up to quadrature error.

With adiag tied to the column sums of a symmetric kmat, constants are
annihilated exactly and the quadratic form phi' (kmat - diag(adiag)) phi is
nonpositive, which the rest of the package leans on.

A mixing weight in [0, 1] blends the nonlocal operator with a reflecting
3-point Laplacian (NoFlux regime only): mix * nonlocal + (1 - mix) * local.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .grid import SpatialGrid
from .kernels import KernelSpec

_REGIMES = ("noflux", "hostile", "periodic")


@dataclass(frozen=True)
class BoundaryRegime:
    """Outflow closure tag; 'periodic' carries the period length."""

    kind: str
    period: float | None = None

    def __post_init__(self):
        if self.kind not in _REGIMES:
            raise ConfigError(f"unknown boundary regime {self.kind!r}")
        if self.kind == "periodic":
            if self.period is None or not (
                math.isfinite(self.period) and self.period > 0
            ):
                raise ConfigError("periodic regime needs a positive period")
        elif self.period is not None:
            raise ConfigError(f"regime {self.kind!r} takes no period")

    @classmethod
    def no_flux(cls) -> "BoundaryRegime":
        return cls("noflux")

    @classmethod
    def hostile(cls) -> "BoundaryRegime":
        return cls("hostile")

    @classmethod
    def periodic(cls, period: float) -> "BoundaryRegime":
        return cls("periodic", float(period))


@dataclass(frozen=True)
class DispersalOperator:
    """Assembled linear dispersal generator on one grid.

    generator is the dense matrix of the full scaled operator,

        rate * (mix * (kmat - diag(adiag)) + (1 - mix) * local)

    kept explicit because the grids in play are small and the spectral and
    steady-state code wants plain dense linear algebra.
    """

    grid: SpatialGrid
    regime: BoundaryRegime
    rate: float
    mix: float
    kmat: np.ndarray = field(repr=False)
    adiag: np.ndarray = field(repr=False)
    local: np.ndarray | None = field(repr=False)
    generator: np.ndarray = field(repr=False)

    @property
    def is_symmetric(self) -> bool:
        """Bitwise symmetry of the kernel matrix."""
        return bool(np.array_equal(self.kmat, self.kmat.T))

    def apply(self, phi: np.ndarray) -> np.ndarray:
        return apply_operator(self, phi)


def assemble_laplacian(grid: SpatialGrid) -> np.ndarray:
    """Reflecting (zero-flux) 3-point Laplacian on the midpoint grid.

    First and last rows use the ghost-cell closure u_0 = u_1, so every row
    sums to zero exactly and the matrix is symmetric.
    """
    n = grid.n
    h2 = grid.weight * grid.weight
    lap = np.zeros((n, n))
    idx = np.arange(n)
    lap[idx, idx] = -2.0
    lap[idx[:-1], idx[:-1] + 1] = 1.0
    lap[idx[1:], idx[1:] - 1] = 1.0
    lap[0, 0] = -1.0
    lap[n - 1, n - 1] = -1.0
    lap /= h2
    return lap


def _kernel_matrix(spec: KernelSpec, grid: SpatialGrid, regime: BoundaryRegime):
    """Kernel matrix with quadrature weight folded in, exactly symmetric.

    Offsets are fed to the profile through abs(), which is an even function
    of the node difference, so the unwrapped matrix is symmetric bit for
    bit.  The periodic wrap accumulates the +-m translates as a single
    commutative pair per m, preserving exact symmetry.
    """
    x = grid.nodes
    diff = x[:, None] - x[None, :]
    kmat = spec.profile(np.abs(diff))
    if regime.kind == "periodic":
        span = grid.span
        if abs(regime.period - span) > 1e-12 * span:
            raise ConfigError(
                f"periodic regime period {regime.period} does not match "
                f"the grid span {span}"
            )
        wraps = int(math.ceil((spec.support_radius + span) / span))
        for m in range(1, wraps + 1):
            shift = m * span
            kmat = kmat + (
                spec.profile(np.abs(diff - shift))
                + spec.profile(np.abs(diff + shift))
            )
    kmat *= grid.weight
    return kmat


def assemble_dispersal(
    spec: KernelSpec,
    grid: SpatialGrid,
    regime: BoundaryRegime,
    rate: float,
    mix: float = 1.0,
) -> DispersalOperator:
    """Assemble the (possibly mixed) dispersal operator.

    rate scales the whole operator; mix in [0, 1] weights the nonlocal part
    against the reflecting Laplacian.  mix < 1 is only meaningful with the
    NoFlux regime and is rejected otherwise.
    """
    if not (math.isfinite(rate) and rate >= 0):
        raise ConfigError(f"dispersal rate must be nonnegative, got {rate}")
    if not (0.0 <= mix <= 1.0):
        raise ConfigError(f"mixing weight must lie in [0, 1], got {mix}")
    if mix < 1.0 and regime.kind != "noflux":
        raise ConfigError("a local Laplacian part requires the NoFlux regime")

    kmat = _kernel_matrix(spec, grid, regime)
    n = grid.n
    if regime.kind == "hostile":
        adiag = np.ones(n)
    else:
        # Column sums; for the bitwise-symmetric kmat these coincide with
        # row sums computed by the same BLAS path, so constants are
        # annihilated exactly.
        adiag = np.ascontiguousarray(kmat.T) @ np.ones(n)

    local = assemble_laplacian(grid) if mix < 1.0 else None

    gen = kmat - np.diag(adiag)
    if local is None:
        gen = rate * gen
    else:
        gen = rate * (mix * gen + (1.0 - mix) * local)

    for arr in (kmat, adiag, gen) + (() if local is None else (local,)):
        arr.flags.writeable = False
    return DispersalOperator(
        grid=grid,
        regime=regime,
        rate=float(rate),
        mix=float(mix),
        kmat=kmat,
        adiag=adiag,
        local=local,
        generator=gen,
    )


def apply_operator(op: DispersalOperator, phi: np.ndarray) -> np.ndarray:
    """Apply the assembled operator to a nodal field."""
    phi = np.asarray(phi, dtype=float)
    if phi.shape != (op.grid.n,):
        raise ConfigError(
            f"field length {phi.shape} does not match grid n={op.grid.n}"
        )
    if not np.all(np.isfinite(phi)):
        raise ConfigError("field contains non-finite entries")
    nonlocal_part = op.kmat @ phi - op.adiag * phi
    if op.mix == 1.0:
        return op.rate * nonlocal_part
    if op.mix == 0.0:
        return op.rate * (op.local @ phi)
    return op.rate * (op.mix * nonlocal_part + (1.0 - op.mix) * (op.local @ phi))
