"""Radial dispersal kernels.

Every family is nonnegative, even in the offset, strictly positive at zero
offset, and normalized to unit mass over the whole line, so the kernel value
is k(x, y) = profile(|x - y|).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

# A truncated gaussian carries tail mass erfc(8/sqrt(2)) ~ 1.2e-15 outside
# 8 standard deviations, below every tolerance used in this package.
GAUSSIAN_CUTOFF_STDDEVS = 8.0

_FAMILIES = ("tophat", "gaussian", "cosine")


@dataclass(frozen=True)
class KernelSpec:
    """One radial kernel family with its width parameter.

    family:  'tophat'   constant 1/(2r) on offsets up to r
             'gaussian' normal density with standard deviation r, truncated
                        at GAUSSIAN_CUTOFF_STDDEVS * r
             'cosine'   (pi/(4r)) * cos(pi s/(2r)) on offsets up to r
    width:   the radius r (tophat, cosine) or standard deviation (gaussian)
    """

    family: str
    width: float

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ConfigError(f"unknown kernel family {self.family!r}")
        if not (math.isfinite(self.width) and self.width > 0):
            raise ConfigError(f"kernel width must be positive, got {self.width}")

    @property
    def support_radius(self) -> float:
        """Offset beyond which the profile vanishes (or is truncated)."""
        if self.family == "gaussian":
            return GAUSSIAN_CUTOFF_STDDEVS * self.width
        return self.width

    def profile(self, offset: np.ndarray) -> np.ndarray:
        """Evaluate the radial profile at nonnegative offsets."""
        s = np.asarray(offset, dtype=float)
        r = self.width
        if self.family == "tophat":
            return np.where(s <= r, 1.0 / (2.0 * r), 0.0)
        if self.family == "gaussian":
            dens = np.exp(-0.5 * (s / r) ** 2) / (r * math.sqrt(2.0 * math.pi))
            return np.where(s <= self.support_radius, dens, 0.0)
        # cosine: integrates to one over [-r, r] by direct antiderivative
        inside = np.cos(0.5 * math.pi * np.minimum(s, r) / r) * (math.pi / (4.0 * r))
        return np.where(s <= r, inside, 0.0)


def tophat(radius: float) -> KernelSpec:
    return KernelSpec("tophat", float(radius))


def gaussian(stddev: float) -> KernelSpec:
    return KernelSpec("gaussian", float(stddev))


def cosine_bump(radius: float) -> KernelSpec:
    return KernelSpec("cosine", float(radius))
