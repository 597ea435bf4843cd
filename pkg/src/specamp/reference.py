"""Closed-form reference distributions on the shared bucket grid.

The magnitude of a complex Gaussian spectral coefficient is Rayleigh, and
the unit-mean Rayleigh density is p(a) = (pi*a/2) * exp(-pi*a^2/4) with a
coefficient of variation of sqrt(4/pi - 1) regardless of scale. That makes
white Gaussian noise an analytic oracle for the whole pipeline. The uniform
and triangular shapes are simple unit-mean alternatives for invariance
checks that should not depend on the particular prototype.
"""

from __future__ import annotations

import numpy as np

from specamp.histograms import (
    DEFAULT_BUCKETS,
    NORMALIZED_GRID_MAX,
    PrototypeDistribution,
    grid_edges,
)

RAYLEIGH_CV = float(np.sqrt(4.0 / np.pi - 1.0))  # ~0.5227, scale-free


def unit_rayleigh_pdf(a):
    """Density of a Rayleigh variable rescaled to mean 1."""
    a = np.asarray(a, dtype=float)
    return 0.5 * np.pi * a * np.exp(-0.25 * np.pi * a * a)


def unit_rayleigh_cdf(a):
    a = np.asarray(a, dtype=float)
    return 1.0 - np.exp(-0.25 * np.pi * a * a)


def _gridded(cdf, n_buckets, grid_max) -> PrototypeDistribution:
    # exact bucket masses from the CDF, then renormalize the tail away
    edges = grid_edges(n_buckets, grid_max)
    mass = np.diff(cdf(edges))
    return PrototypeDistribution.from_density(edges, mass / np.diff(edges))


def unit_rayleigh_prototype(
    n_buckets: int = DEFAULT_BUCKETS, grid_max: float = NORMALIZED_GRID_MAX
) -> PrototypeDistribution:
    """Unit-mean Rayleigh density sampled onto the bucket grid."""
    return _gridded(unit_rayleigh_cdf, n_buckets, grid_max)


def uniform_prototype(
    n_buckets: int = DEFAULT_BUCKETS, grid_max: float = NORMALIZED_GRID_MAX
) -> PrototypeDistribution:
    """Uniform on [0, 2]: mean 1, cv 1/sqrt(3)."""

    def cdf(a):
        return np.clip(np.asarray(a, dtype=float) / 2.0, 0.0, 1.0)

    return _gridded(cdf, n_buckets, grid_max)


def triangular_prototype(
    n_buckets: int = DEFAULT_BUCKETS, grid_max: float = NORMALIZED_GRID_MAX
) -> PrototypeDistribution:
    """Symmetric triangle on [0, 2] peaking at 1: mean 1, cv 1/sqrt(6)."""

    def cdf(a):
        a = np.clip(np.asarray(a, dtype=float), 0.0, 2.0)
        rising = 0.5 * a * a
        falling = 1.0 - 0.5 * (2.0 - a) * (2.0 - a)
        return np.where(a <= 1.0, rising, falling)

    return _gridded(cdf, n_buckets, grid_max)
