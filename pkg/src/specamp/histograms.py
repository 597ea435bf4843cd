"""Per-bin amplitude histograms, normalized-histogram families, and the
prototype distribution they converge to.

Normalization divides each frequency bin's amplitudes by that bin's own
sample mean before binning, which removes scale and leaves only shape; a
family of normalized histograms from a scaling-model signal collapses onto
one central curve, estimated here as the prototype.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from specamp import backend
from specamp.spectral import SpectrumSeries

NORMALIZED_GRID_MAX = 5.0  # unit-mean amplitudes with CV ~ 0.5 have no visible tail past 5
DEFAULT_BUCKETS = 64


def grid_edges(n_buckets: int = DEFAULT_BUCKETS, grid_max: float = NORMALIZED_GRID_MAX):
    return np.linspace(0.0, grid_max, n_buckets + 1)


@dataclass(frozen=True, eq=False)
class GridDensity:
    """A probability density on a shared bucket grid."""

    edges: np.ndarray  # B+1, strictly increasing
    density: np.ndarray  # B, non-negative

    def __post_init__(self):
        object.__setattr__(self, "edges", np.asarray(self.edges, dtype=np.float64))
        object.__setattr__(self, "density", np.asarray(self.density, dtype=np.float64))
        if len(self.edges) != len(self.density) + 1:
            raise ValueError("edges must have exactly one more entry than density")
        if np.any(np.diff(self.edges) <= 0):
            raise ValueError("edges must be strictly increasing")

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.edges)

    @property
    def midpoints(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    def integral(self) -> float:
        return float(np.sum(self.density * self.widths))

    def mean(self) -> float:
        return float(np.sum(self.midpoints * self.density * self.widths))

    def variance(self) -> float:
        mu = self.mean()
        return float(np.sum((self.midpoints - mu) ** 2 * self.density * self.widths))

    def std(self) -> float:
        return float(np.sqrt(self.variance()))

    def cv(self) -> float:
        """Standard deviation over mean of the gridded density."""
        return self.std() / self.mean()


@dataclass(frozen=True, eq=False)
class BinHistogram:
    """Empirical amplitude distribution of one frequency bin."""

    edges: np.ndarray
    counts: np.ndarray  # int64, overflow clamped into the last bucket
    density: np.ndarray  # counts scaled to integrate to 1
    bin_index: int
    normalized: bool
    overflow: int = 0  # values strictly above the top edge

    @property
    def n_values(self) -> int:
        return int(self.counts.sum())

    def as_density(self) -> GridDensity:
        return GridDensity(self.edges, self.density)


@dataclass(frozen=True, eq=False)
class HistogramFamily:
    """Per-bin histograms on one shared grid, with their central curve.

    ``central`` is the pointwise mean of the member densities and
    ``dispersion`` their mean pairwise L1 distance. ``excluded_bins`` lists
    bins skipped because their mean was zero (normalized mode only).
    """

    members: tuple[BinHistogram, ...]
    central: np.ndarray
    dispersion: float
    normalized: bool
    excluded_bins: tuple[int, ...] = ()

    @property
    def edges(self) -> np.ndarray:
        return self.members[0].edges

    def member_densities(self) -> np.ndarray:
        return np.asarray([m.density for m in self.members])


@dataclass(frozen=True, eq=False)
class PrototypeDistribution:
    """Unit-mean central density with its grid moments."""

    edges: np.ndarray
    density: np.ndarray
    mu0: float
    sigma0: float

    @property
    def cv0(self) -> float:
        return self.sigma0 / self.mu0

    def as_density(self) -> GridDensity:
        return GridDensity(self.edges, self.density)

    @classmethod
    def from_density(cls, edges, density) -> "PrototypeDistribution":
        g = GridDensity(np.asarray(edges, float), np.asarray(density, float))
        total = g.integral()
        if total <= 0:
            raise ValueError("density must have positive mass")
        g = GridDensity(g.edges, g.density / total)
        return cls(g.edges, g.density, g.mean(), g.std())

    def to_dict(self) -> dict:
        return {"edges": [float(e) for e in self.edges], "density": [float(d) for d in self.density]}

    @classmethod
    def from_dict(cls, d: dict) -> "PrototypeDistribution":
        return cls.from_density(d["edges"], d["density"])


def _mean_pairwise_l1(densities: np.ndarray, width: float) -> float:
    m = densities.shape[0]
    total = 0.0
    for i in range(m - 1):
        total += float(np.abs(densities[i + 1 :] - densities[i]).sum())
    return total * width / (m * (m - 1) / 2)


def bin_histograms(
    series: SpectrumSeries,
    n_buckets: int = DEFAULT_BUCKETS,
    normalized: bool = True,
    bin_span: tuple[int, int] | None = None,
) -> HistogramFamily:
    """Histogram every included bin's amplitudes on one shared grid.

    Normalized mode divides each bin's amplitudes by that bin's sample mean
    first and uses the fixed [0, 5] grid; raw mode spans [0, max amplitude].
    Values above the top edge land in the last bucket and are counted as
    overflow. Bins whose mean is zero are excluded (normalized mode) and
    reported in the family.
    """
    if n_buckets < 8:
        raise ValueError(f"n_buckets must be >= 8, got {n_buckets}")
    if series.n_frames < 2:
        raise ValueError("need at least 2 frames to histogram")
    from specamp.stats import default_bin_span

    lo, hi = bin_span if bin_span is not None else default_bin_span(series.n_bins)
    if not 0 <= lo < hi <= series.n_bins:
        raise ValueError(f"bin span [{lo}, {hi}) out of range for {series.n_bins} bins")

    cols = series.amplitudes[:, lo:hi]
    kern = backend.kernels()
    mu, _ = kern.column_mean_var(cols)
    indices = np.arange(lo, hi)

    if normalized:
        keep = mu > 0.0
        excluded = tuple(int(b) for b in indices[~keep])
        if not np.any(keep):
            raise ValueError("every included bin has zero mean; nothing to histogram")
        cols = cols[:, keep]
        indices = indices[keep]
        scales = mu[keep]
        grid_top = NORMALIZED_GRID_MAX
    else:
        excluded = ()
        scales = np.ones(cols.shape[1])
        grid_top = float(cols.max())
        if grid_top <= 0.0:
            raise ValueError("all amplitudes are zero; raw histogram grid would be empty")

    counts, overflow = kern.column_histograms(cols, scales, grid_top, n_buckets)
    edges = np.linspace(0.0, grid_top, n_buckets + 1)
    width = grid_top / n_buckets
    members = []
    for j, b in enumerate(indices):
        total = counts[j].sum()
        members.append(
            BinHistogram(
                edges=edges,
                counts=counts[j],
                density=counts[j] / (total * width),
                bin_index=int(b),
                normalized=normalized,
                overflow=int(overflow[j]),
            )
        )
    densities = np.asarray([m.density for m in members])
    central = densities.mean(axis=0)
    dispersion = _mean_pairwise_l1(densities, width) if len(members) > 1 else 0.0
    return HistogramFamily(
        members=tuple(members),
        central=central,
        dispersion=dispersion,
        normalized=normalized,
        excluded_bins=excluded,
    )


def convergence_metric(family: HistogramFamily) -> float:
    """Mean pairwise L1 distance between member densities (0 = identical)."""
    if len(family.members) < 2:
        raise ValueError("need at least 2 histograms to measure convergence")
    densities = family.member_densities()
    widths = np.diff(family.edges)
    if np.allclose(widths, widths[0]):
        return _mean_pairwise_l1(densities, float(widths[0]))
    m = densities.shape[0]
    total = 0.0
    for i in range(m - 1):
        total += float((np.abs(densities[i + 1 :] - densities[i]) * widths).sum())
    return total / (m * (m - 1) / 2)


def estimate_prototype(family: HistogramFamily) -> PrototypeDistribution:
    """Average the normalized member densities into the central prototype."""
    if not family.normalized:
        raise ValueError("prototype estimation requires a normalized histogram family")
    mean_density = family.member_densities().mean(axis=0)
    return PrototypeDistribution.from_density(family.edges, mean_density)


def scale_density(proto, k: float) -> GridDensity:
    """Stretch a density by a positive scale: grid k*edges, values density/k.

    Pure change of variables for x -> k*x, so the mass, shape, and the
    ratio of standard deviation to mean are all preserved while the mean
    becomes k times the original.
    """
    if k <= 0:
        raise ValueError(f"scale factor must be positive, got {k}")
    return GridDensity(np.asarray(proto.edges) * k, np.asarray(proto.density) / k)


def save_family_csv(family: HistogramFamily, path) -> None:
    """Plot-ready CSV: bucket midpoints, one column per bin, central last."""
    edges = family.edges
    mids = 0.5 * (edges[:-1] + edges[1:])
    names = ["midpoint"] + [f"bin_{m.bin_index}" for m in family.members] + ["central"]
    columns = [mids] + [m.density for m in family.members] + [family.central]
    with open(path, "w", encoding="utf-8") as f:
        f.write(",".join(names) + "\n")
        for row in zip(*columns):
            f.write(",".join(repr(float(v)) for v in row) + "\n")
