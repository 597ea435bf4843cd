"""Per-bin amplitude statistics and the consistent-CV feature.

Each frequency bin's amplitudes over time are summarized by mean and
standard deviation; across bins those two track each other almost exactly
for unvoiced noise-like sound, so their uncentered correlation is near 1
and a single proportionality coefficient c_s = sigma/mu describes every
bin at once. This module estimates the per-bin statistics and fits that
coefficient.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from specamp import backend
from specamp.spectral import SpectrumSeries


def default_bin_span(n_bins: int) -> tuple[int, int]:
    """Half-open bin range excluding DC and the Nyquist bin.

    DC of windowed real audio reflects recording offset rather than the
    sound process, and the Nyquist bin (like DC) has a real-only spectrum
    with different amplitude statistics than the interior bins.
    """
    if n_bins < 3:
        raise ValueError(f"need at least 3 bins to have an interior, got {n_bins}")
    return (1, n_bins - 1)


@dataclass(frozen=True, eq=False)
class BinStatistics:
    """Mean, variance, standard deviation, and CV per frequency bin.

    ``cv`` is NaN wherever the bin mean is zero (undefined ratio).
    """

    mu: np.ndarray
    var: np.ndarray
    sigma: np.ndarray
    cv: np.ndarray
    n_frames: int

    def __post_init__(self):
        for name in ("mu", "var", "sigma", "cv"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        n = len(self.mu)
        if not (len(self.var) == len(self.sigma) == len(self.cv) == n):
            raise ValueError("mu, var, sigma, cv must have equal length")
        if self.n_frames < 2:
            raise ValueError(f"statistics need at least 2 frames, got {self.n_frames}")
        if np.any(self.mu < 0) or np.any(self.var < 0):
            raise ValueError("mu and var must be non-negative")
        if not np.allclose(self.sigma, np.sqrt(self.var), rtol=1e-9, atol=0):
            raise ValueError("sigma must equal sqrt(var)")

    @property
    def n_bins(self) -> int:
        return len(self.mu)

    @classmethod
    def from_mu_sigma(cls, mu, sigma, n_frames: int) -> "BinStatistics":
        mu = np.asarray(mu, dtype=float)
        sigma = np.asarray(sigma, dtype=float)
        return cls(mu, sigma * sigma, sigma, _safe_cv(mu, sigma), n_frames)

    def to_dict(self) -> dict:
        return {
            "mu": [float(v) for v in self.mu],
            "var": [float(v) for v in self.var],
            "sigma": [float(v) for v in self.sigma],
            "cv": [None if np.isnan(v) else float(v) for v in self.cv],
            "n_frames": self.n_frames,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BinStatistics":
        cv = np.asarray([np.nan if v is None else v for v in d["cv"]], dtype=float)
        return cls(d["mu"], d["var"], d["sigma"], cv, d["n_frames"])


@dataclass(frozen=True)
class CvReport:
    """The fitted consistent CV with its supporting diagnostics.

    rho is the uncentered correlation of sigma against mu; rho_centered is
    the mean-subtracted (Pearson) variant, kept as a secondary diagnostic
    because the two differ in interpretation. Bins whose mean is zero are
    left out of the fit and counted in n_zero_mean_excluded.
    """

    rho: float
    c_s: float
    per_bin_cv_spread: float
    included_bins: tuple[int, int]  # half-open [lo, hi)
    n_frames: int
    rho_centered: float = float("nan")
    n_zero_mean_excluded: int = 0

    def __post_init__(self):
        if not np.isnan(self.rho) and not 0.0 <= self.rho <= 1.0:
            raise ValueError(f"rho must lie in [0, 1], got {self.rho}")
        if self.c_s < 0 or self.per_bin_cv_spread < 0:
            raise ValueError("c_s and per_bin_cv_spread must be non-negative")

    def to_dict(self) -> dict:
        def opt(v):
            return None if np.isnan(v) else float(v)

        return {
            "rho": opt(self.rho),
            "c_s": float(self.c_s),
            "per_bin_cv_spread": float(self.per_bin_cv_spread),
            "included_bins": [self.included_bins[0], self.included_bins[1]],
            "n_frames": self.n_frames,
            "rho_centered": opt(self.rho_centered),
            "n_zero_mean_excluded": self.n_zero_mean_excluded,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CvReport":
        def val(v):
            return float("nan") if v is None else float(v)

        return cls(
            rho=val(d["rho"]),
            c_s=float(d["c_s"]),
            per_bin_cv_spread=float(d["per_bin_cv_spread"]),
            included_bins=(int(d["included_bins"][0]), int(d["included_bins"][1])),
            n_frames=int(d["n_frames"]),
            rho_centered=val(d.get("rho_centered")),
            n_zero_mean_excluded=int(d.get("n_zero_mean_excluded", 0)),
        )

    def save_json(self, path) -> None:
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_dict(), f, indent=2)
            f.write("\n")

    @classmethod
    def load_json(cls, path) -> "CvReport":
        with open(path, encoding="utf-8") as f:
            return cls.from_dict(json.load(f))


def _safe_cv(mu: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    cv = np.full(len(mu), np.nan)
    np.divide(sigma, mu, out=cv, where=mu > 0)
    return cv


def estimate_bin_statistics(series: SpectrumSeries) -> BinStatistics:
    """Column-wise mean and unbiased variance (n-1 divisor) per bin."""
    if series.n_frames < 2:
        raise ValueError(f"need at least 2 frames, got {series.n_frames}")
    mu, var = backend.kernels().column_mean_var(series.amplitudes)
    sigma = np.sqrt(var)
    return BinStatistics(mu=mu, var=var, sigma=sigma, cv=_safe_cv(mu, sigma), n_frames=series.n_frames)


def _resolve_span(stats: BinStatistics, included_bins) -> tuple[int, int]:
    lo, hi = included_bins if included_bins is not None else default_bin_span(stats.n_bins)
    if not 0 <= lo < hi <= stats.n_bins:
        raise ValueError(f"included bins [{lo}, {hi}) out of range for {stats.n_bins} bins")
    return int(lo), int(hi)


def _uncentered(x: np.ndarray, y: np.ndarray) -> float:
    den = np.sqrt(np.dot(x, x)) * np.sqrt(np.dot(y, y))
    if den == 0.0:
        return float("nan")
    return min(float(np.dot(x, y) / den), 1.0)


def correlation_mu_sigma(stats: BinStatistics, included_bins: tuple[int, int] | None = None) -> float:
    """Uncentered (cosine) correlation of sigma against mu over the range.

    This is the sum-of-products form with no mean subtraction; NaN when
    either sequence is identically zero over the range. For the Pearson
    variant see pearson_mu_sigma.
    """
    lo, hi = _resolve_span(stats, included_bins)
    return _uncentered(stats.mu[lo:hi], stats.sigma[lo:hi])


def pearson_mu_sigma(stats: BinStatistics, included_bins: tuple[int, int] | None = None) -> float:
    """Mean-centered correlation of sigma against mu (secondary diagnostic)."""
    lo, hi = _resolve_span(stats, included_bins)
    mu = stats.mu[lo:hi]
    sigma = stats.sigma[lo:hi]
    mu_c = mu - mu.mean()
    sigma_c = sigma - sigma.mean()
    den = np.sqrt(np.dot(mu_c, mu_c)) * np.sqrt(np.dot(sigma_c, sigma_c))
    if den == 0.0:
        return float("nan")
    return float(np.dot(mu_c, sigma_c) / den)


def fit_consistent_cv(stats: BinStatistics, included_bins: tuple[int, int] | None = None) -> CvReport:
    """Least-squares fit of sigma = c_s * mu over the included bins.

    c_s minimizes the sum of squared residuals, giving sum(sigma*mu) /
    sum(mu^2) — a mu^2-weighted mean of the per-bin CVs, so it always lies
    between their min and max. Zero-mean bins are dropped from the fit and
    counted; rho is the uncentered correlation over the surviving bins.
    """
    lo, hi = _resolve_span(stats, included_bins)
    mu = stats.mu[lo:hi]
    sigma = stats.sigma[lo:hi]
    keep = mu > 0.0
    n_excluded = int(np.count_nonzero(~keep))
    if not np.any(keep):
        raise ValueError(f"every bin in [{lo}, {hi}) has zero mean")
    mu = mu[keep]
    sigma = sigma[keep]
    c_s = float(np.dot(sigma, mu) / np.dot(mu, mu))
    cv = sigma / mu
    return CvReport(
        rho=_uncentered(mu, sigma),
        c_s=c_s,
        per_bin_cv_spread=float(np.std(cv)),
        included_bins=(lo, hi),
        n_frames=stats.n_frames,
        rho_centered=pearson_mu_sigma(stats, (lo, hi)),
        n_zero_mean_excluded=n_excluded,
    )


def save_stats_csv(stats: BinStatistics, bin_freqs_hz: np.ndarray, path) -> None:
    """Plot-ready CSV of (bin_freq_hz, mu, sigma, cv), one row per bin."""
    if len(bin_freqs_hz) != stats.n_bins:
        raise ValueError(f"expected {stats.n_bins} frequencies, got {len(bin_freqs_hz)}")
    with open(path, "w", encoding="utf-8") as f:
        f.write("bin_freq_hz,mu,sigma,cv\n")
        for freq, mu, sigma, cv in zip(bin_freqs_hz, stats.mu, stats.sigma, stats.cv):
            f.write(f"{float(freq)!r},{float(mu)!r},{float(sigma)!r},{float(cv)!r}\n")
