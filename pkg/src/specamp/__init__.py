"""Spectral-amplitude statistics toolkit.

Analyzes how the short-time amplitude spectrum of noise-like sound is
distributed: per-bin mean/deviation statistics, the consistent-CV feature
tying them together, mean-normalized histogram families and their common
prototype, and model-based synthesis for round-trip verification.
"""

from specamp import backend
from specamp.histograms import (
    BinHistogram,
    GridDensity,
    HistogramFamily,
    PrototypeDistribution,
    bin_histograms,
    convergence_metric,
    estimate_prototype,
    grid_edges,
    save_family_csv,
    scale_density,
)
from specamp.reference import (
    RAYLEIGH_CV,
    triangular_prototype,
    uniform_prototype,
    unit_rayleigh_cdf,
    unit_rayleigh_pdf,
    unit_rayleigh_prototype,
)
from specamp.signal_io import (
    NoiseSpec,
    Signal,
    generate_noise,
    read_wav,
    write_wav,
)
from specamp.spectral import (
    SpectrumSeries,
    StftConfig,
    hamming_window,
    load_series,
    save_series,
    save_series_csv,
    stft_magnitudes,
)
from specamp.stats import (
    BinStatistics,
    CvReport,
    correlation_mu_sigma,
    default_bin_span,
    estimate_bin_statistics,
    fit_consistent_cv,
    pearson_mu_sigma,
    save_stats_csv,
)
from specamp.synthesis import ScalingModel, sample_prototype, synthesize

__version__ = "0.1.0"

__all__ = [
    "BinHistogram",
    "BinStatistics",
    "CvReport",
    "GridDensity",
    "HistogramFamily",
    "NoiseSpec",
    "PrototypeDistribution",
    "RAYLEIGH_CV",
    "ScalingModel",
    "Signal",
    "SpectrumSeries",
    "StftConfig",
    "backend",
    "bin_histograms",
    "convergence_metric",
    "correlation_mu_sigma",
    "default_bin_span",
    "estimate_bin_statistics",
    "estimate_prototype",
    "fit_consistent_cv",
    "generate_noise",
    "grid_edges",
    "hamming_window",
    "load_series",
    "pearson_mu_sigma",
    "read_wav",
    "sample_prototype",
    "save_family_csv",
    "save_series",
    "save_series_csv",
    "save_stats_csv",
    "scale_density",
    "stft_magnitudes",
    "synthesize",
    "triangular_prototype",
    "uniform_prototype",
    "unit_rayleigh_cdf",
    "unit_rayleigh_pdf",
    "unit_rayleigh_prototype",
    "write_wav",
    "__version__",
]
