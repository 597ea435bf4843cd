"""Self-contained property suite behind the ``verify`` CLI command.

Each check exercises one claim the package is built on — density scaling
leaves CV untouched, amplitude scaling leaves the fitted feature untouched,
white Gaussian noise shows the Rayleigh CV, mean-normalized histograms
collapse onto one curve, and synthesis round-trips through analysis. All
checks are deterministic for a given seed and sized to run in seconds.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from specamp.histograms import bin_histograms, convergence_metric, scale_density
from specamp.reference import (
    RAYLEIGH_CV,
    triangular_prototype,
    uniform_prototype,
    unit_rayleigh_prototype,
)
from specamp.signal_io import NoiseSpec, generate_noise
from specamp.spectral import StftConfig, stft_magnitudes
from specamp.stats import estimate_bin_statistics, fit_consistent_cv
from specamp.synthesis import ScalingModel, synthesize

DEFAULT_SEED = 7

SCALE_FACTORS = (0.1, 1.0, 3.7, 100.0)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    details: dict

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "details": self.details}


def _shaped_envelope(n_bins: int) -> np.ndarray:
    # smooth 4:1 envelope (1 at the edges, 4 mid-band), scaled to audio level
    k = np.arange(n_bins)
    return 0.25 * (2.5 - 1.5 * np.cos(2.0 * np.pi * k / (n_bins - 1)))


def check_density_scaling() -> CheckResult:
    """Stretching a density by k scales its mean by k and leaves CV fixed."""
    protos = {
        "rayleigh": unit_rayleigh_prototype(),
        "uniform": uniform_prototype(),
        "triangular": triangular_prototype(),
    }
    worst_cv = 0.0
    worst_mean = 0.0
    for proto in protos.values():
        base = proto.as_density()
        cv0, mu0 = base.cv(), base.mean()
        for k in SCALE_FACTORS:
            scaled = scale_density(proto, k)
            worst_cv = max(worst_cv, abs(scaled.cv() - cv0) / cv0)
            worst_mean = max(worst_mean, abs(scaled.mean() - k * mu0) / (k * mu0))
    passed = worst_cv <= 1e-12 and worst_mean <= 1e-12
    return CheckResult(
        "density_scaling",
        passed,
        {
            "shapes": sorted(protos),
            "factors": list(SCALE_FACTORS),
            "max_cv_rel_change": worst_cv,
            "max_mean_rel_error": worst_mean,
        },
    )


def check_scale_invariance(seed: int = DEFAULT_SEED) -> CheckResult:
    """Scaling every sample by 17 must not move cv, rho, or c_s."""
    config = StftConfig()
    signal = generate_noise(
        NoiseSpec(kind="white_gaussian", duration_s=10.0, seed=seed), config.sample_rate_hz
    )
    series = stft_magnitudes(signal, config)
    lam = 17.0
    a = estimate_bin_statistics(series)
    b = estimate_bin_statistics(series.scaled(lam))
    ra, rb = fit_consistent_cv(a), fit_consistent_cv(b)
    lo, hi = ra.included_bins
    rel = lambda x, y: abs(x - y) / abs(x)  # noqa: E731
    worst = max(
        float(np.nanmax(np.abs(a.cv[lo:hi] - b.cv[lo:hi]) / np.abs(a.cv[lo:hi]))),
        rel(ra.rho, rb.rho),
        rel(ra.c_s, rb.c_s),
    )
    mu_err = float(np.max(np.abs(b.mu - lam * a.mu) / np.where(a.mu > 0, lam * a.mu, 1.0)))
    passed = worst <= 1e-12 and mu_err <= 1e-12
    return CheckResult(
        "scale_invariance",
        passed,
        {"lambda": lam, "max_feature_rel_change": worst, "max_mu_rel_error": mu_err},
    )


def check_rayleigh_oracle(seed: int = DEFAULT_SEED, duration_s: float = 60.0) -> CheckResult:
    """White Gaussian noise must show the Rayleigh CV in every interior bin."""
    config = StftConfig()
    signal = generate_noise(
        NoiseSpec(kind="white_gaussian", duration_s=duration_s, seed=seed), config.sample_rate_hz
    )
    series = stft_magnitudes(signal, config)
    stats = estimate_bin_statistics(series)
    report = fit_consistent_cv(stats)
    lo, hi = report.included_bins
    max_dev = float(np.max(np.abs(stats.cv[lo:hi] - RAYLEIGH_CV)))
    c_s_dev = abs(report.c_s - RAYLEIGH_CV)
    passed = max_dev <= 0.02 and c_s_dev <= 0.01
    return CheckResult(
        "rayleigh_oracle",
        passed,
        {
            "duration_s": duration_s,
            "n_frames": report.n_frames,
            "expected_cv": RAYLEIGH_CV,
            "max_cv_deviation": max_dev,
            "c_s_deviation": c_s_dev,
        },
    )


def check_histogram_convergence(seed: int = DEFAULT_SEED, duration_s: float = 60.0) -> CheckResult:
    """Mean-normalization must collapse shaped-noise histograms onto one curve."""
    config = StftConfig()
    spec = NoiseSpec(
        kind="filtered_gaussian",
        duration_s=duration_s,
        seed=seed,
        envelope=tuple(_shaped_envelope(config.n_bins)),
    )
    signal = generate_noise(spec, config.sample_rate_hz)
    series = stft_magnitudes(signal, config)
    normalized = convergence_metric(bin_histograms(series, normalized=True))
    raw = convergence_metric(bin_histograms(series, normalized=False))
    passed = normalized < 0.5 * raw
    return CheckResult(
        "histogram_convergence",
        passed,
        {"normalized_dispersion": normalized, "raw_dispersion": raw, "required_ratio": 0.5},
    )


def check_round_trip(seed: int = DEFAULT_SEED, n_frames: int = 4096) -> CheckResult:
    """Synthesize from a known model, re-analyze, recover the model."""
    config = StftConfig()
    proto = unit_rayleigh_prototype()
    envelope = _shaped_envelope(config.n_bins)
    model = ScalingModel(envelope=envelope, prototype=proto, config=config)
    signal = synthesize(model, n_frames, seed)
    series = stft_magnitudes(signal, config)
    stats = estimate_bin_statistics(series)
    report = fit_consistent_cv(stats)
    lo, hi = report.included_bins
    cv_dev = float(np.max(np.abs(stats.cv[lo:hi] - proto.cv0)))
    # recovered mu should be proportional to the envelope; compare shapes
    ratio = stats.mu[lo:hi] / envelope[lo:hi]
    env_err = float(np.max(np.abs(ratio / ratio.mean() - 1.0)))
    passed = report.rho >= 0.99 and cv_dev <= 0.03 and env_err <= 0.10
    return CheckResult(
        "round_trip",
        passed,
        {
            "n_frames": n_frames,
            "rho": report.rho,
            "max_cv_deviation": cv_dev,
            "max_envelope_rel_error": env_err,
            "peak_amplitude": signal.peak_amplitude,
        },
    )


def run_all(seed: int = DEFAULT_SEED) -> dict:
    """Run every check; overall pass only if each one passes."""
    checks = [
        check_density_scaling(),
        check_scale_invariance(seed),
        check_rayleigh_oracle(seed),
        check_histogram_convergence(seed),
        check_round_trip(seed),
    ]
    return {"passed": all(c.passed for c in checks), "checks": [c.to_dict() for c in checks]}
