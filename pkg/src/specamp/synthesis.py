"""Noise synthesis from the scaling model: one shared amplitude shape,
one scale factor per frequency bin.

Every frame draws each bin's amplitude as envelope[k] times an independent
sample of the unit-mean prototype, phases are uniform, and frames are
rejoined by windowed overlap-add. Synthesis never rescales its output —
doubling the envelope must double the recovered per-bin means — so callers
writing audio are responsible for level.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from specamp import backend
from specamp.histograms import PrototypeDistribution
from specamp.signal_io import Signal
from specamp.spectral import StftConfig

MU0_TOLERANCE = 0.02


@dataclass(frozen=True, eq=False)
class ScalingModel:
    """Per-bin scale envelope plus the shared unit-mean prototype.

    Because the prototype has mean 1, envelope[k] is also the target mean
    amplitude of bin k in the synthesized signal.
    """

    envelope: np.ndarray
    prototype: PrototypeDistribution
    config: StftConfig

    def __post_init__(self):
        object.__setattr__(self, "envelope", np.asarray(self.envelope, dtype=float))
        if self.envelope.ndim != 1 or len(self.envelope) != self.config.n_bins:
            raise ValueError(
                f"envelope must have {self.config.n_bins} entries for "
                f"frame_len {self.config.frame_len}, got {self.envelope.shape}"
            )
        if np.any(self.envelope < 0):
            raise ValueError("envelope gains must be non-negative")
        if abs(self.prototype.mu0 - 1.0) > MU0_TOLERANCE:
            raise ValueError(
                f"prototype mean must be within {MU0_TOLERANCE} of 1, got {self.prototype.mu0:.4f}"
            )

    def to_dict(self) -> dict:
        return {
            "envelope": [float(v) for v in self.envelope],
            "prototype": self.prototype.to_dict(),
            "config": self.config.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ScalingModel":
        return cls(
            envelope=np.asarray(d["envelope"], dtype=float),
            prototype=PrototypeDistribution.from_dict(d["prototype"]),
            config=StftConfig.from_dict(d["config"]),
        )

    def save_json(self, path) -> None:
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_dict(), f)
            f.write("\n")

    @classmethod
    def load_json(cls, path) -> "ScalingModel":
        with open(path, encoding="utf-8") as f:
            return cls.from_dict(json.load(f))


def _quantiles(proto: PrototypeDistribution, u: np.ndarray) -> np.ndarray:
    """Map uniforms through the prototype's inverse CDF.

    The CDF of a piecewise-constant density is piecewise linear through the
    bucket edges, so linear interpolation inverts it exactly and draws land
    uniformly inside each bucket.
    """
    mass = proto.density * np.diff(proto.edges)
    total = mass.sum()
    if total <= 0:
        raise ValueError("prototype density has no mass to sample from")
    cdf = np.concatenate(([0.0], np.cumsum(mass) / total))
    return np.interp(u, cdf, proto.edges)


def sample_prototype(proto: PrototypeDistribution, n: int, seed: int) -> np.ndarray:
    """Draw n amplitudes from the prototype, deterministic per seed."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    return _quantiles(proto, rng.random(n))


def _ola_window(frame_len: int) -> np.ndarray:
    # sine window: squares of half-overlapped copies sum to exactly 1
    return np.sin(np.pi * np.arange(frame_len) / frame_len)


def synthesize(model: ScalingModel, n_frames: int, seed: int) -> Signal:
    """Generate a signal whose bin-k amplitude distribution is the scaled prototype.

    Per frame: amplitudes envelope[k] * prototype draw, phases uniform on
    [0, 2pi) for interior bins; DC and Nyquist stay real with a random sign.
    Frames go through the inverse transform and windowed overlap-add with
    squared-window compensation, which keeps per-sample variance flat from
    edge to edge. Draw order is fixed (all amplitude uniforms, then all
    phase uniforms), so (model, n_frames, seed) determines every sample.
    """
    if n_frames < 1:
        raise ValueError(f"n_frames must be >= 1, got {n_frames}")
    config = model.config
    n_bins = config.n_bins
    rng = np.random.default_rng(seed)
    u_amp = rng.random((n_frames, n_bins))
    u_phase = rng.random((n_frames, n_bins))

    draws = _quantiles(model.prototype, u_amp.ravel()).reshape(n_frames, n_bins)
    amplitudes = draws * model.envelope
    spectra = amplitudes * np.exp(2j * np.pi * u_phase)
    for edge in (0, n_bins - 1):
        spectra[:, edge] = amplitudes[:, edge] * np.where(u_phase[:, edge] < 0.5, 1.0, -1.0)

    kern = backend.kernels()
    frames = kern.irfft_frames(spectra)
    samples = kern.overlap_add(frames, _ola_window(config.frame_len), config.hop)
    if not np.all(np.isfinite(samples)):
        raise ValueError("synthesis produced non-finite samples")
    return Signal(samples=samples, sample_rate_hz=config.sample_rate_hz)
