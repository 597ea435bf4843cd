"""Short-time spectral analysis: framing, windowing, amplitude series.

Produces the per-frame one-sided amplitude spectra that every statistic in
this package consumes. Magnitudes only; phase is never retained here.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from specamp import backend
from specamp.signal_io import Signal

WINDOWS = ("hamming", "rectangular")

_MAGIC = b"SPECAMP1"
_WINDOW_IDS = {name: i for i, name in enumerate(WINDOWS)}


def hamming_window(n: int) -> np.ndarray:
    """Symmetric Hamming window: w[i] = 0.54 - 0.46*cos(2*pi*i/(n-1))."""
    if n < 2:
        raise ValueError(f"window length must be >= 2, got {n}")
    i = np.arange(n, dtype=np.float64)
    return 0.54 - 0.46 * np.cos(2.0 * np.pi * i / (n - 1))


@dataclass(frozen=True)
class StftConfig:
    """Analysis grid: frame length, hop, window type, and sample rate."""

    frame_len: int = 512
    hop: int = 256
    window: str = "hamming"
    sample_rate_hz: int = 16000

    def __post_init__(self):
        if self.frame_len < 2 or self.frame_len & (self.frame_len - 1):
            raise ValueError(f"frame_len must be a power of two >= 2, got {self.frame_len}")
        if not 1 <= self.hop <= self.frame_len:
            raise ValueError(f"hop must be in [1, frame_len], got {self.hop}")
        if self.window not in WINDOWS:
            raise ValueError(f"window must be one of {WINDOWS}, got {self.window!r}")
        if self.sample_rate_hz <= 0:
            raise ValueError(f"sample_rate_hz must be positive, got {self.sample_rate_hz}")

    @property
    def n_bins(self) -> int:
        return self.frame_len // 2 + 1

    def window_values(self) -> np.ndarray:
        if self.window == "hamming":
            return hamming_window(self.frame_len)
        return np.ones(self.frame_len, dtype=np.float64)

    def to_dict(self) -> dict:
        return {
            "frame_len": self.frame_len,
            "hop": self.hop,
            "window": self.window,
            "sample_rate_hz": self.sample_rate_hz,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "StftConfig":
        return cls(
            frame_len=int(d["frame_len"]),
            hop=int(d["hop"]),
            window=str(d["window"]),
            sample_rate_hz=int(d["sample_rate_hz"]),
        )


@dataclass(frozen=True, eq=False)
class SpectrumSeries:
    """Per-frame, per-bin amplitude magnitudes plus the grid that made them."""

    amplitudes: np.ndarray  # (n_frames, n_bins), non-negative
    config: StftConfig

    def __post_init__(self):
        if self.amplitudes.ndim != 2:
            raise ValueError("amplitudes must be a 2-D (n_frames, n_bins) array")
        if self.amplitudes.shape[1] != self.config.n_bins:
            raise ValueError(
                f"amplitude matrix has {self.amplitudes.shape[1]} bins, "
                f"config implies {self.config.n_bins}"
            )
        if self.amplitudes.size and self.amplitudes.min() < 0:
            raise ValueError("amplitudes must be non-negative magnitudes")

    @property
    def n_frames(self) -> int:
        return self.amplitudes.shape[0]

    @property
    def n_bins(self) -> int:
        return self.amplitudes.shape[1]

    @property
    def bin_freqs_hz(self) -> np.ndarray:
        c = self.config
        return np.arange(c.n_bins, dtype=np.float64) * (c.sample_rate_hz / c.frame_len)

    def scaled(self, factor: float) -> "SpectrumSeries":
        return SpectrumSeries(self.amplitudes * factor, self.config)


def stft_magnitudes(signal: Signal, config: StftConfig) -> SpectrumSeries:
    """Frame, window, and transform a signal into its amplitude series.

    Frames start at offsets 0, hop, 2*hop, ... and trailing samples that do
    not fill a whole frame are dropped.
    """
    if signal.sample_rate_hz != config.sample_rate_hz:
        raise ValueError(
            f"signal sample rate {signal.sample_rate_hz} != config {config.sample_rate_hz}"
        )
    if len(signal.samples) < config.frame_len:
        raise ValueError(
            f"signal has {len(signal.samples)} samples; need at least one "
            f"frame of {config.frame_len}"
        )
    mags = backend.kernels().frame_magnitudes(
        np.asarray(signal.samples, dtype=np.float64),
        config.frame_len,
        config.hop,
        config.window_values(),
    )
    return SpectrumSeries(mags, config)


def save_series_csv(series: SpectrumSeries, path) -> None:
    """One row per frame; header is the bin frequencies in Hz."""
    with open(path, "w", encoding="utf-8") as f:
        f.write(",".join(repr(float(v)) for v in series.bin_freqs_hz) + "\n")
        for row in series.amplitudes:
            f.write(",".join(repr(float(v)) for v in row) + "\n")


def save_series(series: SpectrumSeries, path) -> None:
    """Compact binary dump: magic, grid parameters, row-major float64 data."""
    a = np.ascontiguousarray(series.amplitudes, dtype="<f8")
    c = series.config
    header = _MAGIC + struct.pack(
        "<IIIIQQ",
        c.frame_len,
        c.hop,
        _WINDOW_IDS[c.window],
        c.sample_rate_hz,
        a.shape[0],
        a.shape[1],
    )
    Path(path).write_bytes(header + a.tobytes())


def load_series(path) -> SpectrumSeries:
    """Read a binary dump written by :func:`save_series`."""
    blob = Path(path).read_bytes()
    if blob[: len(_MAGIC)] != _MAGIC:
        raise ValueError(f"{path}: not a specamp spectrum dump (bad magic)")
    frame_len, hop, window_id, rate, n_frames, n_bins = struct.unpack_from(
        "<IIIIQQ", blob, len(_MAGIC)
    )
    offset = len(_MAGIC) + struct.calcsize("<IIIIQQ")
    expected = n_frames * n_bins * 8
    if len(blob) - offset != expected:
        raise ValueError(f"{path}: truncated dump ({len(blob) - offset} data bytes, want {expected})")
    data = np.frombuffer(blob, dtype="<f8", offset=offset).reshape(n_frames, n_bins).copy()
    config = StftConfig(
        frame_len=frame_len, hop=hop, window=WINDOWS[window_id], sample_rate_hz=rate
    )
    return SpectrumSeries(data, config)
