"""NumPy implementations of the hot kernels.

This module mirrors the interface of the compiled ``specamp._kernels``
extension; whichever is selected at import time, callers see the same five
functions. Column reductions accumulate block-pairwise so sums over tens of
thousands of frames do not drift.
"""

from __future__ import annotations

import numpy as np

NAME = "python"

_BLOCK = 512  # rows per partial sum in column reductions


def _column_sum(a: np.ndarray) -> np.ndarray:
    """Sum rows of a 2-D array, pairwise over row blocks."""
    parts = [a[i : i + _BLOCK].sum(axis=0) for i in range(0, a.shape[0], _BLOCK)]
    return np.add.reduce(np.asarray(parts), axis=0)


def frame_magnitudes(x, frame_len, hop, window):
    """One-sided spectrum magnitudes of consecutive windowed frames.

    Frames start at offsets 0, hop, 2*hop, ...; trailing samples that do not
    fill a frame are dropped. Returns a (n_frames, frame_len//2 + 1) array.
    """
    x = np.asarray(x, dtype=np.float64)
    window = np.asarray(window, dtype=np.float64)
    if window.shape[0] != frame_len:
        raise ValueError(f"window length {window.shape[0]} != frame_len {frame_len}")
    if hop < 1:
        raise ValueError(f"hop must be >= 1, got {hop}")
    if x.shape[0] < frame_len:
        raise ValueError(f"signal of {x.shape[0]} samples is shorter than one frame")
    n_frames = (x.shape[0] - frame_len) // hop + 1
    out = np.empty((n_frames, frame_len // 2 + 1), dtype=np.float64)
    # chunked so the intermediate frame matrix stays small
    chunk = max(1, (1 << 22) // frame_len)
    offsets = hop * np.arange(n_frames)
    for lo in range(0, n_frames, chunk):
        hi = min(lo + chunk, n_frames)
        idx = offsets[lo:hi, None] + np.arange(frame_len)[None, :]
        np.abs(np.fft.rfft(x[idx] * window, axis=1), out=out[lo:hi])
    return out


def column_mean_var(a):
    """Per-column mean and unbiased variance (divisor n-1) of a 2-D array."""
    a = np.asarray(a, dtype=np.float64)
    n = a.shape[0]
    if n < 2:
        raise ValueError(f"need at least 2 rows, got {n}")
    mu = _column_sum(a) / n
    ss = _column_sum((a - mu) ** 2)
    return mu, ss / (n - 1)


def column_histograms(a, scales, grid_top, n_buckets):
    """Histogram each column of ``a`` on a shared uniform grid [0, grid_top].

    Column j is divided by scales[j] before binning. Values above the top
    edge are clamped into the last bucket; the strictly-above count per
    column is returned alongside the counts.
    """
    a = np.asarray(a, dtype=np.float64)
    scales = np.asarray(scales, dtype=np.float64)
    n_cols = a.shape[1]
    if scales.shape[0] != n_cols:
        raise ValueError(f"expected {n_cols} scales, got {scales.shape[0]}")
    if n_buckets < 1 or grid_top <= 0.0:
        raise ValueError("need n_buckets >= 1 and grid_top > 0")
    width = grid_top / n_buckets
    counts = np.empty((n_cols, n_buckets), dtype=np.int64)
    overflow = np.empty(n_cols, dtype=np.int64)
    for j in range(n_cols):
        x = a[:, j] / scales[j]
        idx = np.floor(x / width).astype(np.int64)
        np.clip(idx, 0, n_buckets - 1, out=idx)
        counts[j] = np.bincount(idx, minlength=n_buckets)
        overflow[j] = np.count_nonzero(x > grid_top)
    return counts, overflow


def irfft_frames(spec):
    """Inverse one-sided FFT of each row; returns real (n, 2*(bins-1)) frames."""
    spec = np.asarray(spec, dtype=np.complex128)
    if spec.shape[1] < 2:
        raise ValueError(f"need at least 2 bins, got {spec.shape[1]}")
    n = 2 * (spec.shape[1] - 1)
    return np.fft.irfft(spec, n=n, axis=1)


def overlap_add(frames, window, hop):
    """Window each frame, overlap-add at ``hop``, and equalize variance.

    The accumulated signal is divided by the square root of the summed
    squared window so stationary frame statistics survive reassembly; where
    no window energy landed the output is zero.
    """
    frames = np.asarray(frames, dtype=np.float64)
    window = np.asarray(window, dtype=np.float64)
    n_frames, frame_len = frames.shape
    if window.shape[0] != frame_len:
        raise ValueError(f"window length {window.shape[0]} != frame length {frame_len}")
    if not 1 <= hop <= frame_len:
        raise ValueError(f"hop must be in [1, {frame_len}], got {hop}")
    out_len = (n_frames - 1) * hop + frame_len
    num = np.zeros(out_len, dtype=np.float64)
    den = np.zeros(out_len, dtype=np.float64)
    windowed = frames * window
    w2 = window * window
    for m in range(n_frames):
        base = m * hop
        num[base : base + frame_len] += windowed[m]
        den[base : base + frame_len] += w2
    out = np.zeros(out_len, dtype=np.float64)
    np.divide(num, np.sqrt(den, where=den > 0.0, out=np.ones_like(den)), out=out, where=den > 0.0)
    return out
