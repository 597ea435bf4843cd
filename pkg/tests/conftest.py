import numpy as np
import pytest

from specamp.spectral import SpectrumSeries, StftConfig


def series_from(amplitudes, sample_rate_hz: int = 16000) -> SpectrumSeries:
    """Wrap a raw (frames, bins) amplitude matrix in a SpectrumSeries.

    The config's frame length is implied by the bin count, so bin counts
    must be 2**m + 1 (3, 5, 9, ..., 257).
    """
    amplitudes = np.asarray(amplitudes, dtype=np.float64)
    n_bins = amplitudes.shape[1]
    config = StftConfig(frame_len=2 * (n_bins - 1), hop=n_bins - 1, sample_rate_hz=sample_rate_hz)
    return SpectrumSeries(amplitudes=amplitudes, config=config)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
