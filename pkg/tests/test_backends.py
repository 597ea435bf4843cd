"""Parity checks between the compiled kernels and the NumPy fallback.

The two implementations use different summation orders, so floating-point
agreement is close-but-not-bitwise; anything the package reports (rho, c_s,
histogram counts) must agree far inside the tolerances used downstream.
"""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from specamp import backend
from specamp.signal_io import generate_noise, NoiseSpec
from specamp.spectral import StftConfig, hamming_window, stft_magnitudes
from specamp.stats import estimate_bin_statistics, fit_consistent_cv

needs_cython = pytest.mark.skipif(
    "cython" not in backend.available_backends(),
    reason="compiled extension not built",
)


@pytest.fixture(autouse=True)
def restore_backend():
    yield
    backend.select("auto")


def test_python_backend_is_always_available():
    assert "python" in backend.available_backends()


def test_select_unknown_name():
    with pytest.raises(ValueError, match="not available"):
        backend.select("fortran")


def test_runtime_switch():
    kern = backend.select("python")
    assert kern.NAME == "python"
    assert backend.active_name() == "python"
    assert backend.kernels() is kern


@needs_cython
def test_auto_prefers_the_compiled_backend():
    assert backend.select("auto").NAME == "cython"


@needs_cython
class TestKernelParity:
    @pytest.fixture()
    def kernels(self):
        return backend._AVAILABLE["python"], backend._AVAILABLE["cython"]

    def test_frame_magnitudes(self, kernels, rng):
        py, cy = kernels
        x = rng.standard_normal(4096)
        w = hamming_window(256)
        a = py.frame_magnitudes(x, 256, 128, w)
        b = cy.frame_magnitudes(x, 256, 128, w)
        assert a.shape == b.shape == (31, 129)
        assert_allclose(b, a, rtol=1e-12, atol=1e-12)

    def test_column_mean_var(self, kernels, rng):
        py, cy = kernels
        a = rng.random((500, 65)) * 3.0
        mu_p, var_p = py.column_mean_var(a)
        mu_c, var_c = cy.column_mean_var(a)
        assert_allclose(mu_c, mu_p, rtol=1e-13)
        assert_allclose(var_c, var_p, rtol=1e-12)

    def test_column_histograms_with_shared_scales(self, kernels, rng):
        # identical scales -> identical float division -> identical buckets
        py, cy = kernels
        a = np.abs(rng.standard_normal((400, 33)))
        scales = a.mean(axis=0)
        counts_p, over_p = py.column_histograms(a, scales, 5.0, 64)
        counts_c, over_c = cy.column_histograms(a, scales, 5.0, 64)
        assert np.array_equal(counts_p, counts_c)
        assert np.array_equal(over_p, over_c)

    def test_irfft_frames(self, kernels, rng):
        py, cy = kernels
        spec = rng.standard_normal((40, 33)) + 1j * rng.standard_normal((40, 33))
        spec[:, 0] = spec[:, 0].real
        spec[:, -1] = spec[:, -1].real
        a = py.irfft_frames(spec)
        b = cy.irfft_frames(spec)
        assert a.shape == b.shape == (40, 64)
        assert_allclose(b, a, rtol=1e-12, atol=1e-13)

    def test_overlap_add(self, kernels, rng):
        py, cy = kernels
        frames = rng.standard_normal((40, 64))
        window = np.sin(np.pi * np.arange(64) / 64)
        a = py.overlap_add(frames, window, 32)
        b = cy.overlap_add(frames, window, 32)
        assert_allclose(b, a, rtol=1e-12, atol=1e-13)


@needs_cython
def test_full_analysis_agrees_across_backends():
    spec = NoiseSpec(kind="white_gaussian", duration_s=5.0, seed=42)
    config = StftConfig()
    reports = {}
    counts = {}
    for name in ("python", "cython"):
        backend.select(name)
        signal = generate_noise(spec, config.sample_rate_hz)
        series = stft_magnitudes(signal, config)
        reports[name] = fit_consistent_cv(estimate_bin_statistics(series))
        from specamp.histograms import bin_histograms

        family = bin_histograms(series)
        counts[name] = np.asarray([m.counts for m in family.members])
    assert reports["cython"].rho == pytest.approx(reports["python"].rho, abs=1e-10)
    assert reports["cython"].c_s == pytest.approx(reports["python"].c_s, abs=1e-10)
    assert reports["cython"].n_frames == reports["python"].n_frames
    # per-bin means differ in the last float bits, so a value sitting exactly
    # on a bucket edge can flip; totals must still be essentially identical
    assert np.abs(counts["cython"] - counts["python"]).sum() <= 4


def test_mean_var_is_stable_against_a_large_offset(rng):
    """Column statistics survive mean >> deviations without losing the variance."""
    noise = rng.standard_normal((2000, 3)) * 1e-3
    shifted = noise + 1e8
    expected_var = noise.astype(np.longdouble).var(axis=0, ddof=1)
    for name in backend.available_backends():
        kern = backend._AVAILABLE[name]
        mu, var = kern.column_mean_var(shifted)
        assert_allclose(mu, 1e8, rtol=1e-12)
        assert_allclose(var, np.asarray(expected_var, dtype=float), rtol=1e-6)
