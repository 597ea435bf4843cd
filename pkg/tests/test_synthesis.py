import numpy as np
import pytest
from numpy.testing import assert_allclose

from specamp.histograms import PrototypeDistribution, grid_edges
from specamp.reference import RAYLEIGH_CV, unit_rayleigh_prototype, uniform_prototype
from specamp.spectral import StftConfig, stft_magnitudes
from specamp.stats import estimate_bin_statistics, fit_consistent_cv
from specamp.synthesis import ScalingModel, _quantiles, sample_prototype, synthesize

SMALL = StftConfig(frame_len=64, hop=32)


def small_model(envelope=None, prototype=None) -> ScalingModel:
    if envelope is None:
        envelope = np.ones(SMALL.n_bins)
    if prototype is None:
        prototype = unit_rayleigh_prototype()
    return ScalingModel(envelope=envelope, prototype=prototype, config=SMALL)


class TestScalingModel:
    def test_envelope_length_must_match_config(self):
        with pytest.raises(ValueError, match="envelope"):
            small_model(envelope=np.ones(16))

    def test_envelope_must_be_non_negative(self):
        env = np.ones(SMALL.n_bins)
        env[3] = -0.5
        with pytest.raises(ValueError, match="non-negative"):
            small_model(envelope=env)

    def test_prototype_mean_must_be_near_one(self):
        # uniform on [0, 4] has mean 2, twice the allowed center
        wide = PrototypeDistribution.from_density(grid_edges(64, 4.0), np.full(64, 0.25))
        assert wide.mu0 == pytest.approx(2.0, abs=0.01)
        with pytest.raises(ValueError, match="mean"):
            small_model(prototype=wide)

    def test_json_round_trip(self, tmp_path, rng):
        model = small_model(envelope=rng.random(SMALL.n_bins) + 0.5)
        path = tmp_path / "model.json"
        model.save_json(path)
        back = ScalingModel.load_json(path)
        assert_allclose(back.envelope, model.envelope)
        assert_allclose(back.prototype.density, model.prototype.density, rtol=1e-12)
        assert back.config == model.config


class TestSampling:
    def test_deterministic_per_seed(self):
        proto = unit_rayleigh_prototype()
        a = sample_prototype(proto, 1000, seed=5)
        b = sample_prototype(proto, 1000, seed=5)
        c = sample_prototype(proto, 1000, seed=6)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_draws_stay_inside_a_single_occupied_bucket(self):
        edges = grid_edges(64, 5.0)
        density = np.zeros(64)
        density[10] = 1.0
        proto = PrototypeDistribution.from_density(edges, density)
        draws = sample_prototype(proto, 5000, seed=2)
        assert np.all(draws >= edges[10])
        assert np.all(draws <= edges[11])

    def test_large_sample_mean_matches_mu0(self):
        proto = uniform_prototype()
        draws = sample_prototype(proto, 10**6, seed=11)
        assert draws.mean() == pytest.approx(proto.mu0, abs=0.005)

    def test_rejects_empty_request(self):
        with pytest.raises(ValueError, match=">= 1"):
            sample_prototype(unit_rayleigh_prototype(), 0, seed=0)

    def test_zero_density_cannot_be_sampled(self):
        hollow = PrototypeDistribution(
            edges=grid_edges(64, 5.0), density=np.zeros(64), mu0=1.0, sigma0=0.5
        )
        with pytest.raises(ValueError, match="mass"):
            sample_prototype(hollow, 10, seed=0)

    def test_quantiles_of_the_uniform_prototype(self):
        # uniform density on [0, 2]: piecewise-linear CDF inversion is exact
        proto = uniform_prototype()
        q = _quantiles(proto, np.array([0.0, 0.25, 0.5, 0.75]))
        assert_allclose(q, [0.0, 0.5, 1.0, 1.5], atol=1e-12)


class TestSynthesize:
    def test_deterministic_per_seed(self, rng):
        model = small_model(envelope=rng.random(SMALL.n_bins) + 0.2)
        a = synthesize(model, n_frames=20, seed=3)
        b = synthesize(model, n_frames=20, seed=3)
        c = synthesize(model, n_frames=20, seed=4)
        assert np.array_equal(a.samples, b.samples)
        assert not np.array_equal(a.samples, c.samples)

    def test_output_length(self):
        signal = synthesize(small_model(), n_frames=20, seed=0)
        assert len(signal.samples) == 19 * SMALL.hop + SMALL.frame_len
        assert signal.sample_rate_hz == SMALL.sample_rate_hz

    def test_zero_envelope_gives_silence(self):
        signal = synthesize(small_model(envelope=np.zeros(SMALL.n_bins)), 10, seed=1)
        assert not np.any(signal.samples)

    def test_everything_finite(self, rng):
        env = rng.random(SMALL.n_bins) * 3.0
        env[::7] = 0.0  # holes in the envelope must not divide by zero
        signal = synthesize(small_model(envelope=env), 50, seed=9)
        assert np.all(np.isfinite(signal.samples))

    def test_rejects_zero_frames(self):
        with pytest.raises(ValueError, match=">= 1"):
            synthesize(small_model(), 0, seed=0)

    def test_doubling_the_envelope_doubles_the_signal_exactly(self, rng):
        env = rng.random(SMALL.n_bins) + 0.1
        base = synthesize(small_model(envelope=env), 30, seed=5)
        doubled = synthesize(small_model(envelope=2.0 * env), 30, seed=5)
        assert np.array_equal(doubled.samples, 2.0 * base.samples)

    def test_scaling_is_homogeneous_for_any_factor(self, rng):
        env = rng.random(SMALL.n_bins) + 0.1
        base = synthesize(small_model(envelope=env), 30, seed=5)
        scaled = synthesize(small_model(envelope=1.7 * env), 30, seed=5)
        assert_allclose(scaled.samples, 1.7 * base.samples, rtol=1e-12)

    def test_round_trip_smoke(self):
        """Re-analysis of a flat synthesized signal recovers the amplitude law."""
        model = small_model(envelope=np.full(SMALL.n_bins, 0.05))
        signal = synthesize(model, n_frames=600, seed=8)
        series = stft_magnitudes(signal, SMALL)
        report = fit_consistent_cv(estimate_bin_statistics(series))
        assert report.rho >= 0.95
        assert report.c_s == pytest.approx(RAYLEIGH_CV, abs=0.05)
