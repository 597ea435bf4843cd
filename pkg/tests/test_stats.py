import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from specamp.reference import RAYLEIGH_CV
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

from conftest import series_from


class TestEstimateBinStatistics:
    def test_constant_column_has_zero_spread(self):
        stats = estimate_bin_statistics(series_from([[4.0, 1.0, 0.5]] * 5))
        assert_allclose(stats.mu, [4.0, 1.0, 0.5])
        assert_allclose(stats.var, 0.0)
        assert_allclose(stats.cv, 0.0)

    def test_two_point_column(self):
        # column [0, 2]: mean 1, unbiased variance 2
        stats = estimate_bin_statistics(series_from([[0.0, 1.0, 1.0], [2.0, 1.0, 1.0]]))
        assert stats.mu[0] == 1.0
        assert stats.var[0] == 2.0
        assert stats.sigma[0] == math.sqrt(2.0)

    def test_zero_mean_bin_flagged_nan(self):
        stats = estimate_bin_statistics(series_from([[0.0, 1.0, 2.0], [0.0, 1.0, 2.0]]))
        assert np.isnan(stats.cv[0])
        assert stats.cv[1] == 0.0

    def test_needs_two_frames(self):
        with pytest.raises(ValueError, match="2 frames"):
            estimate_bin_statistics(series_from([[1.0, 1.0, 1.0]]))

    def test_rayleigh_draws_recover_the_closed_form_cv(self, rng):
        """Monte-Carlo cross-check of sqrt(4/pi - 1) on direct Rayleigh draws."""
        draws = rng.rayleigh(scale=2.0, size=(10**6, 3))
        stats = estimate_bin_statistics(series_from(draws))
        assert_allclose(stats.cv, RAYLEIGH_CV, atol=0.005)

    def test_scale_invariance_of_cv(self, rng):
        amps = np.abs(rng.standard_normal((200, 9))) + 0.01
        a = estimate_bin_statistics(series_from(amps))
        b = estimate_bin_statistics(series_from(amps * 17.0))
        assert_allclose(b.mu, 17.0 * a.mu, rtol=1e-12)
        assert_allclose(b.sigma, 17.0 * a.sigma, rtol=1e-12)
        assert_allclose(b.cv, a.cv, rtol=1e-12)


class TestBinStatisticsType:
    def test_sigma_must_match_var(self):
        with pytest.raises(ValueError, match="sqrt"):
            BinStatistics(mu=[1.0], var=[4.0], sigma=[1.0], cv=[1.0], n_frames=2)

    def test_rejects_negative_moments(self):
        with pytest.raises(ValueError, match="non-negative"):
            BinStatistics(mu=[-1.0], var=[0.0], sigma=[0.0], cv=[0.0], n_frames=2)

    def test_json_round_trip_keeps_nan_flags(self):
        stats = BinStatistics.from_mu_sigma([1.0, 0.0], [0.5, 0.0], n_frames=7)
        d = stats.to_dict()
        assert d["cv"] == [0.5, None]
        back = BinStatistics.from_dict(d)
        assert np.isnan(back.cv[1])
        assert back.n_frames == 7


class TestCorrelation:
    def test_proportional_sequences_give_exactly_one(self):
        mu = np.array([1.0, 2.0, 5.0, 0.25])
        stats = BinStatistics.from_mu_sigma(mu, 0.3 * mu, n_frames=10)
        assert correlation_mu_sigma(stats, (0, 4)) == 1.0

    def test_orthogonal_sequences_give_zero(self):
        stats = BinStatistics.from_mu_sigma([1.0, 0.0], [0.0, 1.0], n_frames=2)
        assert correlation_mu_sigma(stats, (0, 2)) == 0.0

    def test_all_zero_sigma_is_undefined(self):
        stats = BinStatistics.from_mu_sigma([1.0, 2.0], [0.0, 0.0], n_frames=2)
        assert np.isnan(correlation_mu_sigma(stats, (0, 2)))

    def test_never_exceeds_one(self, rng):
        for _ in range(50):
            mu = np.abs(rng.standard_normal(17))
            sigma = np.abs(rng.standard_normal(17))
            stats = BinStatistics.from_mu_sigma(mu, sigma, n_frames=2)
            assert 0.0 <= correlation_mu_sigma(stats, (0, 17)) <= 1.0

    def test_uncentered_is_not_pearson(self):
        # anti-correlated around the mean, yet strongly aligned as raw vectors
        stats = BinStatistics.from_mu_sigma([1.0, 2.0, 3.0], [3.0, 2.0, 1.0], n_frames=2)
        rho = correlation_mu_sigma(stats, (0, 3))
        pearson = pearson_mu_sigma(stats, (0, 3))
        assert rho == pytest.approx(10.0 / 14.0)
        assert pearson == pytest.approx(-1.0)

    def test_bad_span(self):
        stats = BinStatistics.from_mu_sigma([1.0, 1.0], [0.0, 0.0], n_frames=2)
        with pytest.raises(ValueError, match="out of range"):
            correlation_mu_sigma(stats, (0, 3))


class TestFitConsistentCv:
    def test_exact_proportionality(self):
        mu = np.array([0.5, 1.0, 2.0, 4.0])
        report = fit_consistent_cv(BinStatistics.from_mu_sigma(mu, 0.5 * mu, 4), (0, 4))
        assert report.rho == 1.0
        assert report.c_s == pytest.approx(0.5, abs=1e-15)
        assert report.per_bin_cv_spread == 0.0

    def test_two_point_least_squares(self):
        stats = BinStatistics.from_mu_sigma([1.0, 2.0], [1.0, 1.0], n_frames=2)
        report = fit_consistent_cv(stats, (0, 2))
        assert report.c_s == pytest.approx(3.0 / 5.0, abs=1e-15)

    def test_c_s_is_a_weighted_mean_of_cv(self, rng):
        for _ in range(25):
            mu = np.abs(rng.standard_normal(33)) + 0.01
            sigma = np.abs(rng.standard_normal(33))
            report = fit_consistent_cv(BinStatistics.from_mu_sigma(mu, sigma, 5), (0, 33))
            cv = sigma / mu
            assert cv.min() - 1e-12 <= report.c_s <= cv.max() + 1e-12

    def test_spread_is_population_std(self):
        stats = BinStatistics.from_mu_sigma([1.0, 1.0], [0.4, 0.6], n_frames=3)
        report = fit_consistent_cv(stats, (0, 2))
        assert report.per_bin_cv_spread == pytest.approx(0.1, abs=1e-15)

    def test_zero_mean_bins_are_excluded_and_counted(self):
        stats = BinStatistics.from_mu_sigma([1.0, 0.0, 2.0], [0.5, 1.0, 1.0], n_frames=4)
        report = fit_consistent_cv(stats, (0, 3))
        assert report.n_zero_mean_excluded == 1
        assert report.c_s == pytest.approx((0.5 + 2.0) / 5.0)

    def test_all_zero_mean_errors(self):
        stats = BinStatistics.from_mu_sigma([0.0, 0.0], [1.0, 1.0], n_frames=4)
        with pytest.raises(ValueError, match="zero mean"):
            fit_consistent_cv(stats, (0, 2))

    def test_spread_shrinks_with_more_frames(self, rng):
        """Scaling-model data: per-bin CV spread falls as frames grow."""
        envelope = np.linspace(0.5, 2.0, 9)
        small = rng.rayleigh(scale=1.0, size=(300, 9)) * envelope
        large = rng.rayleigh(scale=1.0, size=(3000, 9)) * envelope
        spread_small = fit_consistent_cv(
            estimate_bin_statistics(series_from(small)), (0, 9)
        ).per_bin_cv_spread
        spread_large = fit_consistent_cv(
            estimate_bin_statistics(series_from(large)), (0, 9)
        ).per_bin_cv_spread
        assert spread_large <= spread_small / 2.0

    def test_report_json_round_trip(self, tmp_path):
        report = CvReport(
            rho=0.995,
            c_s=0.52,
            per_bin_cv_spread=0.01,
            included_bins=(1, 256),
            n_frames=1000,
            rho_centered=0.42,
            n_zero_mean_excluded=3,
        )
        path = tmp_path / "report.json"
        report.save_json(path)
        assert CvReport.load_json(path) == report

    def test_report_rejects_out_of_range_rho(self):
        with pytest.raises(ValueError, match="rho"):
            CvReport(rho=1.5, c_s=0.5, per_bin_cv_spread=0.0, included_bins=(0, 2), n_frames=2)


def test_default_bin_span_drops_dc_and_nyquist():
    assert default_bin_span(257) == (1, 256)
    with pytest.raises(ValueError):
        default_bin_span(2)


def test_default_span_used_when_none(rng):
    amps = np.abs(rng.standard_normal((50, 17))) + 0.1
    stats = estimate_bin_statistics(series_from(amps))
    assert fit_consistent_cv(stats).included_bins == (1, 16)


def test_stats_csv(tmp_path, rng):
    amps = np.abs(rng.standard_normal((20, 5)))
    amps[:, 0] = 0.0  # force one undefined cv
    series = series_from(amps)
    stats = estimate_bin_statistics(series)
    path = tmp_path / "stats.csv"
    save_stats_csv(stats, series.bin_freqs_hz, path)
    rows = np.loadtxt(path, delimiter=",", skiprows=1)
    assert rows.shape == (5, 4)
    assert_allclose(rows[:, 1], stats.mu)
    assert np.isnan(rows[0, 3])
    assert path.read_text().splitlines()[0] == "bin_freq_hz,mu,sigma,cv"
