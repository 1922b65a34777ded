import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from femtoloss.model import dbm_to_w, path_loss
from femtoloss.uplink import (ClippedPowerPdf, PowerStats, clipped_power_moment, power_stats,
                              simulate_tx_power, tx_power_mean, tx_power_mean_square, tx_power_pdf)


def test_unclipped_power_returned(cfg):
    L = path_loss(cfg.propagation, 200.0)
    p = simulate_tx_power(1, L, 1.0, cfg)
    assert p == pytest.approx(cfg.target_sinr * L * cfg.sigma2)
    assert cfg.Pmin < p < cfg.Pmax


def test_deep_fade_clips_to_pmax(cfg):
    assert simulate_tx_power(1, path_loss(cfg.propagation, 200.0), 1e-300, cfg) == cfg.Pmax
    assert simulate_tx_power(1, path_loss(cfg.propagation, 200.0), 1e300, cfg) == cfg.Pmin


def test_fixed_target_power(cfg):
    c = cfg.with_(Pmax=10.0)
    L = path_loss(c.propagation, 300.0)
    assert simulate_tx_power(4, L, 1.0, c) == pytest.approx(10 ** 1.5 * L * 1e-13, rel=1e-12)


def test_amc_policy_uses_mode_threshold(cfg):
    c = cfg.with_(uplink_policy="amc", target_sinr=None, Pmax=10.0)
    L = path_loss(c.propagation, 300.0)
    for m in (1, 4, 7):
        assert simulate_tx_power(m, L, 1.0, c) == pytest.approx(c.amc.omega(m) * L * c.sigma2)


@settings(max_examples=200)
@given(st.floats(1e-6, 1e6), st.floats(1e-4, 1.0), st.floats(1.01, 1e4))
def test_total_probability(k, pmin, ratio):
    pdf = ClippedPowerPdf(k, pmin, pmin * ratio)
    assert pdf.total_probability() == pytest.approx(1.0, abs=1e-9)


def test_continuous_mass_by_quadrature():
    from scipy import integrate
    pdf = ClippedPowerPdf(0.1, 0.01, 1.0)
    q = integrate.quad(pdf.density, 0.01, 1.0, epsabs=0, epsrel=1e-12, limit=200)[0]
    assert q == pytest.approx(pdf.continuous_mass(), rel=1e-9)
    assert pdf.mass_min + q + pdf.mass_max == pytest.approx(1.0, abs=1e-9)


def test_limits_of_k():
    small = ClippedPowerPdf(1e-12, 0.01, 1.0)
    assert small.mass_min == pytest.approx(1.0)
    big = ClippedPowerPdf(1e6, 0.01, 1.0)
    assert big.mass_max == pytest.approx(1.0)


def test_pdf_rejects_bad_limits(cfg):
    with pytest.raises(ValueError):
        ClippedPowerPdf(1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        ClippedPowerPdf(1.0, 2.0, 1.0)


def test_degenerate_limits_point_mass():
    assert clipped_power_moment(0.3, 0.5, 0.5, 1) == 0.5
    assert clipped_power_moment(0.3, 0.5, 0.5, 2) == 0.25


def test_moments_match_sampling_oracle():
    k, pmin, pmax = 0.1, 0.01, 1.0
    h = np.random.default_rng(21).standard_exponential(10 ** 7)
    p = np.clip(k / h, pmin, pmax)
    assert clipped_power_moment(k, pmin, pmax, 1) == pytest.approx(p.mean(), rel=2e-3)
    assert clipped_power_moment(k, pmin, pmax, 2) == pytest.approx((p ** 2).mean(), rel=2e-3)


@pytest.mark.parametrize("d", [60.0, 250.0, 480.0])
def test_config_moments_match_simulator(cfg, d):
    L = path_loss(cfg.propagation, d)
    h = np.random.default_rng(22).standard_exponential(10 ** 6)
    p = simulate_tx_power(np.ones(len(h), int), L, h, cfg)
    n = len(p)
    assert abs(tx_power_mean(1, L, cfg) - p.mean()) <= 4 * p.std() / math.sqrt(n)
    assert abs(tx_power_mean_square(1, L, cfg) - (p ** 2).mean()) <= 4 * (p ** 2).std() / math.sqrt(n)


def test_sampled_distribution_matches_pdf():
    k, pmin, pmax = 0.2, 0.02, 1.0
    pdf = ClippedPowerPdf(k, pmin, pmax)
    n = 10 ** 6
    p = np.clip(k / np.random.default_rng(23).standard_exponential(n), pmin, pmax)
    for freq, mass in (((p == pmin).mean(), pdf.mass_min), ((p == pmax).mean(), pdf.mass_max)):
        assert abs(freq - mass) <= 3 * math.sqrt(mass * (1 - mass) / n)
    inner = p[(p > pmin) & (p < pmax)]
    edges = np.linspace(pmin, pmax, 51)
    observed = np.histogram(inner, edges)[0]
    # bin probabilities from the closed-form CDF of the continuous part
    cdf = np.exp(-k / edges)
    expected = np.diff(cdf) * n
    assert expected.sum() == pytest.approx(len(inner), rel=5e-3)
    chi2 = stats.chisquare(observed, expected * observed.sum() / expected.sum())
    assert chi2.pvalue > 0.01


@settings(max_examples=100)
@given(st.floats(1e-6, 1e3), st.floats(1e-4, 1.0), st.floats(1.01, 1e4))
def test_variance_nonnegative_and_bounds(k, pmin, ratio):
    pmax = pmin * ratio
    m1 = clipped_power_moment(k, pmin, pmax, 1)
    m2 = clipped_power_moment(k, pmin, pmax, 2)
    assert pmin * (1 - 1e-9) <= m1 <= pmax * (1 + 1e-9)
    assert m2 >= m1 * m1 * (1 - 1e-9)
    assert m2 <= pmax ** 2 * (1 + 1e-9)


@settings(max_examples=50)
@given(st.floats(1e-4, 10.0), st.floats(1.0, 100.0))
def test_mean_monotone_in_k(k, factor):
    assert clipped_power_moment(k * factor, 0.01, 1.0, 1) >= clipped_power_moment(k, 0.01, 1.0, 1) * (1 - 1e-9)


def test_power_stats_per_instant(cfg):
    c = cfg.with_(uplink_policy="amc", target_sinr=None)
    L = path_loss(c.propagation, 300.0)
    st_ = power_stats([1, 3, 3, 7], L, c)
    assert isinstance(st_, PowerStats) and len(st_) == 4
    assert st_.mean[1] == st_.mean[2]
    assert st_.mean[0] == pytest.approx(tx_power_mean(1, L, c))
    assert st_.mean_square[3] == pytest.approx(tx_power_mean_square(7, L, c))
    fixed = power_stats(np.full(5, 2), L, cfg)
    assert np.all(fixed.mean == fixed.mean[0])


def test_pdf_from_config(cfg):
    L = path_loss(cfg.propagation, 300.0)
    pdf = tx_power_pdf(1, L, cfg)
    assert pdf.k == pytest.approx(cfg.target_sinr * L * cfg.sigma2)
    assert pdf.moment(1) == pytest.approx(tx_power_mean(1, L, cfg))
