import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from femtoloss.amc import mode_likelihood
from femtoloss.map_estimator import (PathLossEstimate, _log_density_from_counts, estimate_L_bp,
                                     joint_log_density, mode_counts, pathloss_prior_pdf,
                                     uplink_loss_from_downlink)
from femtoloss.model import AmcTable, PropagationModel, path_loss
from femtoloss.sim import abs_db_error, make_rng, simulate_downlink_modes


def test_prior_constant_for_square_law():
    m = PropagationModel(2.0, 2.0)
    lo, hi = 2.0 * 10 ** 2, 2.0 * 100 ** 2
    expected = 1.0 / (2.0 * (100 ** 2 - 10 ** 2))
    for L in np.linspace(lo, hi, 7):
        assert pathloss_prior_pdf(m, 100, 10, L) == pytest.approx(expected)


def test_prior_integrates_to_one(cfg):
    m = cfg.propagation
    lo, hi = cfg.loss_min, cfg.loss_max
    # quadrature in log L; the density is a power law over many decades
    val = integrate.quad(lambda s: pathloss_prior_pdf(m, cfg.R0, cfg.Rmin, math.exp(s)) * math.exp(s),
                         math.log(lo), math.log(hi), epsabs=0, epsrel=1e-12)[0]
    assert val == pytest.approx(1.0, abs=1e-9)


def test_prior_zero_outside_support(cfg):
    assert pathloss_prior_pdf(cfg.propagation, cfg.R0, cfg.Rmin, cfg.loss_min * 0.99) == 0.0
    assert pathloss_prior_pdf(cfg.propagation, cfg.R0, cfg.Rmin, cfg.loss_max * 1.01) == 0.0


def test_joint_density_small_exhaustive(cfg):
    c = cfg.with_(amc=AmcTable.from_db([3.0, 12.0]))
    p0 = c.resolved_p0()
    for seq in ([1, 1], [1, 2], [2, 1], [2, 2]):
        for d in (60.0, 250.0, 470.0):
            L = path_loss(c.propagation, d)
            direct = (mode_likelihood(c.amc, seq[0], L, p0, c.sigma2)
                      * mode_likelihood(c.amc, seq[1], L, p0, c.sigma2)
                      * pathloss_prior_pdf(c.propagation, c.R0, c.Rmin, L))
            assert math.exp(joint_log_density(seq, L, c)) == pytest.approx(direct, rel=1e-12)


def test_joint_density_factorises(cfg):
    a, b = [7, 6, 5, 7], [3, 7, 7]
    L = path_loss(cfg.propagation, 280.0)
    lp = math.log(pathloss_prior_pdf(cfg.propagation, cfg.R0, cfg.Rmin, L))
    whole = joint_log_density(a + b, L, cfg)
    parts = joint_log_density(a, L, cfg) + joint_log_density(b, L, cfg) - lp
    assert whole == pytest.approx(parts, rel=1e-12)


def test_single_top_mode_dominated_by_prior(cfg):
    L = cfg.loss_min
    lp = math.log(pathloss_prior_pdf(cfg.propagation, cfg.R0, cfg.Rmin, L))
    top = -cfg.amc.omega(7) * L * cfg.sigma2 / cfg.resolved_p0()
    assert abs(top) < 1e-3
    assert joint_log_density([7], L, cfg) == pytest.approx(lp + top, abs=1e-12)


def test_outside_support_is_minus_inf(cfg):
    assert joint_log_density([3], cfg.loss_max * 2, cfg) == -math.inf


def test_empty_sequence_rejected(cfg):
    with pytest.raises(ValueError):
        estimate_L_bp([], cfg)
    with pytest.raises(ValueError):
        mode_counts([0, 1], 7)


def test_saturated_trace_pins_to_lower_edge(cfg):
    est = estimate_L_bp(np.full(200, 7), cfg)
    assert est.saturated and est.at_lower_edge
    assert est.L_hat_dB == pytest.approx(10 * math.log10(cfg.loss_min), abs=0.05)


def test_estimate_inside_support(cfg):
    for k in range(10):
        for d in (40.0, 250.0, 495.0):
            est = estimate_L_bp(simulate_downlink_modes(cfg, d, make_rng(3, k)), cfg)
            assert cfg.loss_min * (1 - 1e-12) <= est.L_hat <= cfg.loss_max * (1 + 1e-12)


def test_large_window_consistency(cfg):
    true = path_loss(cfg.propagation, 300.0)
    fine = np.linspace(10 * math.log10(cfg.loss_min), 10 * math.log10(cfg.loss_max), 200_001)
    for k in range(5):
        m_d = simulate_downlink_modes(cfg, 300.0, make_rng(4, k), n=10_000)
        est = estimate_L_bp(m_d, cfg)
        assert abs_db_error(true, est.L_hat) <= 0.3
        # oracle: exhaustive fine grid of the same density
        vals = _log_density_from_counts(mode_counts(m_d, 7), 10 ** (fine / 10), cfg, cfg.resolved_p0())
        assert est.L_hat_dB == pytest.approx(fine[np.argmax(vals)], abs=0.01)


def test_refinement_matches_brute_force(cfg):
    brute = np.linspace(10 * math.log10(cfg.loss_min), 10 * math.log10(cfg.loss_max), 10 ** 6)
    rng = np.random.default_rng(5)
    for k in range(20):
        d = rng.uniform(cfg.Rmin, cfg.R0)
        m_d = simulate_downlink_modes(cfg, d, make_rng(6, k))
        counts = mode_counts(m_d, 7)
        vals = np.concatenate([_log_density_from_counts(counts, 10 ** (c / 10), cfg, cfg.resolved_p0())
                               for c in np.array_split(brute, 10)])
        est = estimate_L_bp(m_d, cfg)
        assert est.L_hat_dB == pytest.approx(brute[np.argmax(vals)], abs=0.01)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.floats(-50, 50))
def test_argmax_invariant_to_constant(cfg, seed, log_const):
    m_d = simulate_downlink_modes(cfg, 260.0, make_rng(7, seed))
    est = estimate_L_bp(m_d, cfg)
    grid = np.linspace(10 * math.log10(cfg.loss_min), 10 * math.log10(cfg.loss_max), 4096)
    vals = joint_log_density(m_d, 10 ** (grid / 10), cfg)
    assert grid[np.argmax(vals + log_const)] == grid[np.argmax(vals)]
    assert est.L_hat_dB == pytest.approx(grid[np.argmax(vals)], abs=0.02)


def test_duplex_conversion():
    L = 10 ** 10
    assert uplink_loss_from_downlink(L, "tdd") == L
    assert 10 * math.log10(uplink_loss_from_downlink(L, "fdd", 1.5)) == pytest.approx(101.5)
    est = PathLossEstimate(L_hat=L, grid_points=2048, log_density=-3.0, at_lower_edge=True)
    out = uplink_loss_from_downlink(est, "tdd")
    assert out == est and out.at_lower_edge and out.grid_points == 2048
    with pytest.raises(ValueError):
        uplink_loss_from_downlink(L, "xdd")


def test_error_shrinks_with_window(cfg):
    true = path_loss(cfg.propagation, 300.0)
    means = []
    for n in (50, 200, 1000):
        errs = [abs_db_error(true, estimate_L_bp(simulate_downlink_modes(cfg, 300.0, make_rng(8, n, k), n=n), cfg).L_hat)
                for k in range(200)]
        means.append(np.mean(errs))
    assert means[0] + 0.05 >= means[1] and means[1] + 0.05 >= means[2]
