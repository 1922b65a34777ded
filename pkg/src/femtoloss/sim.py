"""Scenario simulation, the end-to-end estimation pipeline and the dB error metric."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .amc import assign_mode, downlink_sinr
from .geometry import SINGULAR_GAP_M, prior_on_circle, pu_su_distance
from .map_estimator import PathLossEstimate, estimate_L_bp, uplink_loss_from_downlink
from .mmse import build_correlations, estimate_x, pathloss_from_x
from .model import ScenarioConfig, path_loss, sample_fading_gain, sample_noise_power
from .uplink import power_stats, simulate_tx_power


def make_rng(seed: int, *key: int) -> np.random.Generator:
    """Independent stream for ``key`` under root ``seed`` (SeedSequence spawn-key hashing)."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=tuple(key))))


@dataclass(frozen=True)
class Observables:
    """What the SU actually sees."""

    m_d: np.ndarray
    m_u: np.ndarray
    P_r: np.ndarray

    def __post_init__(self):
        n = len(self.m_d)
        if len(self.m_u) != n or len(self.P_r) != n:
            raise ValueError("m_d, m_u and P_r must have equal length")

    def __len__(self):
        return len(self.m_d)


@dataclass(frozen=True)
class GroundTruth:
    L_bp: float
    L_pb: float
    L_ps: float
    r0: float
    theta: float
    r1: float
    P_t: np.ndarray
    h_bp: np.ndarray = field(repr=False, default=None)
    h_pb: np.ndarray = field(repr=False, default=None)
    h_ps: np.ndarray = field(repr=False, default=None)


@dataclass(frozen=True)
class ObservationTrace:
    observables: Observables
    truth: GroundTruth

    @property
    def m_d(self):
        return self.observables.m_d

    @property
    def m_u(self):
        return self.observables.m_u

    @property
    def P_r(self):
        return self.observables.P_r


def _check_pu(config: ScenarioConfig, r: float):
    if not config.Rmin <= r <= config.R0:
        raise ValueError(f"PU distance {r} m outside [{config.Rmin}, {config.R0}]")


def simulate_downlink_modes(config: ScenarioConfig, r: float, rng: np.random.Generator,
                            n: int | None = None) -> np.ndarray:
    _check_pu(config, r)
    n = config.I if n is None else n
    h = sample_fading_gain(rng, n)
    S = downlink_sinr(config.resolved_p0(), h, config.sigma2, path_loss(config.propagation, r))
    return assign_mode(config.amc, S)


def simulate_scenario(config: ScenarioConfig, pu_pos: tuple[float, float], r1: float,
                      rng: np.random.Generator, *, noise: bool = True,
                      ps_fading: bool = True) -> ObservationTrace:
    """One observation window: downlink modes, uplink modes, SU received powers.

    ``pu_pos = (r, theta)``: PU distance from the BS and its angle from the SU
    direction as seen at the BS. ``noise`` / ``ps_fading`` switch off the SU
    noise and the PU-SU fading (test hooks).
    """
    r, theta = pu_pos
    _check_pu(config, r)
    if not r1 > 0:
        raise ValueError("SU distance r1 must be positive")
    D = float(pu_su_distance(r, r1, theta))
    if not D > 0:
        raise ValueError("PU and SU coincide")

    n = config.I
    L_bp = float(path_loss(config.propagation, r))
    L_pb = L_bp * 10.0 ** (config.duplex_offset_db() / 10.0)
    L_ps = float(path_loss(config.propagation, D))

    # fixed draw order keeps streams aligned across policies and hooks
    h_bp = sample_fading_gain(rng, n)
    h_pb = sample_fading_gain(rng, n)
    h_ps = sample_fading_gain(rng, n)
    p_n = sample_noise_power(rng, config.sigma2, n)
    g_sched = sample_fading_gain(rng, n)

    m_d = assign_mode(config.amc, downlink_sinr(config.resolved_p0(), h_bp, config.sigma2, L_bp))
    if config.uplink_policy == "fixed-target":
        m_u = np.full(n, assign_mode(config.amc, config.target_sinr), dtype=np.int64)
    else:
        # scheduler picks the mode from an independent (stale) channel report at full power
        m_u = assign_mode(config.amc, config.Pmax * g_sched / (config.sigma2 * L_pb))
    P_t = simulate_tx_power(m_u, L_pb, h_pb, config)

    gain = h_ps if ps_fading else np.ones(n)
    P_r = P_t * gain / L_ps + (p_n if noise else 0.0)

    return ObservationTrace(
        observables=Observables(m_d=m_d, m_u=m_u, P_r=P_r),
        truth=GroundTruth(L_bp=L_bp, L_pb=L_pb, L_ps=L_ps, r0=r, theta=theta, r1=r1, P_t=P_t,
                          h_bp=h_bp, h_pb=h_pb, h_ps=gain),
    )


class EstimationError(RuntimeError):
    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"{stage}: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass(frozen=True)
class EstimationResult:
    L_bp: float
    L_pb: float
    L_ps: float
    L_sp: float
    map_estimate: PathLossEstimate
    r0_hat: float
    r0_nudged: bool
    x_mean: float
    x_mean_square: float
    x_hat: float
    cond_estimate: float
    regularized: bool
    clamped: bool

    @property
    def L_bp_dB(self):
        return 10 * math.log10(self.L_bp)

    @property
    def L_pb_dB(self):
        return 10 * math.log10(self.L_pb)

    @property
    def L_ps_dB(self):
        return 10 * math.log10(self.L_ps)

    @property
    def L_sp_dB(self):
        return 10 * math.log10(self.L_sp)


def _nudge_radius(r0: float, r1: float) -> tuple[float, bool]:
    if abs(r0 - r1) >= SINGULAR_GAP_M:
        return r0, False
    if r0 >= r1 or r1 < SINGULAR_GAP_M:
        return r1 + SINGULAR_GAP_M, True
    return r1 - SINGULAR_GAP_M, True


def run_estimation(obs: Observables, r1: float, config: ScenarioConfig,
                   L_pb_override: float | None = None) -> EstimationResult:
    """The five-step procedure: MAP loss, power moments, circle prior, correlations, LMMSE.

    Only the observables, the SU-BS distance and the config are read.
    ``L_pb_override`` replaces the MAP output (ablation runs only).
    """
    offset = config.duplex_offset_db()
    try:
        est = estimate_L_bp(obs.m_d, config)
    except Exception as exc:
        raise EstimationError("map", exc) from exc
    L_bp_hat = est.L_hat if L_pb_override is None else L_pb_override * 10.0 ** (-offset / 10.0)
    L_pb_hat = uplink_loss_from_downlink(L_bp_hat, config.duplex, offset)

    try:
        stats = power_stats(obs.m_u, L_pb_hat, config)
    except Exception as exc:
        raise EstimationError("power-stats", exc) from exc

    r0_hat = float(config.propagation.distance_of(L_bp_hat))
    r0_used, nudged = _nudge_radius(r0_hat, r1)
    try:
        prior = prior_on_circle(r0_used, r1, config.propagation)
    except Exception as exc:
        raise EstimationError("geometry-prior", exc) from exc

    try:
        corr = build_correlations(stats, prior, config.sigma2)
        xe = estimate_x(corr, obs.P_r)
    except Exception as exc:
        raise EstimationError("mmse", exc) from exc
    L_ps, clamped = pathloss_from_x(xe.x_hat, config.propagation, config.R0)
    L_sp = L_ps * 10.0 ** (-offset / 10.0)

    return EstimationResult(
        L_bp=L_bp_hat, L_pb=L_pb_hat, L_ps=L_ps, L_sp=L_sp, map_estimate=est,
        r0_hat=r0_hat, r0_nudged=nudged, x_mean=prior.x_mean, x_mean_square=prior.x_mean_square,
        x_hat=xe.x_hat, cond_estimate=xe.cond_estimate, regularized=xe.regularized, clamped=clamped,
    )


def abs_db_error(real: float, estimated: float) -> float:
    if not (real > 0 and estimated > 0):
        raise ValueError("losses must be positive")
    return abs(10.0 * math.log10(real) - 10.0 * math.log10(estimated))


def write_trace_csv(obs: Observables, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["i", "m_d", "m_u", "p_r_w"])
        for i, (md, mu, pr) in enumerate(zip(obs.m_d, obs.m_u, obs.P_r), start=1):
            w.writerow([i, int(md), int(mu), repr(float(pr))])
