"""PU transmit power under clipped SINR-target control, its distribution and moments."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .model import ScenarioConfig

QUAD_EPSREL = 1e-8
_EXP_CUTOFF = 745.0  # exp(-u) underflows to 0 beyond this


class NumericalError(RuntimeError):
    """Quadrature or linear solve did not converge."""


def required_sinr(m_u, config: ScenarioConfig):
    """Omega for the uplink: the AMC threshold of ``m_u`` or the fixed target."""
    if config.uplink_policy == "fixed-target":
        return config.target_sinr if np.ndim(m_u) == 0 else np.full(np.shape(m_u), config.target_sinr)
    thr = config.amc.thresholds
    return thr[np.asarray(m_u, dtype=np.int64) - 1] if np.ndim(m_u) else thr[int(m_u) - 1]


def simulate_tx_power(m_u, L_pb, h2, config: ScenarioConfig):
    """Power meeting the required SINR exactly, clipped to [Pmin, Pmax]."""
    p = required_sinr(m_u, config) * L_pb * config.sigma2 / np.asarray(h2, dtype=float)
    p = np.clip(p, config.Pmin, config.Pmax)
    return float(p) if np.ndim(p) == 0 else p


@dataclass(frozen=True)
class ClippedPowerPdf:
    """Mixed law of ``k / |h|^2`` clipped to [pmin, pmax]."""

    k: float
    pmin: float
    pmax: float

    def __post_init__(self):
        if not 0 < self.pmin < self.pmax:
            raise ValueError(f"need 0 < Pmin < Pmax, got {self.pmin}, {self.pmax}")
        if self.k < 0:
            raise ValueError("k must be non-negative")

    @property
    def mass_min(self) -> float:
        return math.exp(-self.k / self.pmin)

    @property
    def mass_max(self) -> float:
        return -math.expm1(-self.k / self.pmax)

    def density(self, p):
        p = np.asarray(p, dtype=float)
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            d = self.k / p ** 2 * np.exp(-self.k / p)
        d = np.where((p > self.pmin) & (p < self.pmax), d, 0.0)
        return float(d) if d.ndim == 0 else d

    def continuous_mass(self) -> float:
        return math.exp(-self.k / self.pmax) - math.exp(-self.k / self.pmin)

    def total_probability(self) -> float:
        return self.mass_min + self.continuous_mass() + self.mass_max

    def moment(self, order: int) -> float:
        return clipped_power_moment(self.k, self.pmin, self.pmax, order)


def tx_power_pdf(m_u, L_pb: float, config: ScenarioConfig) -> ClippedPowerPdf:
    k = float(required_sinr(m_u, config)) * L_pb * config.sigma2
    return ClippedPowerPdf(k, config.Pmin, config.Pmax)


def _continuous_moment(k: float, pmin: float, pmax: float, order: int) -> float:
    # p = k/u, then u = e^s:  int_{u_lo}^{u_hi} (k/u)^n e^{-u} du = k^n int e^{(1-n)s - e^s} ds
    u_lo, u_hi = k / pmax, k / pmin
    u_hi = min(u_hi, _EXP_CUTOFF)
    if u_lo >= u_hi:
        return 0.0
    s_lo, s_hi = math.log(u_lo), math.log(u_hi)
    n = order

    def integrand(s):
        return math.exp((1 - n) * s - math.exp(s))

    res = integrate.quad(integrand, s_lo, s_hi, epsabs=0.0, epsrel=QUAD_EPSREL, limit=200, full_output=1)
    if len(res) > 3:
        raise NumericalError(f"power moment quadrature failed (k={k}, order={n}): {res[3]}")
    return k ** n * res[0]


def clipped_power_moment(k: float, pmin: float, pmax: float, order: int) -> float:
    """E[P^order] for P = clip(k/|h|^2, pmin, pmax), endpoint masses included.

    ``pmin == pmax`` is accepted and gives the point mass.
    """
    if not 0 < pmin <= pmax:
        raise ValueError(f"need 0 < Pmin <= Pmax, got {pmin}, {pmax}")
    if k < 0:
        raise ValueError("k must be non-negative")
    if k == 0.0:
        return pmin ** order
    if pmin == pmax:
        return pmin ** order
    m_min = math.exp(-k / pmin)
    m_max = -math.expm1(-k / pmax)
    return pmin ** order * m_min + pmax ** order * m_max + _continuous_moment(k, pmin, pmax, order)


def tx_power_mean(m_u, L_pb: float, config: ScenarioConfig) -> float:
    k = float(required_sinr(m_u, config)) * L_pb * config.sigma2
    return clipped_power_moment(k, config.Pmin, config.Pmax, 1)


def tx_power_mean_square(m_u, L_pb: float, config: ScenarioConfig) -> float:
    k = float(required_sinr(m_u, config)) * L_pb * config.sigma2
    return clipped_power_moment(k, config.Pmin, config.Pmax, 2)


@dataclass(frozen=True)
class PowerStats:
    """Per-instant mean and mean-square of the PU transmit power."""

    mean: np.ndarray
    mean_square: np.ndarray

    def __len__(self):
        return len(self.mean)


def power_stats(m_u, L_pb: float, config: ScenarioConfig) -> PowerStats:
    """Moments for each instant; computed once per distinct required SINR."""
    omegas = np.atleast_1d(required_sinr(np.asarray(m_u), config)).astype(float)
    uniq, inv = np.unique(omegas, return_inverse=True)
    m1 = np.empty(len(uniq))
    m2 = np.empty(len(uniq))
    for j, om in enumerate(uniq):
        k = om * L_pb * config.sigma2
        m1[j] = clipped_power_moment(k, config.Pmin, config.Pmax, 1)
        m2[j] = clipped_power_moment(k, config.Pmin, config.Pmax, 2)
    return PowerStats(mean=m1[inv], mean_square=m2[inv])
