"""MAP estimate of the BS-PU path loss from a downlink AMC mode sequence."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .amc import log_mode_probabilities
from .model import PropagationModel, ScenarioConfig

GRID_POINTS = 2048
REFINE_WIDTH_DB = 0.01
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class PathLossEstimate:
    L_hat: float
    grid_points: int = 0
    log_density: float = math.nan
    at_lower_edge: bool = False
    at_upper_edge: bool = False
    saturated: bool = False  # every observed mode was the highest one
    notes: dict = field(default_factory=dict, compare=False)

    @property
    def L_hat_dB(self) -> float:
        return 10.0 * math.log10(self.L_hat)


def pathloss_prior_pdf(model: PropagationModel, R0: float, Rmin: float, L):
    """Density of the BS-PU path loss for a PU uniform over the annulus [Rmin, R0]."""
    L = np.asarray(L, dtype=float)
    lo, hi = model.L0 * Rmin ** model.alpha, model.L0 * R0 ** model.alpha
    a = model.alpha
    with np.errstate(divide="ignore", invalid="ignore"):
        dens = 2.0 / (a * model.L0 * (R0 ** 2 - Rmin ** 2)) * (L / model.L0) ** (2.0 / a - 1.0)
    dens = np.where((L >= lo) & (L <= hi), dens, 0.0)
    return float(dens) if dens.ndim == 0 else dens


def log_prior(model: PropagationModel, R0: float, Rmin: float, L):
    a = model.alpha
    return (math.log(2.0 / (a * model.L0 * (R0 ** 2 - Rmin ** 2)))
            + (2.0 / a - 1.0) * np.log(np.asarray(L, dtype=float) / model.L0))


def mode_counts(m_d, M: int) -> np.ndarray:
    m_d = np.asarray(m_d)
    if m_d.size == 0:
        raise ValueError("mode sequence is empty")
    if m_d.min() < 1 or m_d.max() > M:
        raise ValueError(f"modes must lie in 1..{M}")
    return np.bincount(m_d.astype(np.int64), minlength=M + 1)[1:]


def _log_density_from_counts(counts, L, config: ScenarioConfig, p0: float):
    L = np.asarray(L, dtype=float)
    logp = log_mode_probabilities(config.amc, L, p0, config.sigma2)
    nz = counts > 0
    # 0 * -inf must not poison unobserved modes
    ll = (logp[..., nz] * counts[nz]).sum(axis=-1)
    return log_prior(config.propagation, config.R0, config.Rmin, L) + ll


def joint_log_density(m_d, L_bp, config: ScenarioConfig) -> float:
    """log f(m_d, L_bp): log prior plus the sum of per-instant log mode probabilities.

    Outside the prior support the result is -inf.
    """
    counts = mode_counts(m_d, config.amc.M)
    L = np.asarray(L_bp, dtype=float)
    out = _log_density_from_counts(counts, L, config, config.resolved_p0())
    out = np.where((L >= config.loss_min * (1 - 1e-12)) & (L <= config.loss_max * (1 + 1e-12)), out, -np.inf)
    return float(out) if out.ndim == 0 else out


def _golden_max(f, a: float, b: float, width: float):
    c, d = b - _INVPHI * (b - a), a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > width:
        if fc >= fd:  # ties move toward smaller L
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def estimate_L_bp(m_d, config: ScenarioConfig, grid_points: int = GRID_POINTS,
                  refine_width_db: float = REFINE_WIDTH_DB) -> PathLossEstimate:
    """Argmax of the joint mode/path-loss density over the prior support.

    A geometric grid locates the basin, golden-section search on the dB axis
    refines it. Ties go to the smaller loss.
    """
    counts = mode_counts(m_d, config.amc.M)
    p0 = config.resolved_p0()
    lo_db, hi_db = 10 * math.log10(config.loss_min), 10 * math.log10(config.loss_max)
    grid_db = np.linspace(lo_db, hi_db, grid_points)
    vals = _log_density_from_counts(counts, 10.0 ** (grid_db / 10.0), config, p0)
    j = int(np.argmax(vals))  # first max -> smallest L

    def f(x_db):
        return float(_log_density_from_counts(counts, 10.0 ** (x_db / 10.0), config, p0))

    best_db, best_val = grid_db[j], float(vals[j])
    a, b = grid_db[max(j - 1, 0)], grid_db[min(j + 1, grid_points - 1)]
    x_db, fx = _golden_max(f, a, b, refine_width_db)
    if fx > best_val:
        best_db, best_val = x_db, fx

    saturated = bool(counts[:-1].sum() == 0)
    return PathLossEstimate(
        L_hat=10.0 ** (best_db / 10.0),
        grid_points=grid_points,
        log_density=best_val,
        at_lower_edge=j == 0,
        at_upper_edge=j == grid_points - 1,
        saturated=saturated,
    )


def uplink_loss_from_downlink(L_hat_bp, duplex: str = "tdd", offset_db: float = 0.0):
    """TDD: reciprocal loss. FDD: shift by a constant dB offset.

    Accepts a bare linear loss or a :class:`PathLossEstimate` (diagnostics are kept).
    """
    if duplex == "tdd":
        factor = 1.0
    elif duplex == "fdd":
        factor = 10.0 ** (offset_db / 10.0)
    else:
        raise ValueError(f"unknown duplex {duplex!r}")
    if isinstance(L_hat_bp, PathLossEstimate):
        return replace(L_hat_bp, L_hat=L_hat_bp.L_hat * factor)
    return L_hat_bp * factor
