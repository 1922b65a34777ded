"""Linear MMSE estimate of the inverse PU-SU path loss from SU received powers."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg
from scipy.linalg import lapack

from .geometry import GeometryPrior
from .model import PropagationModel
from .uplink import PowerStats

COND_LIMIT = 1e12
RIDGE = 1e-10


@dataclass(frozen=True)
class CorrelationSystem:
    cross: np.ndarray  # E[x P_r,i]
    auto: np.ndarray  # E[P_r,i P_r,j]


@dataclass(frozen=True)
class XEstimate:
    x_hat: float
    weights: np.ndarray
    cond_estimate: float
    regularized: bool


def build_correlations(stats: PowerStats, prior: GeometryPrior, sigma2: float) -> CorrelationSystem:
    """Raw (not mean-removed) cross- and auto-correlations of x and the received powers.

    Off-diagonal entries use each instant's own mean power, which reduces to a
    single shared value when the power statistics are time-invariant.
    """
    p1 = np.asarray(stats.mean, dtype=float)
    p2 = np.asarray(stats.mean_square, dtype=float)
    xm, xs = prior.x_mean, prior.x_mean_square
    s2 = sigma2
    cross = p1 * xs + s2 * xm
    a = p1 * xm * s2
    auto = np.outer(p1, p1) * xs + (np.add.outer(a, a) + s2 * s2)
    np.fill_diagonal(auto, 2.0 * p2 * xs + 2.0 * p1 * xm * s2 + 3.0 * s2 * s2)
    return CorrelationSystem(cross=cross, auto=auto)


def _rcond(chol: np.ndarray, anorm: float) -> float:
    rcond, info = lapack.dpocon(chol, anorm)
    return float(rcond) if info == 0 else 0.0


def solve_weights(corr: CorrelationSystem) -> tuple[np.ndarray, float, bool]:
    """Solve auto @ w = cross by Cholesky; fall back to a small ridge if ill-conditioned."""
    auto = corr.auto
    scale = float(np.mean(np.diag(auto)))
    if not scale > 0:
        raise ValueError("auto-correlation has a non-positive diagonal")
    A = auto / scale
    b = corr.cross / scale
    anorm = float(np.abs(A).sum(axis=0).max())
    regularized = False
    try:
        c, low = linalg.cho_factor(A, lower=False, check_finite=False)
        rc = _rcond(c, anorm)
    except linalg.LinAlgError:
        rc = 0.0
    cond = 1.0 / rc if rc > 0 else np.inf
    if cond > COND_LIMIT:
        regularized = True
        A = A + RIDGE * np.eye(len(A))
        c, low = linalg.cho_factor(A, lower=False, check_finite=False)
        rc = _rcond(c, anorm + RIDGE)
        cond = 1.0 / rc if rc > 0 else np.inf
    w = linalg.cho_solve((c, low), b, check_finite=False)
    return w, cond, regularized


def estimate_x(corr: CorrelationSystem, P_r) -> XEstimate:
    P_r = np.asarray(P_r, dtype=float)
    if P_r.shape != corr.cross.shape:
        raise ValueError(f"expected {corr.cross.shape[0]} received powers, got {P_r.shape}")
    if np.any(P_r < 0):
        raise ValueError("received powers must be non-negative")
    w, cond, reg = solve_weights(corr)
    return XEstimate(x_hat=float(w @ P_r), weights=w, cond_estimate=cond, regularized=reg)


def max_plausible_loss(model: PropagationModel, R0: float) -> float:
    return model.L0 * (2.0 * R0) ** model.alpha


def pathloss_from_x(x_hat: float, model: PropagationModel, R0: float) -> tuple[float, bool]:
    """Invert x to a path loss; returns (loss, clamped). Non-positive or tiny x is clamped."""
    cap = max_plausible_loss(model, R0)
    if x_hat > 1.0 / cap:
        return 1.0 / x_hat, False
    return cap, True
