"""Downlink SINR, the AMC assignment function and per-instant mode likelihoods."""

from __future__ import annotations

import numpy as np

from .model import AmcTable


def downlink_sinr(P0, h2, sigma2, L_bp):
    return P0 * h2 / (sigma2 * L_bp)


def assign_mode(table: AmcTable, S):
    """Highest mode whose threshold is <= S; SINR below the first threshold still gets mode 1.

    Works elementwise on arrays and returns int mode numbers (1-based).
    """
    m = np.searchsorted(table.thresholds, S, side="right")
    m = np.maximum(m, 1)
    return int(m) if np.ndim(m) == 0 else m.astype(np.int64)


def _lower_edges(table: AmcTable) -> np.ndarray:
    # mode 1 absorbs the outage region below Omega(1)
    lo = table.thresholds.copy()
    lo[0] = 0.0
    return lo


def mode_probabilities(table: AmcTable, L_bp, P0: float, sigma2: float) -> np.ndarray:
    """P(m | L_bp) for every mode, shape ``(..., M)``; rows sum to 1."""
    c = np.asarray(L_bp, dtype=float)[..., None] * sigma2 / P0
    lo = _lower_edges(table)
    hi = table.edges[1:]
    return np.exp(-lo * c) - np.exp(-hi * c)


def log_mode_probabilities(table: AmcTable, L_bp, P0: float, sigma2: float) -> np.ndarray:
    """log P(m | L_bp), computed stably as -a*c + log1p(-exp(-(b-a)*c))."""
    c = np.asarray(L_bp, dtype=float)[..., None] * sigma2 / P0
    lo = _lower_edges(table)
    hi = table.edges[1:]
    with np.errstate(divide="ignore", invalid="ignore"):
        out = -lo * c + np.log1p(-np.exp(-(hi - lo) * c))
    return out


def mode_likelihood(table: AmcTable, m: int, L_bp: float, P0: float, sigma2: float) -> float:
    """Probability that the BS assigns mode ``m`` given downlink loss ``L_bp``.

    exp(-Omega(m) c) - exp(-Omega(m+1) c) with c = L_bp sigma2 / P0 and Omega(M+1) = inf.
    Mode 1 covers everything below Omega(2).
    """
    if not 1 <= m <= table.M:
        raise ValueError(f"mode {m} outside 1..{table.M}")
    c = L_bp * sigma2 / P0
    lo = 0.0 if m == 1 else table.omega(m)
    hi = table.omega(m + 1)
    return float(np.exp(-lo * c) - np.exp(-hi * c))
