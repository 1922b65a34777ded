"""Prior moments of the inverse PU-SU path loss for a PU on a BS-centred circle."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .model import PropagationModel
from .uplink import NumericalError

QUAD_EPSREL = 1e-8
SINGULAR_GAP_M = 1.0


class SingularGeometryError(ValueError):
    """SU lies (almost) on the PU circle; the mean-square integral blows up."""


def pu_su_distance(r0, r1, theta):
    return np.sqrt(np.maximum(r0 ** 2 + r1 ** 2 - 2.0 * r0 * r1 * np.cos(theta), 0.0))


@dataclass(frozen=True)
class GeometryPrior:
    r0: float
    r1: float
    x_mean: float
    x_mean_square: float


def _circle_average(f, r0: float, r1: float, epsrel: float) -> float:
    # integrand is even in theta: average over [0, pi]
    res = integrate.quad(f, 0.0, math.pi, epsabs=0.0, epsrel=epsrel, limit=400, full_output=1)
    if len(res) > 3:
        raise NumericalError(f"circle quadrature failed (r0={r0}, r1={r1}): {res[3]}")
    return res[0] / math.pi


def x_moments(r0: float, r1: float, model: PropagationModel, epsrel: float = QUAD_EPSREL) -> tuple[float, float]:
    """Mean and mean-square of 1/L(D) with the PU angle uniform on the circle."""
    if r0 < 0 or r1 < 0:
        raise ValueError("radii must be non-negative")
    if abs(r0 - r1) < SINGULAR_GAP_M:
        raise SingularGeometryError(f"|r0 - r1| = {abs(r0 - r1):.3g} m < {SINGULAR_GAP_M} m")
    a, L0 = model.alpha, model.L0
    if r1 == 0.0 or r0 == 0.0:
        x = 1.0 / (L0 * max(r0, r1) ** a)
        return x, x * x
    # D^2 = (r0 - r1)^2 + 4 r0 r1 sin^2(theta/2) avoids cancellation near theta = 0
    gap2, cross = (r0 - r1) ** 2, 4.0 * r0 * r1

    def inv_loss(theta):
        s = math.sin(0.5 * theta)
        return 1.0 / (L0 * (gap2 + cross * s * s) ** (0.5 * a))

    m1 = _circle_average(inv_loss, r0, r1, epsrel)
    m2 = _circle_average(lambda t: inv_loss(t) ** 2, r0, r1, epsrel)
    return m1, m2


def prior_on_circle(r0: float, r1: float, model: PropagationModel) -> GeometryPrior:
    m1, m2 = x_moments(r0, r1, model)
    return GeometryPrior(r0=r0, r1=r1, x_mean=m1, x_mean_square=m2)


def geometry_prior(L_hat_pb: float, r1: float, model: PropagationModel) -> GeometryPrior:
    """Prior for a PU on the circle whose radius the estimated loss implies."""
    return prior_on_circle(float(model.distance_of(L_hat_pb)), r1, model)
