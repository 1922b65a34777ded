import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from femtoloss.geometry import (SingularGeometryError, geometry_prior, pu_su_distance,
                                x_moments)
from femtoloss.model import PropagationModel, path_loss

MODEL = PropagationModel.from_db(15.3, 3.76)


def trapezoid_oracle(r0, r1, model, n=10 ** 6):
    # periodic integrand: uniform-grid trapezoid over a full turn
    theta = np.arange(n) * (2 * np.pi / n)
    inv = 1.0 / (model.L0 * pu_su_distance(r0, r1, theta) ** model.alpha)
    return inv.mean(), (inv ** 2).mean()


def test_distance_special_cases():
    assert pu_su_distance(300, 100, 0.0) == pytest.approx(200)
    assert pu_su_distance(300, 100, math.pi) == pytest.approx(400)
    for th in (0.1, 1.0, 3.0):
        assert pu_su_distance(250, 0, th) == pytest.approx(250)


def test_su_at_bs():
    m1, m2 = x_moments(200.0, 0.0, MODEL)
    assert m1 == pytest.approx(1 / (MODEL.L0 * 200.0 ** MODEL.alpha), rel=1e-15)
    assert m2 == m1 * m1


@pytest.mark.parametrize("r0,r1", [(100, 400), (250, 100), (400, 100), (100, 250), (398, 400)])
def test_matches_dense_grid(r0, r1):
    m1, m2 = x_moments(r0, r1, MODEL)
    o1, o2 = trapezoid_oracle(r0, r1, MODEL)
    assert m1 == pytest.approx(o1, rel=1e-6)
    assert m2 == pytest.approx(o2, rel=1e-6)


def test_symmetric_in_radii():
    a = x_moments(100, 400, MODEL)
    b = x_moments(400, 100, MODEL)
    assert a == pytest.approx(b, rel=1e-10)


def test_singular_guard():
    with pytest.raises(SingularGeometryError):
        x_moments(100.0, 100.5, MODEL)
    x_moments(100.0, 101.0, MODEL)


def test_cauchy_schwarz_grid():
    radii = np.linspace(40, 500, 20)
    for r0 in radii:
        for r1 in radii + 3.7:
            m1, m2 = x_moments(r0, r1, MODEL)
            assert m2 >= m1 * m1 * (1 - 1e-12)


@settings(max_examples=30, deadline=None)
@given(st.floats(35, 300), st.floats(5, 150))
def test_moments_decrease_as_su_recedes(r0, step):
    r1a = r0 + 2.0
    a = x_moments(r0, r1a, MODEL)
    b = x_moments(r0, r1a + step, MODEL)
    assert b[0] < a[0] and b[1] < a[1]


@pytest.mark.parametrize("r0,r1", [(100, 400), (250, 100), (100, 102)])
def test_tolerance_halving_invariance(r0, r1):
    a = x_moments(r0, r1, MODEL, epsrel=1e-8)
    b = x_moments(r0, r1, MODEL, epsrel=5e-9)
    assert b[0] == pytest.approx(a[0], rel=1e-9)
    assert b[1] == pytest.approx(a[1], rel=1e-9)


def test_prior_from_loss():
    g = geometry_prior(path_loss(MODEL, 250.0), 100.0, MODEL)
    assert g.r0 == pytest.approx(250.0)
    assert (g.x_mean, g.x_mean_square) == pytest.approx(x_moments(250.0, 100.0, MODEL), rel=1e-9)
