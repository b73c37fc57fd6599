import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tensortom.geometry import (Direction, GeometryError, RayClass, boundary_point, chord, classify,
                                outgoing_mask, travel_times)


def test_travel_times_center():
    for phi in (0.0, 0.7, 3.0, 5.5):
        tm, tp = travel_times((0.0, 0.0), Direction(phi))
        assert tm == pytest.approx(1.0, abs=1e-15)
        assert tp == pytest.approx(1.0, abs=1e-15)


def test_travel_times_on_diameter():
    tm, tp = travel_times((0.5, 0.0), Direction(0.0))
    assert (tm, tp) == pytest.approx((1.5, 0.5), abs=1e-15)


def test_travel_times_off_axis():
    # sqrt(1 - 0.36)
    tm, tp = travel_times((0.0, 0.6), Direction(0.0))
    assert tm == pytest.approx(0.8, abs=1e-14)
    assert tp == pytest.approx(0.8, abs=1e-14)


def test_travel_times_outside_raises():
    with pytest.raises(GeometryError):
        travel_times((0.9, 0.9), Direction(0.0))


def test_classify_examples():
    zeta = boundary_point(0.0)
    assert classify(zeta, Direction(0.0)) is RayClass.OUTGOING
    assert classify(zeta, Direction(math.pi)) is RayClass.INCOMING
    assert classify(zeta, Direction(math.pi / 2)) is RayClass.TANGENT


def test_boundary_point_examples():
    p = boundary_point(0.0)
    assert np.allclose(p.position, [1.0, 0.0]) and np.allclose(p.normal, [1.0, 0.0])
    assert np.allclose(boundary_point(math.pi / 2).position, [0.0, 1.0], atol=1e-15)
    a, b = boundary_point(2 * math.pi + 0.3), boundary_point(0.3)
    assert np.allclose(a.position, b.position, atol=1e-15)


def test_direction_frame():
    d = Direction(1.234)
    th, tp = d.theta, d.theta_perp
    assert np.linalg.norm(th) == pytest.approx(1.0)
    assert th @ tp == pytest.approx(0.0, abs=1e-15)
    assert np.linalg.det(np.column_stack([th, tp])) == pytest.approx(1.0)


points = st.tuples(st.floats(0.0, 0.999), st.floats(0.0, 2 * math.pi)).map(
    lambda rp: (rp[0] * math.cos(rp[1]), rp[0] * math.sin(rp[1])))
angles = st.floats(0.0, 2 * math.pi, exclude_max=True)


@settings(max_examples=200, deadline=None)
@given(points, angles)
def test_chord_endpoints_on_circle(x, phi):
    c = chord(x, Direction(phi))
    assert np.linalg.norm(c.exit_point) == pytest.approx(1.0, abs=1e-12)
    assert np.linalg.norm(c.entry_point) == pytest.approx(1.0, abs=1e-12)
    assert c.tau_minus >= 0 and c.tau_plus >= 0
    assert c.length <= 2.0 + 1e-12


@settings(max_examples=200, deadline=None)
@given(points, angles)
def test_chord_reversal_symmetry(x, phi):
    tm, tp = travel_times(x, Direction(phi))
    tm2, tp2 = travel_times(x, Direction(phi + math.pi))
    assert tp == pytest.approx(tm2, rel=0, abs=1e-14)
    assert tm == pytest.approx(tp2, rel=0, abs=1e-14)


@settings(max_examples=200, deadline=None)
@given(angles, angles)
def test_classify_antisymmetric(beta, phi):
    zeta = boundary_point(beta)
    a, b = classify(zeta, Direction(phi)), classify(zeta, Direction(phi + math.pi))
    if a is RayClass.TANGENT:
        assert b is RayClass.TANGENT
    else:
        assert {a, b} == {RayClass.INCOMING, RayClass.OUTGOING}


def test_outgoing_mask_matches_classify(rng):
    betas = rng.uniform(0, 2 * math.pi, 50)
    phis = rng.uniform(0, 2 * math.pi, 50)
    mask = outgoing_mask(betas, phis)
    for b, p, m in zip(betas, phis, mask):
        assert m == (classify(boundary_point(b), Direction(p)) is RayClass.OUTGOING)
