import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torus_contact.errors import InvalidCoordinateError, NotALoopError, UnsupportedGluingError
from torus_contact.manifold import (
    IDENTITY,
    GluingMatrix,
    HomotopyClass2,
    HomotopyClass3,
    TorusPoint,
    class_of_polyline,
    fiber_winding,
    normalize,
    p3_projection,
)

TAU = 2 * math.pi
SHEAR = GluingMatrix(1, 1, 0, 1)
CAT = GluingMatrix(2, 1, 1, 1)
reals = st.floats(-50.0, 50.0, allow_nan=False)
gluings = st.sampled_from([IDENTITY, SHEAR, CAT, GluingMatrix(0, -1, 1, 0)])


def test_identity_wraps_z():
    q = normalize((0.1, 0.2, TAU + 0.3))
    assert q.close_to(TorusPoint(0.1, 0.2, 0.3))


def test_normalized_input_unchanged():
    assert normalize((1.0, 2.0, 0.5)) == TorusPoint(1.0, 2.0, 0.5)


def test_shear_applied_once_per_crossing():
    q = normalize((1.0, 2.0, TAU + 0.1), SHEAR)
    assert q.close_to(TorusPoint(3.0, 2.0, 0.1))
    # going back down applies the inverse and recovers the start
    back = normalize((q.x, q.y, q.z - TAU), SHEAR)
    assert back.close_to(normalize((1.0, 2.0, 0.1)))


def test_gluing_must_be_unimodular():
    with pytest.raises(UnsupportedGluingError):
        GluingMatrix(2, 0, 0, 1)
    assert (SHEAR @ SHEAR.inverse()).is_identity
    assert SHEAR.power(-2) == GluingMatrix(1, -2, 0, 1)
    assert GluingMatrix.parse("2,1,1,1") == CAT


@pytest.mark.parametrize("bad", [(math.nan, 0, 0), (0, math.inf, 0), (0, 0, -math.inf)])
def test_non_finite_rejected(bad):
    with pytest.raises(InvalidCoordinateError):
        normalize(bad)


@given(reals, reals, reals, gluings)
def test_normalize_idempotent_and_in_range(x, y, z, A):
    q = normalize((x, y, z), A)
    for c in (q.x, q.y, q.z):
        assert 0.0 <= c < TAU
    assert normalize(q, A).close_to(q)


@given(reals, reals, reals, gluings)
def test_upward_then_downward_crossing_round_trips(x, y, z, A):
    up = normalize((x, y, z + TAU), A)
    assert normalize((up.x, up.y, up.z - TAU), A).close_to(normalize((x, y, z), A), 1e-7)


@pytest.mark.parametrize(
    "c, p", [(HomotopyClass3(2, 5, 0), 0), (HomotopyClass3(0, 0, 3), 3), (HomotopyClass3(1, -1, -2), -2)]
)
def test_p3_projection(c, p):
    assert p3_projection(c) == p


def test_straight_x_loop():
    assert class_of_polyline([(0, 0, 0), (TAU, 0, 0)]) == HomotopyClass3(1, 0, 0)


def test_z_excursion():
    verts = [(0, 0, 0), (0, 0, 1.0), (0, 0, TAU)]
    assert class_of_polyline(verts) == HomotopyClass3(0, 0, 1)
    assert fiber_winding(verts) == 1


def test_reeb_orbit_of_alpha1_in_class_11():
    # the alpha_1 Reeb field points along (1, 1) at z = pi/4; flow for time 2 pi sqrt 2
    z = math.pi / 4
    s = np.linspace(0.0, TAU * math.sqrt(2), 9)
    verts = np.column_stack([s * math.cos(z), s * math.sin(z), np.full_like(s, z)])
    assert class_of_polyline(verts) == HomotopyClass3(1, 1, 0)


def test_open_polyline_is_not_a_loop():
    with pytest.raises(NotALoopError):
        class_of_polyline([(0, 0, 0), (1.0, 0, 0)])


def test_twisted_gluing_refuses_z3_decomposition():
    verts = [(0, 0, 0), (0, 0, TAU)]
    with pytest.raises(UnsupportedGluingError):
        class_of_polyline(verts, SHEAR)
    # the fiber winding is still defined; (0, 0) is fixed by A
    assert fiber_winding(verts, SHEAR) == 1


lattice = st.tuples(st.integers(-3, 3), st.integers(-3, 3), st.integers(-3, 3))


def _loop(base, k, wiggle):
    end = base + TAU * np.asarray(k, dtype=float)
    mid = 0.5 * (base + end) + wiggle
    return [base, mid, end]


@settings(max_examples=50)
@given(lattice, lattice, st.tuples(reals, reals, reals))
def test_polyline_class_additive_under_concatenation(k1, k2, start):
    base = np.asarray(start)
    a = _loop(base, k1, np.array([0.3, -0.2, 0.1]))
    b = _loop(a[-1], k2, np.array([-1.0, 0.5, 2.0]))
    total = class_of_polyline(a + b[1:])
    assert total == class_of_polyline(a) + class_of_polyline(b)
    assert p3_projection(total) == k1[2] + k2[2]


def test_class_parse():
    assert HomotopyClass2.parse("2,-3") == HomotopyClass2(2, -3)
    assert HomotopyClass2(0, 0).is_zero
