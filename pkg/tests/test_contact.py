import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torus_contact.contact import (
    CLOSED_FORM_TOL,
    FD_TOL,
    Giroux,
    Linear,
    ParametricH,
    SampledH,
    alpha_at,
    beta_at,
    check_invariance,
    frame_at,
    lie_bracket_fd,
    reeb_at,
    v_at,
    verify_structure,
)
from torus_contact.errors import DegenerateDerivativeError, InvalidFamilyError, RangeError
from torus_contact.manifold import GluingMatrix, TorusPoint

TAU = 2 * math.pi


def at(z, x=0.0, y=0.0):
    return TorusPoint(x, y, z)


def test_alpha_examples():
    np.testing.assert_allclose(alpha_at(Linear(1), at(0.0)), [1, 0, 0], atol=1e-15)
    np.testing.assert_allclose(alpha_at(Linear(2), at(math.pi / 4)), [0, 1, 0], atol=1e-15)
    g = Giroux(ParametricH(1), 1)
    np.testing.assert_allclose(alpha_at(g, at(math.pi)), [-1, 0, 0], atol=1e-15)


def test_reeb_examples(giroux2):
    np.testing.assert_allclose(reeb_at(Linear(1), at(0.0)), [1, 0, 0], atol=1e-15)
    np.testing.assert_allclose(reeb_at(Linear(3), at(math.pi / 3)), [-1, 0, 0], atol=1e-15)
    np.testing.assert_allclose(reeb_at(giroux2, at(0.0)), [1, 0, 0], atol=1e-15)


def test_v_examples(giroux2):
    np.testing.assert_allclose(v_at(Linear(2), at(1.234, 3.0, 4.0)), [0, 0, 0.5])
    np.testing.assert_allclose(v_at(giroux2, at(0.0)), [0, 0, 1 / 2.3])
    np.testing.assert_allclose(v_at(Giroux(ParametricH(1), 1), at(2.0)), [0, 0, 1.0])


def test_beta_examples():
    np.testing.assert_allclose(beta_at(Linear(1), at(0.0)), [0, 1, 0], atol=1e-15)
    np.testing.assert_allclose(beta_at(Linear(1), at(math.pi / 2)), [-1, 0, 0], atol=1e-15)


def _dalpha_fd(f, q, h=1e-6):
    """W_ij = d_i alpha_j - d_j alpha_i by central differences of alpha."""
    J = np.empty((3, 3))
    for i in range(3):
        e = np.zeros(3)
        e[i] = h
        J[i] = (f.alpha_field(q + e) - f.alpha_field(q - e)) / (2 * h)
    return J - J.T


@pytest.mark.parametrize("f", [Linear(1), Linear(3), Giroux(ParametricH(2, 0.3, 1), 2)])
def test_beta_matches_fd_dalpha_of_v(f):
    rng = np.random.default_rng(7)
    worst = 0.0
    for q in rng.uniform(0, TAU, (100, 3)):
        beta_fd = f.v_field(q) @ _dalpha_fd(f, q)
        worst = max(worst, float(np.max(np.abs(beta_fd - f.beta_field(q)))))
    assert worst < 1e-6


def test_closed_form_dalpha_matches_fd(giroux2):
    for z in np.linspace(0, TAU, 7):
        q = np.array([0.3, 0.4, z])
        np.testing.assert_allclose(giroux2.dalpha_matrix(z), _dalpha_fd(giroux2, q), atol=1e-8)


def test_bracket_examples():
    f = Linear(1)
    q = at(0.0)
    np.testing.assert_allclose(lie_bracket_fd(f.reeb_field, f.v_field, q), [0, -1, 0], atol=1e-6)
    np.testing.assert_allclose(lie_bracket_fd(f.v_field, f.v_field, q), [0, 0, 0], atol=0)

    def xv(r):
        return lie_bracket_fd(f.reeb_field, f.v_field, r)

    np.testing.assert_allclose(lie_bracket_fd(f.reeb_field, xv, q, 1e-3), [0, 0, 0], atol=1e-6)


def test_bracket_against_closed_form():
    # [xi, v] = sin(nz) d/dx - cos(nz) d/dy for alpha_n
    f = Linear(3)
    for z in np.linspace(0, TAU, 11):
        b = lie_bracket_fd(f.reeb_field, f.v_field, at(z))
        np.testing.assert_allclose(b, [math.sin(3 * z), -math.cos(3 * z), 0], atol=1e-8)


def test_bracket_step_bounds():
    f = Linear(1)
    for step in (0.0, -1e-5, 0.1):
        with pytest.raises(ValueError):
            lie_bracket_fd(f.reeb_field, f.v_field, at(0.0), step)


def test_frame_sample_identities(giroux2):
    fr = frame_at(giroux2, at(1.3, 0.5, 2.0))
    assert abs(fr.alpha @ fr.xi - 1) < CLOSED_FORM_TOL
    assert abs(fr.beta @ fr.xi) < CLOSED_FORM_TOL
    assert abs(fr.alpha @ fr.v) < CLOSED_FORM_TOL
    assert abs(fr.beta @ fr.w - 1) < FD_TOL
    assert abs(fr.tau) < FD_TOL and abs(fr.mu_bar) < FD_TOL


@pytest.mark.parametrize(
    "f, field",
    [(Linear(1), "tau_max"), (Linear(4), "volume_equality"), (Giroux(ParametricH(2, 0.3, 1), 2), "mu_bar_max")],
)
def test_verify_structure_examples(f, field):
    r = verify_structure(f, 8)
    assert r.passed, r.checks()
    limit = CLOSED_FORM_TOL if field in r.CLOSED_FORM else FD_TOL
    assert getattr(r, field) < limit


def test_volume_coefficient_is_minus_n():
    r = verify_structure(Linear(4), 2)
    assert r.volume_coefficient == pytest.approx(4.0, abs=1e-12)


def test_verify_structure_rejects_tiny_grid():
    with pytest.raises(ValueError):
        verify_structure(Linear(1), 1)


def test_non_monotone_h_rejected():
    with pytest.raises(InvalidFamilyError):
        ParametricH(1, 1.5, 1)
    with pytest.raises(InvalidFamilyError):
        Giroux(ParametricH(1, 0.0, 1), 2)  # offset 2 pi is below 2 pi n = 4 pi


def test_equality_case_is_admitted_and_flagged():
    f = Giroux(ParametricH(3, 0.2, 1), 2)
    assert f.pinching_equality
    assert not Giroux(ParametricH(2, 0.2, 1), 2).pinching_equality


def test_parametric_inverse_round_trip():
    h = ParametricH(3, 2.5, 1)
    z = np.linspace(-20, 20, 401)
    np.testing.assert_allclose(h.inverse(h.value(z)), z, atol=1e-12)


def test_invariance_examples():
    # zero up to the round-off of cos(3 z + 6 pi) against cos(3 z)
    assert check_invariance(Giroux(ParametricH(3), 3)).max_residual < 1e-13
    periodic = SampledH.from_function(lambda z: 2 * z + 0.4 * math.sin(3 * z), 2 * TAU)
    assert check_invariance(Giroux(periodic, 2)).invariant
    # a table of z + 0.5 whose declared offset is read off its end value
    shifted = SampledH.from_function(lambda z: z + 0.5, TAU + 0.5)
    rep = check_invariance(Giroux(shifted, 1))
    assert not rep.invariant and rep.max_residual > 0.1


def test_invariance_with_twisted_gluing():
    # -I maps (cos, sin) to its negative, which a half-turn of h compensates
    h = ParametricH(1, 0.0, 1)
    flip = SampledH.from_function(lambda z: 1.5 * z, 3 * math.pi)
    assert not check_invariance(Giroux(h, 1, GluingMatrix(-1, 0, 0, -1))).invariant
    assert check_invariance(Giroux(flip, 1, GluingMatrix(-1, 0, 0, -1))).invariant


def test_sampled_h_file_round_trip(tmp_path):
    h = SampledH.from_function(lambda z: 2 * z + 0.3 * math.sin(z), 2 * TAU, samples=65)
    path = tmp_path / "h.txt"
    path.write_text(h.dumps())
    back = SampledH.load(path)
    assert back.zs == h.zs and back.hs == h.hs and back.offset == h.offset


def test_sampled_h_tracks_parametric():
    p = ParametricH(2, 0.3, 1)
    s = SampledH.from_function(p.value, p.offset, samples=513)
    z = np.linspace(-3, 9, 97)
    np.testing.assert_allclose(s.value(z), p.value(z), atol=1e-6)
    np.testing.assert_allclose(s.derivative(z), p.derivative(z), atol=1e-3)
    w = np.linspace(-5, 30, 50)
    np.testing.assert_allclose(s.value(s.inverse(w)), w, atol=1e-10)


@pytest.mark.parametrize(
    "text",
    ["0,0\n6.283185307179586,1\n", "offset=1\n0,0\n", "offset=1\n0,0\n3,1\n6.283185307179586,0.5\n"],
)
def test_sampled_h_bad_tables(text):
    with pytest.raises(InvalidFamilyError):
        SampledH.parse(text)


def test_sampled_inverse_outside_table_range():
    h = SampledH((0.0, math.pi, TAU), (0.0, math.pi, TAU), TAU + 1.0)
    with pytest.raises(RangeError):
        h.inverse(TAU + 0.5)


def test_degenerate_derivative():
    h = SampledH((0.0, 1.0, 2.0, TAU), (0.0, 1.0, 1.0 + 1e-14, 7.0), TAU + 1)
    f = Giroux(h, 1)
    with pytest.raises(DegenerateDerivativeError):
        f.v_field(np.array([0.0, 0.0, 1.0]))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.floats(-20, 20), st.floats(-20, 20), st.floats(-20, 20))
def test_flat_giroux_equals_linear_exactly(n, x, y, z):
    g, lin = Giroux(ParametricH(n), n), Linear(n)
    q = np.array([x, y, z])
    for name in ("alpha_field", "reeb_field", "beta_field", "v_field"):
        assert np.array_equal(getattr(g, name)(q), getattr(lin, name)(q))
    assert np.array_equal(g.dalpha_matrix(z), lin.dalpha_matrix(z))
    assert g.advance(z, 1.7) == lin.advance(z, 1.7)
    assert g.fiber_period == lin.fiber_period
