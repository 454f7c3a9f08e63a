import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torus_contact.errors import InvalidWindowError
from torus_contact.stability import (
    DiracDeformation,
    eta_from_jumps,
    evaluate,
    random_deformation,
    second_variation_closed,
    second_variation_quadrature,
    second_variation_telescoping,
)


def test_single_jump_profile():
    prof = eta_from_jumps(DiracDeformation.single(1.0, 0.0, 0.5))
    assert prof.slopes == (0.5, -0.5)
    assert prof(1.0) == pytest.approx(0.0, abs=1e-15)


def test_full_window_jump_is_flat():
    d = DiracDeformation.single(2.0, 0.0, 1.0)
    prof = eta_from_jumps(d)
    assert all(s == 0 for s in prof.slopes)
    assert second_variation_closed(d) == 0.0


def test_zero_amplitude():
    d = DiracDeformation.single(0.0, 0.2, 0.4)
    assert np.all(eta_from_jumps(d)(np.linspace(0, 1, 11)) == 0)
    assert second_variation_quadrature(d) == 0.0
    assert not d.has_proper_jump


def _two_windows(rows):
    return DiracDeformation.from_rows(rows)


def test_closed_form_examples():
    one = _two_windows([(1, 1, 0.1, 0.35, 0.0, 0.5), (0, 1, 0.6, 0.7, 0.5, 1.0)])
    assert second_variation_closed(one) == pytest.approx(1 / 8)
    assert abs(second_variation_quadrature(one) - 1 / 8) < 1e-12
    full = DiracDeformation.single(1.0, 0.0, 1.0)
    assert second_variation_closed(full) == 0.0
    two = _two_windows([(1, 1, 0.1, 0.225, 0.0, 0.5), (2, -1, 0.6, 0.725, 0.5, 1.0)])
    assert second_variation_closed(two) == pytest.approx(15 / 32)
    assert second_variation_quadrature(two) == pytest.approx(15 / 32, rel=1e-12)
    assert second_variation_telescoping(two) == pytest.approx(15 / 32, rel=1e-12)


def test_profile_closes_in_every_window():
    rng = np.random.default_rng(3)
    for _ in range(50):
        d = random_deformation(rng)
        assert eta_from_jumps(d).closes_per_window(d)


def test_random_agreement_and_positivity():
    rng = np.random.default_rng(2024)
    for _ in range(100):
        row = evaluate(random_deformation(rng))
        assert row.max_relative_gap < 1e-10
        assert row.proper and min(row.closed, row.quadrature, row.telescoping) > 0


@settings(max_examples=60)
@given(st.integers(0, 2**32 - 1), st.floats(0.01, 100.0))
def test_scaling_law(seed, c):
    d = random_deformation(np.random.default_rng(seed))
    rows = [(c * j.amplitude, j.sign, j.t_minus, j.t_plus, w.T_minus, w.T_plus) for j, w in zip(d.jumps, d.windows)]
    scaled = DiracDeformation.from_rows(rows)
    assert second_variation_closed(scaled) == pytest.approx(c**2 * second_variation_closed(d), rel=1e-12)
    assert second_variation_quadrature(scaled) == pytest.approx(c**2 * second_variation_quadrature(d), rel=1e-10)


@pytest.mark.parametrize(
    "rows",
    [
        [(1, 1, 0.1, 0.6, 0.0, 0.5), (1, 1, 0.6, 0.7, 0.5, 1.0)],  # jump leaves its window
        [(1, 1, 0.1, 0.2, 0.0, 0.4), (1, 1, 0.6, 0.7, 0.5, 1.0)],  # gap between windows
        [(1, 1, 0.1, 0.2, 0.0, 0.9)],  # does not reach 1
        [(1, 2, 0.1, 0.2, 0.0, 1.0)],  # bad sign
        [(-1, 1, 0.1, 0.2, 0.0, 1.0)],  # negative amplitude
        [(1, 1, 0.3, 0.2, 0.0, 1.0)],  # t- > t+
        [],
    ],
)
def test_invalid_windows(rows):
    with pytest.raises(InvalidWindowError):
        DiracDeformation.from_rows(rows)


def test_quadrature_needs_samples():
    with pytest.raises(ValueError):
        second_variation_quadrature(DiracDeformation.single(1.0, 0.2, 0.4), samples=4)


def test_jump_file(tmp_path):
    path = tmp_path / "jumps.txt"
    path.write_text("# A,sign,t-,t+,T-,T+\n1,1,0.1,0.2,0,0.5\n1,-1,0.6,0.7,0.5,1\n")
    d = DiracDeformation.load(path)
    assert len(d.jumps) == 2 and d.balanced
    path.write_text("1,1,0.1,0.2,0\n")
    with pytest.raises(InvalidWindowError):
        DiracDeformation.load(path)


def test_balanced_flag():
    assert not DiracDeformation.single(1.0, 0.2, 0.4).balanced
