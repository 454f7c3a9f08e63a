import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torus_contact.contact import Giroux, Linear, ParametricH
from torus_contact.errors import InvalidConfigError
from torus_contact.flows import conjugacy_residual
from torus_contact.infinity import (
    CHARACTERISTIC,
    NOT_CRITICAL,
    TRUE_CPI,
    InfinityConfig,
    Piece,
    boundary_split_check,
    can_interact,
    classify,
    j_infinity,
    p3_of_config,
    realized_class,
    tower_configs,
)
from torus_contact.manifold import HomotopyClass2
from torus_contact.orbits import enumerate_orbits, generators_of

TAU = 2 * math.pi
G = HomotopyClass2


def circle(f=Linear(1), g=G(1, 0), j=0):
    return enumerate_orbits(f, g)[j]


def test_j_infinity_examples():
    c = circle()
    assert j_infinity(InfinityConfig.plain(c)) == pytest.approx(TAU)
    two = InfinityConfig(c, (Piece("xi", math.pi), Piece("v", TAU), Piece("xi", math.pi), Piece("v", -TAU)))
    assert j_infinity(two) == pytest.approx(TAU)
    opposite = InfinityConfig.from_cycles(c, [(0.2, 1), (0.7, -1)])
    assert j_infinity(opposite) == pytest.approx(TAU)


def test_classify_examples():
    c = circle(Linear(2))
    # v-flow time s moves z by s / 2 for alpha_2
    half_turn = InfinityConfig(c, (Piece("v", TAU), Piece("xi", c.action)))
    r = classify(half_turn)
    assert r.verdict == TRUE_CPI and r.index_lower_bound == 1
    assert r.same_fiber == (False,)
    third = InfinityConfig(c, (Piece("v", TAU / 3), Piece("xi", c.action)))
    r = classify(third)
    assert r.verdict == NOT_CRITICAL and r.diagnostic
    back = classify(InfinityConfig.from_cycles(circle(Linear(1)), [(0.0, 1)]))
    assert back.verdict == TRUE_CPI and back.same_fiber == (True,)


def test_plain_orbit_is_not_at_infinity():
    r = classify(InfinityConfig.plain(circle()))
    assert r.verdict == NOT_CRITICAL and r.index_lower_bound == 0


def test_p3_examples():
    c = circle()
    assert p3_of_config(InfinityConfig.from_cycles(c, [(0.1, 1), (0.5, -1)])) == 0
    assert p3_of_config(InfinityConfig.from_cycles(c, [(0.3, 2)])) == 2
    assert p3_of_config(InfinityConfig.from_cycles(c, [(0.1, 3), (0.4, -1), (0.8, -1)])) == 1


def test_can_interact_examples():
    x10 = circle(g=G(1, 0))
    x01 = circle(g=G(0, 1))
    assert not can_interact(InfinityConfig.from_cycles(x10, [(0.0, 1)]), x10)
    assert can_interact(InfinityConfig.from_cycles(x10, [(0.0, 1), (0.5, -1)]), x10)
    assert not can_interact(InfinityConfig.from_cycles(x10, [(0.0, 1), (0.5, -1)]), x01)


@pytest.mark.parametrize(
    "pieces",
    [(), (Piece("v", 1.0),), (Piece("xi", 1.0), Piece("xi", 1.0)), (Piece("xi", 1.0), Piece("v", 1.0), Piece("xi", 1.0)),
     (Piece("xi", -1.0), Piece("v", 1.0)), (Piece("w", 1.0), Piece("v", 1.0))],
)
def test_malformed_configs(pieces):
    with pytest.raises(InvalidConfigError):
        InfinityConfig(circle(), pieces)


def test_bad_cycles():
    with pytest.raises(InvalidConfigError):
        InfinityConfig.from_cycles(circle(), [(1.2, 1)])
    with pytest.raises(InvalidConfigError):
        InfinityConfig.from_cycles(circle(), [(0.2, 0)])


FAMILIES = [Linear(1), Linear(2), Linear(3), Giroux(ParametricH(2, 0.3, 1), 2)]
cycles = st.lists(st.tuples(st.floats(0, 0.999), st.integers(-3, 3).filter(bool)), min_size=1, max_size=4)


@settings(max_examples=80, deadline=None)
@given(st.sampled_from(FAMILIES), st.sampled_from([G(1, 0), G(1, 1), G(2, -3)]), cycles)
def test_realized_class_and_classification(f, g, cyc):
    c = enumerate_orbits(f, g)[0]
    cfg = InfinityConfig.from_cycles(c, cyc)
    k = realized_class(cfg)
    # v-cycles add a pure fiber winding to the class of the base orbit
    assert (k.m, k.l, k.p) == (g.m, g.l, p3_of_config(cfg))
    if k.p == 0:
        assert sum(kk for _, kk in cyc) == 0
    else:
        assert not can_interact(cfg, c)
    r = classify(cfg)
    assert r.verdict == TRUE_CPI and r.index_lower_bound >= 1
    for (q, s) in cfg.v_jumps():
        assert conjugacy_residual(f, q, s) < 1e-9
    assert j_infinity(cfg) == pytest.approx(c.action, rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(FAMILIES), st.lists(st.floats(0.01, 5.0), min_size=2, max_size=6))
def test_verdict_never_characteristic(f, times):
    c = enumerate_orbits(f, G(1, 0))[0]
    pieces = []
    for s in times:
        pieces += [Piece("xi", 1.0), Piece("v", s)]
    cfg = InfinityConfig(c, tuple(pieces))
    r = classify(cfg)
    assert r.verdict != CHARACTERISTIC
    assert j_infinity(cfg) == pytest.approx(len(times))


def test_boundary_split_linear1():
    c = circle()
    gens = generators_of([c])
    r = boundary_split_check(gens, tower_configs(c))
    assert r.d_per == ((0,),) and r.d_per_squared_zero and r.certified
    assert r.pairs_on_same_circle == 1 and r.pairs_on_distinct_circles == 0
    assert len(r.excluded) == len(tower_configs(c))


def test_boundary_split_linear3_class11():
    circles = enumerate_orbits(Linear(3), G(1, 1))
    gens = generators_of(circles)
    r = boundary_split_check(gens, [cfg for c in circles for cfg in tower_configs(c)])
    assert np.array(r.d_per).shape == (3, 3) and r.is_zero and r.certified
    reasons = {why for _, why in r.excluded}
    assert any("P3" in why for why in reasons) and any("index" in why for why in reasons)


def test_boundary_split_without_configs():
    r = boundary_split_check(generators_of(enumerate_orbits(Linear(2), G(0, 1))))
    assert r.is_zero and r.d_per_squared_zero and r.excluded == ()


def test_boundary_split_rejects_mixed_classes():
    gens = generators_of(enumerate_orbits(Linear(1), G(1, 0)) + enumerate_orbits(Linear(1), G(0, 1)))
    with pytest.raises(ValueError):
        boundary_split_check(gens)


def test_foreign_class_config_is_excluded():
    gens = generators_of(enumerate_orbits(Linear(1), G(1, 0)))
    other = InfinityConfig.from_cycles(circle(g=G(0, 1)), [(0.0, 1), (0.5, -1)])
    r = boundary_split_check(gens, [other])
    assert r.excluded[0][1].startswith("different class")
