import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from su2torsion import su2
from su2torsion.errors import CornerPoint, NonCommuting
from su2torsion.pillowcase import (PillowcasePoint, a_ideal_residual, canonicalize,
                                   evaluate_on_pillowcase, restrict)
from su2torsion.presentation import builtin, evaluate_word
from su2torsion.repvariety import RepresentationPoint, TrefoilPath
from su2torsion.torsion import PeripheralFunction, evaluate_peripheral

TREFOIL, PATH = builtin("trefoil"), TrefoilPath()
angles = st.floats(-50, 50, allow_nan=False)
ts = st.floats(0.01, np.pi - 0.01)
seeds = st.integers(0, 2 ** 32 - 1)


def sample(n=200):
    t = (np.arange(n) + 0.5) * np.pi / n
    return [RepresentationPoint(PATH.images(x), 0.0) for x in t]


# -- canonical form ------------------------------------------------------------------

@given(angles, angles)
def test_canonicalize_idempotent(a, b):
    once = canonicalize(a, b)
    assert canonicalize(*once) == once


@given(angles, angles)
def test_canonicalize_involution(a, b):
    assert canonicalize(a, b) == canonicalize(-a, -b)


@given(angles, angles)
def test_canonical_domain(a, b):
    l, m = canonicalize(a, b)
    assert 0 <= m <= math.pi and -math.pi < l <= math.pi
    if m in (0.0, math.pi):
        assert 0 <= l <= math.pi


@given(angles, angles, st.integers(-3, 3), st.integers(-3, 3))
def test_canonicalize_periodic(a, b, i, j):
    # compare as points of the quotient: cos(l + m), cos(l - m) are complete invariants
    l0, m0 = canonicalize(a, b)
    l1, m1 = canonicalize(a + 2 * math.pi * i, b + 2 * math.pi * j)
    assert abs(math.cos(l1 + m1) - math.cos(l0 + m0)) < 1e-9
    assert abs(math.cos(l1 - m1) - math.cos(l0 - m0)) < 1e-9
    assert abs(math.cos(l1) - math.cos(a)) < 1e-9 and abs(math.cos(m1) - math.cos(b)) < 1e-9


def test_canonical_examples():
    assert canonicalize(0.3, -0.5) == (-0.3, 0.5)
    assert canonicalize(-0.3, math.pi) == (0.3, math.pi)
    assert canonicalize(-math.pi, 0.0) == (math.pi, 0.0)
    assert canonicalize(1.0, 2 * math.pi + 0.25) == pytest.approx((1.0, 0.25))


# -- restriction ------------------------------------------------------------------------

def test_restrict_half_pi():
    pt = restrict(TREFOIL, PATH.images(np.pi / 2))
    assert pt.theta_m == pytest.approx(np.pi / 2, abs=1e-12)
    assert not pt.corner


def test_relation_l_m6_on_50_points():
    for rep in sample(50):
        pt = restrict(TREFOIL, rep)
        assert abs(math.cos(pt.theta_l + 6 * pt.theta_m) + 1) < 1e-12


@given(ts, seeds)
def test_restriction_conjugation_invariant(t, seed):
    a = su2.haar_sample(np.random.default_rng(seed))
    p0 = restrict(TREFOIL, PATH.images(t))
    p1 = restrict(TREFOIL, su2.conjugate_by(a, PATH.images(t)))
    assert abs(p0.theta_m - p1.theta_m) < 1e-9
    assert abs(math.remainder(p0.theta_l - p1.theta_l, 2 * math.pi)) < 1e-9


@given(ts, seeds)
def test_trace_coordinates(t, seed):
    images = su2.conjugate_by(su2.haar_sample(np.random.default_rng(seed)), PATH.images(t))
    pt = restrict(TREFOIL, images)
    lam = evaluate_word(TREFOIL.longitude, images)
    mu = evaluate_word(TREFOIL.meridian, images)
    assert abs(2 * math.cos(pt.theta_m) - su2.trace(mu)) < 1e-9
    assert abs(2 * math.cos(pt.theta_l) - su2.trace(lam)) < 1e-9


def test_non_commuting_rejected(rng):
    with pytest.raises(NonCommuting):
        restrict(TREFOIL, su2.haar_sample(rng, 2))


def test_corner_points():
    # an abelian point with rho(x) = -1, rho(y) = 1 sends both boundary words to +-1
    images = np.array([su2.MINUS_IDENTITY, su2.IDENTITY])
    pt = restrict(TREFOIL, images)
    assert pt.corner and pt.theta_m == pytest.approx(math.pi)
    with pytest.raises(CornerPoint):
        restrict(TREFOIL, images, strict=True)


def test_one_central_image_uses_the_other_axis():
    # at the abelian point (z^3, z^2) the longitude x^2 mu^-6 = z^6 z^-6 is trivial
    z = su2.exp_map(np.array([0.0, 0.4, 0.0]))
    pt = restrict(TREFOIL, np.array([su2.qpow(z, 3), su2.qpow(z, 2)]))
    assert not pt.corner
    assert (pt.theta_l, pt.theta_m) == pytest.approx((0.0, 0.4))


# -- functions on the pillowcase --------------------------------------------------------

def test_evaluate_examples():
    pt = PillowcasePoint.canonical(0.7, 1.9)
    assert evaluate_on_pillowcase(PeripheralFunction(((1, 0, 0),)), pt) == 2
    lm6 = PeripheralFunction(((1, 1, 6),))
    for rep in sample(20):
        assert evaluate_on_pillowcase(lm6, restrict(TREFOIL, rep)) == pytest.approx(-2, abs=1e-12)


terms = st.lists(st.tuples(st.integers(-3, 3).map(float), st.integers(-3, 3),
                           st.integers(-8, 8)), min_size=1, max_size=4)


@given(terms, ts, seeds)
def test_pillowcase_matches_trace_evaluation(raw, t, seed):
    f = PeripheralFunction(tuple(raw))
    images = su2.conjugate_by(su2.haar_sample(np.random.default_rng(seed)), PATH.images(t))
    a = evaluate_on_pillowcase(f, restrict(TREFOIL, images))
    b = evaluate_peripheral(f, TREFOIL, images)
    assert abs(a - b) < 1e-9 * max(1.0, sum(abs(c) for c, _, _ in raw))


def test_a_ideal_residuals():
    gens = [PeripheralFunction.parse("1:1:0,1:0:6"), PeripheralFunction.parse("1:1:1,1:0:5")]
    non_member = PeripheralFunction.parse("1:1:0")
    res = a_ideal_residual(TREFOIL, gens + [non_member], sample(200))
    assert res[0] <= 1e-8 and res[1] <= 1e-8
    assert res[2] >= 0.5
