import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bernmark.errors import (MixedSides, NotNormalizedAtPoint, PoleOnCircle, UnsupportedArc,
                             UnsupportedCurve)
from bernmark.exact import disk_normal_density
from bernmark.extremal import (ExtremalFamily, contour_derivative, even_composite_derivative,
                               extremal_blaschke, lemniscate_power, markov_extremal, mobius_power)
from bernmark.factors import bernstein_factor_curve, markov_factor
from bernmark.geometry import Arc, Curve
from bernmark.points import INF, double_factorial_odd
from bernmark.rational import eval_deriv, make_rational, sup_norm

CIRCLE = Curve.circle()
SEGMENT = Arc.segment(-1, 1)


@pytest.mark.parametrize("poles, expected", [([0.5], 3), ([0.5, 0.5], 6), ([2, 3], 5)])
def test_blaschke_examples(poles, expected):
    h = extremal_blaschke(poles)
    assert abs(eval_deriv(h, 1.0, 1)) == pytest.approx(expected, rel=1e-13)
    assert bernstein_factor_curve(CIRCLE, [(a, 1) for a in poles], z0=1.0).factor == \
        pytest.approx(expected, rel=1e-13)


def test_blaschke_errors():
    with pytest.raises(MixedSides):
        extremal_blaschke([0.5, 2])
    with pytest.raises(PoleOnCircle):
        extremal_blaschke([1j])


@given(st.lists(st.tuples(st.floats(0.1, 0.9), st.floats(0, 2 * math.pi)), min_size=1, max_size=20),
       st.booleans())
@settings(max_examples=30, deadline=None)
def test_blaschke_equality_and_norm(polar, outside):
    poles = [(1 / r if outside else r) * complex(math.cos(t), math.sin(t)) for r, t in polar]
    h = extremal_blaschke(poles)
    dens = sum(disk_normal_density(1.0, a) for a in poles)
    assert abs(eval_deriv(h, 1.0, 1)) / dens == pytest.approx(1.0, abs=1e-10)
    assert sup_norm(h, CIRCLE, 1024) <= 1 + 1e-9


def test_lemniscate_examples():
    S = lemniscate_power([0, 0, 0, 1], 10)
    assert S.degree == 9 and eval_deriv(S, 1.0, 1) == pytest.approx(9)
    S = lemniscate_power([0, 1], 7)
    assert eval_deriv(S, 1.0, 2) == pytest.approx(42)
    S = lemniscate_power([0, 0, 1], 9)
    assert S.degree == 8 and S.meta["slack"] == 1 and S.meta["power"] == 4
    with pytest.raises(NotNormalizedAtPoint):
        lemniscate_power([0, 0, 2], 4)
    with pytest.raises(NotNormalizedAtPoint):
        lemniscate_power([0, 0, 1], 4, z0=-1)


def test_lemniscate_trend_on_circle():
    # a lemniscate inside the circle touching it at 1: ratio is constant in m,
    # bounded by 1, and equals 1 when the lemniscate is the circle itself
    for T, limit in (([0.25, 0.5, 0.25], 0.5), ([0, 0, 1], 1.0)):
        N = len(T) - 1
        ratios = []
        for m in range(1, 21):
            S = lemniscate_power(T, N * m)
            assert sup_norm(S, CIRCLE, 1024) <= 1 + 1e-9
            ratios.append(abs(eval_deriv(S, 1.0, 1)) / (N * m))
        assert np.all(np.diff(ratios) >= -1e-12)
        assert ratios[-1] <= 1 + 1e-12
        assert ratios[-1] == pytest.approx(limit, rel=1e-12)


def test_mobius_power():
    for n in (5, 12):
        S = mobius_power(CIRCLE, 2.0, 1.0, n)
        ratio = abs(eval_deriv(S, 1.0, 1)) / (n * disk_normal_density(1.0, 2.0))
        assert ratio >= 0.8
        assert ratio == pytest.approx(1.0, rel=1e-12)
        assert sup_norm(S, CIRCLE, 1024) <= 1 + 1e-9
        assert S.meta["jacobian"] == pytest.approx(1.0)
        assert dict(S.pole_orders())[2.0] == n
    S = mobius_power(CIRCLE, 3.0, 1.0, 4)
    assert S.meta["jacobian"] == pytest.approx(0.25)
    S = mobius_power(CIRCLE, 0.4j, 1j, 6)
    assert abs(eval_deriv(S, 1j, 1)) == pytest.approx(6 * disk_normal_density(1j, 0.4j), rel=1e-12)
    # pole at infinity: the plain power z^n
    S = mobius_power(CIRCLE, INF, 1.0, 7)
    assert np.allclose(S.monomial_p0(), lemniscate_power([0, 1], 7).monomial_p0())
    with pytest.raises(UnsupportedCurve):
        mobius_power(Curve.ellipse(0, (2, 1)), 3.0, 2.0, 3)


@pytest.mark.parametrize("endpoint", ["A", "B"])
def test_markov_extremal_chebyshev(endpoint):
    n = 50
    R = markov_extremal(SEGMENT, [(INF, n)], endpoint)
    E = SEGMENT.A if endpoint == "A" else SEGMENT.B
    assert R.degree <= n and R.meta["slack"] == n - R.degree
    assert sup_norm(R, SEGMENT) <= 1 + 1e-9
    k1 = abs(eval_deriv(R, E, 1)) / markov_factor(SEGMENT, {INF: n}, endpoint).factor
    k2 = abs(eval_deriv(R, E, 2)) / (n**4 / 3)
    assert k1 >= 0.95 and k2 >= 0.99
    # Chebyshev oracle T_n''(1) = n^2 (n^2 - 1)/3
    assert abs(eval_deriv(R, E, 2)) == pytest.approx(n * n * (n * n - 1) / 3, rel=1e-8)


def test_markov_extremal_with_finite_poles():
    poles = [(INF, 30), (2.0, 2), (0.5 + 1j, 1), (0.5 - 1j, 1)]
    R = markov_extremal(SEGMENT, poles, "A")
    assert sup_norm(R, SEGMENT) <= 1 + 1e-9
    ratio = abs(eval_deriv(R, -1.0, 1)) / markov_factor(SEGMENT, poles, "A").factor
    assert 0.95 <= ratio <= 1 + 1e-9
    with pytest.raises(UnsupportedArc):
        markov_extremal(SEGMENT, [(INF, 5), (2j, 1)], "A")
    with pytest.raises(UnsupportedArc):
        markov_extremal(Arc.graph([0, 0, 0.2]), [(INF, 5)], "A")


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5, 6])
def test_double_factorial_identity(k):
    assert math.factorial(2 * k) // (math.factorial(k) * 2**k) == double_factorial_odd(k)


def test_faa_di_bruno_collapse():
    rng = np.random.default_rng(11)
    for _ in range(5):
        a = complex(*rng.uniform(-2, 2, 2)) + 0.5j
        R = make_rational(rng.normal(size=4), [(a, np.r_[0, rng.normal(size=2)])])
        for k in (1, 2, 3):
            closed = double_factorial_odd(k) * 2**k * eval_deriv(R, 0.0, k)
            assert even_composite_derivative(R, k) == pytest.approx(closed, rel=1e-12)
            r = 0.3 * math.sqrt(abs(a))
            numeric = contour_derivative(lambda s: eval_deriv(R, s * s), 2 * k, 0.0, r, 256)
            assert numeric == pytest.approx(closed, rel=1e-6)


def test_family_members_are_normalised():
    fams = [(ExtremalFamily("blaschke", {"poles": [0.5, -0.2j]}), CIRCLE),
            (ExtremalFamily("lemniscate", {"T": [0, 0, 1]}), CIRCLE),
            (ExtremalFamily("mobius", {"pole": 2.5j, "z0": 1j}), CIRCLE),
            (ExtremalFamily("markov", {"endpoint": "B"}), SEGMENT)]
    for fam, dom in fams:
        for n in (4, 9, 20):
            R = fam.member(n)
            assert R.degree <= n
            assert sup_norm(R, dom, 2048) <= 1 + 1e-9
