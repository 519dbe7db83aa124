import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bernmark.errors import PoleOnArc, PoleOnBoundary
from bernmark.factors import (bernstein_factor_arc, bernstein_factor_curve, markov_constant,
                              markov_factor, recompute_markov)
from bernmark.geometry import Arc, Curve
from bernmark.points import INF, double_factorial_odd

CIRCLE = Curve.circle()
SEGMENT = Arc.segment(-1, 1)
BLOB = Curve.fourier([0.1, 0, 1, 0.05j, 0.15], modes=[-2, -1, 1, 0, 2])


@pytest.mark.parametrize("n", [1, 4, 17])
def test_circle_polynomial_and_origin(n):
    for t in (0.0, 1.0, 4.0):
        assert bernstein_factor_curve(CIRCLE, {INF: n}, t=t).factor == pytest.approx(n)
    rep = bernstein_factor_curve(CIRCLE, {0: n}, z0=1.0)
    assert rep.factor == pytest.approx(n)
    assert rep.S_plus == 0


def test_circle_two_sided():
    rep = bernstein_factor_curve(CIRCLE, [(0.5, 1), (2, 1)], z0=1.0)
    assert rep.S_minus == pytest.approx(3) and rep.S_plus == pytest.approx(3)
    assert rep.factor == pytest.approx(3)
    assert {c.side for c in rep.contributions} == {"plus", "minus"}


def test_arc_examples():
    for x in (0.0, 0.3, -0.6, 0.9):
        rep = bernstein_factor_arc(SEGMENT, {INF: 6}, x)
        assert rep.factor == pytest.approx(6 / math.sqrt(1 - x * x), rel=1e-12)
    assert bernstein_factor_arc(SEGMENT, {INF: 7}, 0.0, k=2).factor == pytest.approx(49)


def test_markov_examples():
    for n in (3, 10):
        assert markov_factor(SEGMENT, {INF: n}).factor == pytest.approx(n * n, rel=1e-12)
        assert markov_factor(SEGMENT, {INF: n}, k=2).factor == pytest.approx(n**4 / 3, rel=1e-12)
    assert markov_factor(Arc.segment(0, 1), {INF: 3}, "A").factor == pytest.approx(18, rel=1e-12)


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5, 6])
def test_markov_constant(k):
    assert markov_constant(k) == pytest.approx(2**k / double_factorial_odd(k))
    assert double_factorial_odd(k) == math.factorial(2 * k) // (math.factorial(k) * 2**k)


def test_markov_report_recomputable():
    rep = markov_factor(Arc.graph([0, 0, 0.25]), [(INF, 4), (2j, 2), (3, 1)], "global", k=2)
    assert recompute_markov(rep) == pytest.approx(rep.factor, rel=1e-14)
    assert rep.metadata["M"] == pytest.approx(max(rep.omega_sums.values()))
    # the global factor is the larger endpoint factor
    a = markov_factor(Arc.graph([0, 0, 0.25]), [(INF, 4), (2j, 2), (3, 1)], "A", k=2).factor
    b = markov_factor(Arc.graph([0, 0, 0.25]), [(INF, 4), (2j, 2), (3, 1)], "B", k=2).factor
    assert rep.factor == pytest.approx(max(a, b), rel=1e-12)


def test_markov_k1_matches_mainmarkov_form():
    rep = markov_factor(SEGMENT, [(INF, 5), (2j, 1)], "A", k=1)
    M = rep.metadata["M"]
    assert rep.factor == pytest.approx(2 * M * M, rel=1e-14)


pole_st = st.tuples(st.floats(0.1, 0.8), st.floats(0, 2 * math.pi), st.booleans(), st.integers(1, 5))


def _pole(r, th, outside):
    rr = 1.0 / r if outside else r
    return rr * complex(math.cos(th), math.sin(th))


@given(st.lists(pole_st, min_size=1, max_size=5), pole_st, st.integers(1, 4), st.floats(0, 2 * math.pi))
@settings(max_examples=40, deadline=None)
def test_circle_monotone_and_scaling(poles, extra, c, t):
    ps = [(_pole(r, th, o), n) for r, th, o, n in poles]
    rep = bernstein_factor_curve(CIRCLE, ps, t=t)
    more = bernstein_factor_curve(CIRCLE, ps + [(_pole(*extra[:3]), extra[3])], t=t)
    assert more.S_plus >= rep.S_plus - 1e-12 and more.S_minus >= rep.S_minus - 1e-12
    scaled = bernstein_factor_curve(CIRCLE, [(a, c * n) for a, n in ps], t=t)
    assert scaled.factor == pytest.approx(c * rep.factor, rel=1e-12)
    assert rep.factor == pytest.approx(max(rep.S_plus, rep.S_minus))
    assert all(x.density > 0 for x in rep.contributions)


@given(st.lists(st.tuples(st.floats(0.05, 0.95), st.floats(0, 2 * math.pi), st.booleans(),
                          st.integers(1, 3)), min_size=1, max_size=6), st.floats(0, 2 * math.pi))
@settings(max_examples=40, deadline=None)
def test_circle_mobius_route(poles, t):
    ps = [(_pole(r, th, o), n) for r, th, o, n in poles]
    direct = bernstein_factor_curve(CIRCLE, ps, t=t)
    moved = bernstein_factor_curve(CIRCLE, ps, t=t, route="mobius")
    assert moved.factor == pytest.approx(direct.factor, rel=1e-10)


def test_one_sided_inside_curve():
    rep = bernstein_factor_curve(BLOB, [(0.1, 2), (-0.2 + 0.3j, 1)], t=1.0)
    assert rep.S_plus == 0 and rep.factor == rep.S_minus > 0


def test_numeric_curve_monotone_and_scaling():
    base = [(INF, 3), (0.2j, 2)]
    rep = bernstein_factor_curve(BLOB, base, t=0.7)
    more = bernstein_factor_curve(BLOB, base + [(2.5, 1), (-0.1, 1)], t=0.7)
    assert more.S_plus > rep.S_plus and more.S_minus > rep.S_minus
    doubled = bernstein_factor_curve(BLOB, [(a, 2 * n) for a, n in base], t=0.7)
    assert doubled.factor == pytest.approx(2 * rep.factor, rel=1e-12)


def test_arc_scaling_and_markov_scaling():
    arc = Arc.graph([0, 0, 0.25])
    ps = [(INF, 2), (1.5j, 1)]
    for c in (2, 3):
        big = [(a, c * n) for a, n in ps]
        assert bernstein_factor_arc(arc, big, 0.2).factor == pytest.approx(
            c * bernstein_factor_arc(arc, ps, 0.2).factor, rel=1e-12)
        for k in (1, 2):
            assert markov_factor(arc, big, k=k).factor == pytest.approx(
                c ** (2 * k) * markov_factor(arc, ps, k=k).factor, rel=1e-12)


def test_report_serialisation():
    rep = bernstein_factor_curve(CIRCLE, [(0.5, 1), (INF, 2)], z0=1.0)
    js = rep.to_json()
    assert js["kind"] == "curve" and js["factor"] == rep.factor
    assert {c["pole"] if c["pole"] == "inf" else tuple(c["pole"]) for c in js["contributions"]} == \
        {"inf", (0.5, 0.0)}
    assert len(rep.csv_rows()) == 2


def test_errors():
    with pytest.raises(PoleOnBoundary):
        bernstein_factor_curve(CIRCLE, [(1j, 1)], t=0.0)
    with pytest.raises(PoleOnArc):
        bernstein_factor_arc(SEGMENT, [(0.3, 1)], 0.0)
    with pytest.raises(ValueError):
        bernstein_factor_curve(CIRCLE, {INF: 1})
    with pytest.raises(ValueError):
        markov_factor(SEGMENT, {INF: 1}, "C")
    with pytest.raises(ValueError):
        bernstein_factor_curve(CIRCLE, {INF: 1}, z0=0.5)
