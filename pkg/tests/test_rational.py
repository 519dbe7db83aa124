import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bernmark.errors import ConstantLeak, DuplicatePole, EvalAtPole, PoleNearBoundary
from bernmark.exact import blaschke_eval
from bernmark.geometry import Arc, Curve
from bernmark.points import INF
from bernmark.rational import (PoleSet, blaschke_to_rational, derivative_sup, eval_deriv,
                               from_function, make_rational, multiply, poles_from_json,
                               rational_from_json, sup_norm)

RUNGE = make_rational([0.0], [(0.1j, [0, -0.05j]), (-0.1j, [0, 0.05j])])  # 1/(1 + 100 z^2)


def test_constructor_examples():
    R = make_rational([0, 1])
    assert R(0.7) == pytest.approx(0.7) and R.degree == 1
    R = make_rational([0], [(2, [0, 1])])
    assert R(0.0) == pytest.approx(-0.5) and R.degree == 1
    R = make_rational([0], [(1j, [0, 0, 1])])
    assert R(0.0) == pytest.approx(1 / (-1j) ** 2) and R.degree == 2
    assert dict((("inf" if a == INF else a), n) for a, n in R.pole_orders()) == {1j: 2}


def test_constructor_errors():
    with pytest.raises(ConstantLeak):
        make_rational([0], [(2, [1, 1])])
    with pytest.raises(DuplicatePole):
        make_rational([0], [(2, [0, 1]), (2, [0, 3])])


def test_derivative_examples():
    assert eval_deriv(make_rational([0], [(2, [0, 1])]), 0.0, 1) == pytest.approx(-0.25)
    assert eval_deriv(make_rational([0, 0, 0, 1]), 1.0, 2) == pytest.approx(6)
    assert abs(eval_deriv(RUNGE, 0.1, 1)) == pytest.approx(5.0, rel=1e-13)
    assert RUNGE(0.3) == pytest.approx(1 / (1 + 9), rel=1e-13)
    with pytest.raises(EvalAtPole):
        eval_deriv(RUNGE, 0.1j)


def test_sup_norm_examples():
    for n in (1, 5, 12):
        assert sup_norm(make_rational([0] * n + [1]), Curve.circle()) == pytest.approx(1, abs=1e-12)
    T5 = make_rational([0, 5, 0, -20, 0, 16])
    s = sup_norm(T5, Arc.segment(-1, 1))
    assert s == pytest.approx(1.0, abs=1e-12)
    s = sup_norm(RUNGE, Arc.segment(-1, 1))
    assert s == pytest.approx(1.0, abs=1e-12)
    assert abs(s.z) < 1e-6


def test_sup_norm_refinement_stable():
    rng = np.random.default_rng(5)
    for _ in range(5):
        a = 1.3 * np.exp(2j * np.pi * rng.uniform())
        R = make_rational(rng.normal(size=6), [(a, [0, *rng.normal(size=3)])])
        for dom in (Curve.ellipse(0, (1.2, 0.8)), Arc.graph([0, 0, 0.3])):
            s1 = sup_norm(R, dom, 4096)
            s2 = sup_norm(R, dom, 8192)
            assert abs(s1 - s2) < 1e-8 * s2
            assert s2 >= float(np.max(np.abs(R(dom.gamma(np.linspace(*dom.t_range, 20000)))))) - 1e-12


def test_pole_near_boundary():
    with pytest.raises(PoleNearBoundary):
        sup_norm(make_rational([0], [(1.0, [0, 1])]), Curve.circle())


poles_st = st.lists(st.tuples(st.floats(-3, 3), st.floats(0.3, 3), st.integers(1, 4)),
                    min_size=0, max_size=3)


@given(poles_st, st.lists(st.floats(-2, 2), min_size=1, max_size=6), st.integers(1, 4),
       st.integers(0, 2 ** 31))
@settings(max_examples=40, deadline=None)
def test_derivatives_match_finite_differences(poles, p0, k, seed):
    rng = np.random.default_rng(seed)
    seen, parts = set(), []
    for x, y, n in poles:
        a = complex(round(x, 3), round(y, 3))
        if a in seen:
            continue
        seen.add(a)
        parts.append((a, np.r_[0, rng.normal(size=n)]))
    R = make_rational(p0, parts)
    z = complex(rng.uniform(-1, 1), rng.uniform(-2, -1))  # below the real axis, poles above
    h = 1e-4
    fd = (eval_deriv(R, z + h, k - 1) - eval_deriv(R, z - h, k - 1)) / (2 * h)
    exact = eval_deriv(R, z, k)
    assert abs(fd - exact) <= 1e-6 * max(abs(exact), 1.0)


def test_chebyshev_basis_matches_monomial():
    c = np.array([0.3, -1.0, 0.25, 2.0, 0.5])
    Rc = make_rational(c, basis="chebyshev", interval=(0.5, 2.5))
    Rm = make_rational(Rc.monomial_p0())
    z = np.array([0.7, 1.3 + 0.2j, 2.4])
    for k in range(4):
        assert np.allclose(eval_deriv(Rc, z, k), eval_deriv(Rm, z, k), rtol=1e-12)


def test_multiply_and_from_function():
    R1 = make_rational([1, 2], [(0.5j, [0, 1, 0.5])])
    R2 = make_rational([0, 1], [(-2, [0, 3])])
    P = multiply(R1, R2)
    z = np.array([0.3, -1 + 1j, 2.0])
    assert np.allclose(P(z), R1(z) * R2(z), rtol=1e-13)
    assert P.degree == R1.degree + R2.degree
    F = from_function(lambda w: R1(w) * R2(w), [(0.5j, 2), (-2, 1)], 2)
    assert np.allclose(F(z), P(z), rtol=1e-10)


@given(st.lists(st.tuples(st.floats(0.05, 0.95), st.floats(0, 2 * math.pi)), min_size=1, max_size=12))
@settings(max_examples=15, deadline=None)
def test_blaschke_rational(polar):
    poles = [r * complex(math.cos(t), math.sin(t)) for r, t in polar]
    B = blaschke_to_rational(poles)
    v = np.exp(1j * np.linspace(0, 2 * np.pi, 7))
    assert np.allclose(B(v), blaschke_eval(poles, v), atol=1e-10)
    assert sup_norm(B, Curve.circle()) == pytest.approx(1.0, abs=1e-10)


def test_derivative_sup():
    T3 = make_rational([0, -3, 0, 4])
    assert derivative_sup(T3, Arc.segment(-1, 1), 1) == pytest.approx(9.0, rel=1e-12)


def test_poleset_merging_and_json():
    ps = PoleSet([(2, 1), (INF, 3), (2, 2)])
    assert ps.total_order == 6 and len(ps) == 2
    assert poles_from_json({"inf": 3, "[2, 0]": 3}).total_order == 6
    assert poles_from_json([[[2, 0], 1], ["inf", 2]]).total_order == 3
    assert poles_from_json([{"pole": [0, 2], "order": 4}]).total_order == 4
    assert ps.scaled(2).total_order == 12


def test_json_roundtrip():
    R = make_rational([1, 2j], [(0.5 + 1j, [0, 1, -0.25])])
    R2 = rational_from_json(R.to_json())
    z = np.array([0.1, 2 - 1j])
    assert np.allclose(R(z), R2(z))
    Rc = make_rational([1, 0.5], basis="chebyshev", interval=(-1j, 1j))
    assert np.allclose(rational_from_json(Rc.to_json())(z), Rc(z))
