"""Near-extremal rational functions.

* one-sided Blaschke products on the unit circle (equality in the
  Borwein-Erdelyi inequality),
* lemniscate powers T^[n/N],
* Mobius-transferred powers with a single finite pole (circles),
* the even endpoint construction on segments, which realises the Markov
  factor: U = (h + 1/h)/2 on the symmetrised segment, evened in s, and pulled
  back through s = sqrt(z - E).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as poly
from scipy.special import comb

from .errors import (ConfigInvalid, MixedSides, NotNormalizedAtPoint, PoleOnBoundary,
                     PoleOnCircle, UnsupportedArc, UnsupportedCurve)
from .exact import MobiusMap, _image_circle, blaschke_eval, joukowski_inverse
from .geometry import Arc, Curve
from .points import INF, as_point, is_inf
from .rational import (CauchyEvaluator, ProductEvaluator, RationalFn, blaschke_to_rational,
                       eval_deriv, from_function, make_rational)

CIRCLE_MARGIN = 1e-8
NORMALIZE_TOL = 1e-12


def extremal_blaschke(poles) -> RationalFn:
    """h(v) = prod B(a_j, v) for poles all inside or all outside the unit
    circle (a = inf contributes the factor v)."""
    pts = [as_point(a) for a in poles]
    if not pts:
        raise ConfigInvalid("need at least one pole")
    inside = []
    for a in pts:
        if is_inf(a):
            inside.append(False)
            continue
        if abs(abs(a) - 1.0) < CIRCLE_MARGIN:
            raise PoleOnCircle(f"pole {a} lies on the unit circle")
        inside.append(abs(a) < 1.0)
    if any(inside) and not all(inside):
        raise MixedSides("poles must lie all inside or all outside the unit circle")
    R = blaschke_to_rational(pts)
    side = "inside" if inside[0] else "outside"
    meta = {"family": f"blaschke_{side}", "poles": pts, "requested_n": len(pts),
            "degree": R.degree, "slack": 0}
    return R.with_evaluator(R.evaluator, meta)


def _as_poly_coeffs(T):
    if isinstance(T, RationalFn):
        if T.parts:
            raise ConfigInvalid("the lemniscate base must be a polynomial")
        return np.asarray(T.monomial_p0(), dtype=complex)
    return np.asarray(T, dtype=complex)


def lemniscate_power(T, n: int, z0=1.0) -> RationalFn:
    """S = T^[n/N] for a polynomial T of degree N with T(z0) = 1, T'(z0) > 0."""
    c = _as_poly_coeffs(T)
    nz = np.nonzero(c)[0]
    N = int(nz[-1]) if nz.size else 0
    if N < 1:
        raise ConfigInvalid("the lemniscate base must have degree >= 1")
    c = c[: N + 1]
    if n < N:
        raise ConfigInvalid(f"n={n} is below the base degree {N}")
    z0 = complex(z0)
    v = poly.polyval(z0, c)
    d = poly.polyval(z0, poly.polyder(c))
    if abs(v - 1.0) > NORMALIZE_TOL:
        raise NotNormalizedAtPoint(f"T(z0) = {v}, expected 1")
    if not (d.real > 0 and abs(d.imag) <= NORMALIZE_TOL * abs(d)):
        raise NotNormalizedAtPoint(f"T'(z0) = {d} is not positive")
    m = n // N
    meta = {"family": "lemniscate_power", "N": N, "power": m, "requested_n": n,
            "degree": N * m, "slack": n - N * m}
    return make_rational(poly.polypow(c, m), meta=meta).with_evaluator(
        ProductEvaluator([make_rational(c)], [m]))


def mobius_power(curve: Curve, a, z0, n: int, base=None) -> RationalFn:
    """S(z) = T(phi_a(z))^[n/N] on a circle, phi_a(z) = xi/(z - a) normalised
    at z0.  `base` is a polynomial T for the image circle; by default
    T(w) = (w - c')/(w0 - c') with c' the image center and w0 = phi_a(z0)."""
    if not curve.is_circle:
        raise UnsupportedCurve("mobius_power is available on circles only")
    a = as_point(a)
    z0 = complex(z0)
    if abs(curve.gamma(curve.project(z0)) - z0) > 1e-10 * curve.diam:
        raise ConfigInvalid(f"{z0} is not on the curve")
    if is_inf(a):
        c = curve.params["center"]
        T = np.array([-c, 1.0]) / (z0 - c) if base is None else _as_poly_coeffs(base)
        N = len(np.trim_zeros(T, "b")) - 1
        S = poly.polypow(T, n // N)
        meta = {"family": "mobius_power", "pole": INF, "requested_n": n,
                "degree": N * (n // N), "slack": n % N, "jacobian": 1.0}
        return make_rational(S, meta=meta).with_evaluator(
            ProductEvaluator([make_rational(T)], [n // N]))
    if curve.distance(a) < CIRCLE_MARGIN * curve.diam:
        raise PoleOnBoundary(f"pole {a} lies on the curve")
    m = MobiusMap.normalized_at(a, z0)
    image = _image_circle(curve, m)
    w0 = m(z0)
    if base is None:
        cp = image.params["center"]
        T = np.array([-cp, 1.0]) / (w0 - cp)
    else:
        T = _as_poly_coeffs(base)
    N = len(np.trim_zeros(T, "b")) - 1
    # T(xi * w) with w = 1/(z - a), then the power
    Q = T * m.xi ** np.arange(len(T))
    S = poly.polypow(Q, n // N)
    meta = {"family": "mobius_power", "pole": a, "requested_n": n, "degree": N * (n // N),
            "slack": n % N, "jacobian": 1.0 / abs(z0 - a) ** 2, "image_center": image.params["center"],
            "image_radius": image.params["radius"], "xi": m.xi}
    coeffs = np.array(S, dtype=complex)
    const = coeffs[0]
    coeffs[0] = 0.0
    q = np.array(Q, dtype=complex)
    q0 = q[0]
    q[0] = 0.0
    base_fn = make_rational([q0], [(a, q)])
    return make_rational([const], [(a, coeffs)], meta=meta).with_evaluator(
        ProductEvaluator([base_fn], [n // N]))


def _inner_branch(x):
    """Joukowskii preimage in the closed unit disk, vectorised."""
    x = np.asarray(x, dtype=complex)
    s = np.sqrt(x * x - 1.0)
    u = x + s
    u = np.where(np.abs(u) > 1.0, x - s, u)
    return u


def markov_extremal(arc: Arc, poles, endpoint="A", nodes: int = 1024) -> RationalFn:
    """Rational function with the given poles whose derivatives at the
    endpoint follow the Markov factor.

    The segment [E, O] is symmetrised to s in [-c, c], c^2 = O - E; with
    u the inner Joukowskii preimage of s/c and h(u) = prod B(alpha_j, u)^m_j,
    U = (h + 1/h)/2 has modulus <= 1 on the symmetric segment.  Its even part
    in s is a function of s^2 = z - E.
    """
    if arc.kind != "segment":
        raise UnsupportedArc("markov_extremal supports segments only")
    ep = str(endpoint).upper()
    if ep not in ("A", "B"):
        raise ConfigInvalid("endpoint must be A or B")
    E, O = (arc.A, arc.B) if ep == "A" else (arc.B, arc.A)
    L = O - E
    entries = [(as_point(a), int(n)) for a, n in (poles.items() if isinstance(poles, dict) else poles)]
    n0 = sum(n for a, n in entries if is_inf(a))
    finite = [(a, n) for a, n in entries if not is_inf(a)]
    for a, _ in finite:
        if arc.distance(a) < CIRCLE_MARGIN * arc.diam:
            raise PoleOnBoundary(f"pole {a} lies on the arc")
    # normalised poles q = (a - E)/L must be closed under conjugation
    qs = [((a - E) / L, n) for a, n in finite]
    for q, n in qs:
        if abs(q.imag) > 1e-14 * max(1.0, abs(q)):
            mate = [m for p, m in qs if abs(p - q.conjugate()) <= 1e-12 * max(1.0, abs(q))]
            if sum(mate) != n:
                raise UnsupportedArc("pole set must be symmetric about the segment's line")
    # disk poles of h: inner preimages of +-sqrt(q); infinity goes to 0 with order 2 n0
    alphas, mults = [], []
    if n0:
        alphas.append(0j)
        mults.append(2 * n0)
    for q, n in qs:
        r = np.sqrt(complex(q))
        for b in (r, -r):
            alphas.append(complex(joukowski_inverse(b)[0]))
            mults.append(n)
    flat = [a for a, m in zip(alphas, mults) for _ in range(m)]

    def U_of_x(x):
        u = _inner_branch(x)
        h = np.ones_like(u)
        for a, m in zip(alphas, mults):
            if a == 0:
                h = h * u ** (-m)
            else:
                h = h * blaschke_eval([a], u) ** m
        return 0.5 * (h + 1.0 / h)

    sqrtL = np.sqrt(complex(L))

    def R_fun(z):
        s = np.sqrt(np.asarray(z, dtype=complex) - E)
        x = s / sqrtL
        return 0.5 * (U_of_x(x) + U_of_x(-x))

    R = from_function(R_fun, finite, n0, interval=(E, O), nodes=nodes)
    n_req = n0 + sum(n for _, n in finite)
    meta = {"family": "symmetrized_markov", "endpoint": ep, "point": E,
            "requested_n": n_req, "degree": R.degree, "slack": n_req - R.degree,
            "blaschke_poles": flat}
    # on circles of radius ~ |L|/n^2 around boundary points R stays O(1)
    ev = CauchyEvaluator(R_fun, [a for a, _ in finite], radius=abs(L) / (4.0 * (n_req + 1) ** 2))
    return R.with_evaluator(ev, meta)


# -- Faa di Bruno ----------------------------------------------------------------
def bell_polynomial(n: int, k: int, x) -> float:
    """Incomplete Bell polynomial B_{n,k}(x_1, ..., x_{n-k+1}); x[i-1] = x_i."""
    x = list(x)
    B = [[0.0] * (n + 1) for _ in range(n + 1)]
    B[0][0] = 1.0
    for nn in range(1, n + 1):
        for kk in range(1, nn + 1):
            B[nn][kk] = sum(comb(nn - 1, i - 1, exact=True) * (x[i - 1] if i - 1 < len(x) else 0.0)
                            * B[nn - i][kk - 1] for i in range(1, nn - kk + 2))
    return B[n][k]


def faa_di_bruno(outer_derivs, inner_derivs, n: int):
    """(f o g)^(n) from outer_derivs[j] = f^(j)(g(x0)) and inner_derivs[j] = g^(j)(x0)."""
    x = list(inner_derivs[1:])
    return sum(outer_derivs[k] * bell_polynomial(n, k, x) for k in range(1, n + 1))


def even_composite_derivative(R: RationalFn, k: int, z=0.0):
    """(R(s^2))^(2k) at s = 0 through Faa di Bruno with g(s) = s^2."""
    z = complex(z)
    if z != 0:
        raise ConfigInvalid("the collapse identity is stated at 0")
    outer = [eval_deriv(R, 0.0, j) for j in range(2 * k + 1)]
    return faa_di_bruno(outer, [0.0, 0.0, 2.0], 2 * k)


def contour_derivative(f, n: int, center=0.0, radius=0.1, nodes=256):
    """f^(n)(center) by the trapezoid rule on a circle (Cauchy formula)."""
    th = 2.0 * math.pi * np.arange(nodes) / nodes
    e = np.exp(1j * th)
    vals = f(center + radius * e)
    return math.factorial(n) * np.mean(vals * e ** (-n)) / radius**n


@dataclass
class ExtremalFamily:
    """A named family whose members are realised per requested degree."""

    kind: str
    params: dict = field(default_factory=dict)

    def member(self, n: int) -> RationalFn:
        p = self.params
        if self.kind in ("blaschke", "blaschke_inside", "blaschke_outside"):
            pts = [as_point(a) for a in p["poles"]]
            reps = max(1, n // len(pts)) if p.get("repeat", True) else 1
            return extremal_blaschke(pts * reps)
        if self.kind in ("lemniscate", "lemniscate_power"):
            return lemniscate_power(p.get("T", [0.0, 1.0]), n, p.get("z0", 1.0))
        if self.kind in ("mobius", "mobius_power"):
            curve = p.get("curve") or Curve.circle()
            return mobius_power(curve, p["pole"], p.get("z0", 1.0), n, p.get("base"))
        if self.kind in ("markov", "symmetrized_markov"):
            arc = p.get("arc") or Arc.segment(-1.0, 1.0)
            fixed = p.get("fixed_poles", [])
            return markov_extremal(arc, [(INF, n)] + list(fixed), p.get("endpoint", "A"))
        raise ConfigInvalid(f"unknown family {self.kind!r}")
