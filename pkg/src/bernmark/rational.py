"""Rational functions in partial-fraction form

    R(z) = P0(z) + sum_i P_i(1/(z - a_i)),   P_i(0) = 0,

with exact derivatives, sup-norms on curves and arcs, and JSON I/O.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np
from numpy.polynomial import chebyshev as cheb
from numpy.polynomial import polynomial as poly
from scipy.optimize import minimize_scalar
from scipy.special import comb, poch

from .errors import ConfigInvalid, ConstantLeak, DuplicatePole, EvalAtPole, PoleNearBoundary
from .geometry import DEFAULT_SAMPLES
from .points import INF, as_point, is_inf, parse_point, point_to_json

POLE_MARGIN = 1e-8
REFINE_TOP = 8


def _trim(c):
    c = np.asarray(c, dtype=complex)
    nz = np.nonzero(c)[0]
    return c[: nz[-1] + 1] if nz.size else np.zeros(0, dtype=complex)


@dataclass(frozen=True, eq=False)
class RationalFn:
    """P0 is stored either in monomials or, for well-conditioned high degrees
    on an interval [p, q], in Chebyshev polynomials of x = (2z - p - q)/(q - p).
    Each part is (a, c) with c[j] the coefficient of (z - a)^(-j), c[0] = 0."""

    p0: np.ndarray
    parts: tuple = ()
    basis: str = "monomial"
    interval: tuple | None = None
    meta: dict = field(default_factory=dict, compare=False)
    # optional well-conditioned closed form, used by eval_deriv when present
    evaluator: object = field(default=None, compare=False, repr=False)

    # -- structure ----------------------------------------------------------
    @property
    def n0(self) -> int:
        return max(len(_trim(self.p0)) - 1, 0)

    def pole_orders(self):
        """[(a, n_a)] with a = inf for the polynomial part."""
        out = [(a, len(_trim(c)) - 1) for a, c in self.parts if len(_trim(c)) > 1]
        if self.n0 > 0:
            out.append((INF, self.n0))
        return out

    @property
    def degree(self) -> int:
        return sum(n for _, n in self.pole_orders())

    def poles(self) -> "PoleSet":
        return PoleSet(self.pole_orders())

    def __call__(self, z):
        return eval_deriv(self, z, 0)

    def monomial_p0(self) -> np.ndarray:
        if self.basis == "monomial":
            return np.asarray(self.p0, dtype=complex)
        p, q = self.interval
        c = cheb.cheb2poly(self.p0)
        # substitute x = (2z - p - q)/(q - p)
        x = np.array([-(p + q) / (q - p), 2.0 / (q - p)], dtype=complex)
        out = np.zeros(1, dtype=complex)
        xp = np.ones(1, dtype=complex)
        for ck in c:
            out = poly.polyadd(out, ck * xp)
            xp = poly.polymul(xp, x)
        return out

    def scaled(self, s) -> "RationalFn":
        ev = self.evaluator
        ev = None if ev is None else (lambda z, k, ev=ev: s * ev(z, k))
        return RationalFn(np.asarray(self.p0) * s, tuple((a, np.asarray(c) * s) for a, c in self.parts),
                          self.basis, self.interval, dict(self.meta), ev)

    def with_evaluator(self, evaluator, meta=None) -> "RationalFn":
        return RationalFn(self.p0, self.parts, self.basis, self.interval,
                          dict(self.meta if meta is None else meta), evaluator)

    def partial_fraction_only(self) -> "RationalFn":
        return RationalFn(self.p0, self.parts, self.basis, self.interval, dict(self.meta))

    # -- JSON -----------------------------------------------------------------
    def to_json(self) -> dict:
        d = {"basis": self.basis,
             "p0": [point_to_json(c) for c in np.asarray(self.p0, dtype=complex)],
             "parts": [{"pole": point_to_json(a), "coeffs": [point_to_json(c) for c in cs]}
                       for a, cs in self.parts]}
        if self.interval is not None:
            d["interval"] = [point_to_json(self.interval[0]), point_to_json(self.interval[1])]
        return d


def _real_if_real(v: complex):
    return v.real if v.imag == 0 else v


def make_rational(p0=(), parts: Iterable = (), basis="monomial", interval=None, meta=None) -> RationalFn:
    """Validated RationalFn.  `parts` holds (a, coeffs) pairs, coeffs[j] being
    the coefficient of (z - a)^(-j) starting at j = 0."""
    p0 = np.atleast_1d(np.asarray(p0 if len(p0) else [0.0], dtype=complex))
    if basis not in ("monomial", "chebyshev"):
        raise ConfigInvalid(f"unknown basis {basis!r}")
    if basis == "chebyshev":
        if interval is None:
            raise ConfigInvalid("chebyshev basis needs an interval")
        interval = (_real_if_real(as_point(interval[0])), _real_if_real(as_point(interval[1])))
        if interval[0] == interval[1]:
            raise ConfigInvalid("degenerate interval")
    clean = []
    for a, c in parts:
        a = as_point(a)
        if is_inf(a):
            raise ConfigInvalid("the pole at infinity is carried by P0")
        c = np.atleast_1d(np.asarray(c, dtype=complex))
        if c[0] != 0:
            raise ConstantLeak(f"part at {a} has a nonzero constant term")
        for b, _ in clean:
            if b == a:
                raise DuplicatePole(f"pole {a} appears twice")
        clean.append((a, c))
    return RationalFn(p0, tuple(clean), basis, interval, dict(meta or {}))


def eval_deriv(R: RationalFn, z, k: int = 0):
    """k-th derivative of R at z (scalar or array)."""
    if k < 0:
        raise ValueError("k must be >= 0")
    zz = np.asarray(z, dtype=complex)
    if R.evaluator is not None:
        for a, _ in R.parts:
            if np.any(zz == a):
                raise EvalAtPole(f"evaluation at the pole {a}")
        out = np.asarray(R.evaluator(zz, k), dtype=complex)
        return out if out.ndim else complex(out)
    if R.basis == "monomial":
        c = poly.polyder(R.p0, k) if k else R.p0
        out = poly.polyval(zz, c) if len(c) else np.zeros_like(zz)
    else:
        p, q = R.interval
        c = cheb.chebder(R.p0, k, scl=2.0 / (q - p)) if k else R.p0
        out = cheb.chebval((2.0 * zz - p - q) / (q - p), c) if len(c) else np.zeros_like(zz)
    out = np.asarray(out, dtype=complex) + 0j
    for a, cs in R.parts:
        d = zz - a
        if np.any(d == 0):
            raise EvalAtPole(f"evaluation at the pole {a}")
        w = 1.0 / d
        j = np.arange(len(cs))
        ck = cs * ((-1.0) ** k * poch(j, k))  # d^k/dz^k (z-a)^-j = (-1)^k (j)_k (z-a)^(-j-k)
        out = out + poly.polyval(w, ck) * w**k
    return out if out.ndim else complex(out)


class SupNorm(float):
    """A float carrying the boundary parameter and point where it is attained."""

    def __new__(cls, value, t, z):
        obj = super().__new__(cls, value)
        obj.t = t
        obj.z = z
        return obj


def _check_poles(R, boundary):
    for a, _ in R.pole_orders():
        if not is_inf(a) and boundary.distance(a) < POLE_MARGIN * boundary.diam:
            raise PoleNearBoundary(f"pole {a} is within the margin of the boundary")


def sup_of(fun, boundary, samples: int = DEFAULT_SAMPLES) -> SupNorm:
    """max |fun(z)| over a curve or arc: dense sampling, then bounded scalar
    refinement within one sample spacing of the largest local maxima."""
    lo, hi = boundary.t_range
    closed = boundary.closed
    if closed:
        t = lo + (hi - lo) * np.arange(samples) / samples
    else:
        t = np.linspace(lo, hi, samples)
    v = np.abs(fun(boundary.gamma(t)))
    h = t[1] - t[0]
    if closed:
        peak = (v >= np.roll(v, 1)) & (v >= np.roll(v, -1))
    else:
        left = np.r_[-np.inf, v[:-1]]
        right = np.r_[v[1:], -np.inf]
        peak = (v >= left) & (v >= right)
    idx = np.nonzero(peak)[0]
    idx = idx[np.argsort(v[idx])[::-1][:REFINE_TOP]]
    best_v, best_t = float(v[idx[0]]), float(t[idx[0]])

    def neg(s):
        return -abs(complex(fun(boundary.gamma(s))))

    for i in idx:
        a, b = t[i] - h, t[i] + h
        if not closed:
            a, b = max(a, lo), min(b, hi)
        res = minimize_scalar(neg, bounds=(a, b), method="bounded", options={"xatol": 1e-12})
        if -res.fun > best_v:
            best_v, best_t = float(-res.fun), float(res.x)
    if closed:
        best_t %= hi - lo
    return SupNorm(best_v, best_t, boundary.gamma(best_t))


def sup_norm(R: RationalFn, boundary, samples: int = DEFAULT_SAMPLES) -> SupNorm:
    """||R|| on a curve or arc, with the parameter and point where it is attained."""
    _check_poles(R, boundary)
    return sup_of(lambda z: eval_deriv(R, z), boundary, samples)


def derivative_sup(R: RationalFn, boundary, k: int, samples: int = DEFAULT_SAMPLES) -> SupNorm:
    """||R^(k)|| on a curve or arc."""
    _check_poles(R, boundary)
    return sup_of(lambda z: eval_deriv(R, z, k), boundary, samples)


# -- well-conditioned evaluators -----------------------------------------------
def _series(R, z, k):
    """Taylor coefficients R^(j)(z)/j!, j = 0..k, stacked on axis 0."""
    return np.stack([eval_deriv(R, z, j) / math.factorial(j) for j in range(k + 1)])


def _series_mul(x, y, k):
    out = np.zeros_like(x)
    for j in range(k + 1):
        out[j] = sum(x[i] * y[j - i] for i in range(j + 1))
    return out


class ProductEvaluator:
    """Derivatives of const * prod f_i^p_i by truncated Taylor-series products."""

    def __init__(self, factors, powers=None, const=1.0):
        self.factors = list(factors)
        self.powers = list(powers) if powers is not None else [1] * len(self.factors)
        self.const = const

    def __call__(self, z, k):
        z = np.asarray(z, dtype=complex)
        acc = np.zeros((k + 1,) + z.shape, dtype=complex)
        acc[0] = self.const
        for f, p in zip(self.factors, self.powers):
            base = _series(f, z, k)
            e = int(p)
            # binary powering of the truncated series
            pw = np.zeros_like(acc)
            pw[0] = 1.0
            while e:
                if e & 1:
                    pw = _series_mul(pw, base, k)
                base = _series_mul(base, base, k)
                e >>= 1
            acc = _series_mul(acc, pw, k)
        return acc[k] * math.factorial(k)


class CauchyEvaluator:
    """Values from a closed-form callable; derivatives by the Cauchy integral
    on a small circle whose radius keeps the function O(1) on it."""

    def __init__(self, func, poles=(), radius=1e-3, nodes=64):
        self.func = func
        self.poles = [complex(a) for a in poles]
        self.radius = radius
        self.nodes = nodes

    def __call__(self, z, k):
        z = np.asarray(z, dtype=complex)
        if k == 0:
            return self.func(z)
        flat = z.ravel()
        r = np.full(flat.shape, self.radius)
        for a in self.poles:
            r = np.minimum(r, 0.5 * np.abs(flat - a))
        th = 2.0 * math.pi * np.arange(self.nodes) / self.nodes
        e = np.exp(1j * th)
        pts = flat[:, None] + r[:, None] * e[None, :]
        vals = self.func(pts)
        out = math.factorial(k) * np.mean(vals * e[None, :] ** (-k), axis=1) / r**k
        return out.reshape(z.shape)


# -- exact arithmetic ---------------------------------------------------------
def _taylor_shift(c, a):
    """Coefficients d with sum c_n z^n = sum d_m (z - a)^m."""
    c = np.asarray(c, dtype=complex)
    n = len(c)
    d = np.zeros(n, dtype=complex)
    for m in range(n):
        nn = np.arange(m, n)
        d[m] = np.sum(c[m:] * comb(nn, m) * a ** (nn - m))
    return d


def _pair_split(i, j, a, b):
    """1/((z-a)^i (z-b)^j) as (coeffs at a, coeffs at b)."""
    ca = np.zeros(i + 1, dtype=complex)
    cb = np.zeros(j + 1, dtype=complex)
    for k in range(1, i + 1):
        ca[k] = (-1) ** (i - k) * comb(i + j - k - 1, i - k, exact=True) / (a - b) ** (i + j - k)
    for k in range(1, j + 1):
        cb[k] = (-1) ** (j - k) * comb(i + j - k - 1, j - k, exact=True) / (b - a) ** (i + j - k)
    return ca, cb


def _add(acc, a, c):
    cur = acc.get(a, np.zeros(1, dtype=complex))
    n = max(len(cur), len(c))
    out = np.zeros(n, dtype=complex)
    out[: len(cur)] += cur
    out[: len(c)] += c
    acc[a] = out


def multiply(R1: RationalFn, R2: RationalFn) -> RationalFn:
    """Exact partial-fraction form of R1 * R2 (monomial P0 only)."""
    p1, p2 = R1.monomial_p0(), R2.monomial_p0()
    pol = poly.polymul(p1, p2)
    acc: dict = {}

    def poly_times_part(p, a, c):
        nonlocal pol
        d = _taylor_shift(p, a)
        # sum_m d_m (z-a)^m * sum_j c_j (z-a)^-j
        for j in range(1, len(c)):
            if c[j] == 0:
                continue
            for m in range(len(d)):
                e = m - j
                if e < 0:
                    part = np.zeros(-e + 1, dtype=complex)
                    part[-e] = d[m] * c[j]
                    _add(acc, a, part)
                else:
                    # (z - a)^e in monomials
                    q = poly.polypow([-a, 1.0], e) if e else np.ones(1, dtype=complex)
                    pol = poly.polyadd(pol, d[m] * c[j] * q)

    for a, c in R2.parts:
        poly_times_part(p1, a, c)
    for a, c in R1.parts:
        poly_times_part(p2, a, c)
    for a, c in R1.parts:
        for b, e in R2.parts:
            if a == b:
                _add(acc, a, np.convolve(c, e))
                continue
            for i in range(1, len(c)):
                for j in range(1, len(e)):
                    if c[i] == 0 or e[j] == 0:
                        continue
                    ca, cb = _pair_split(i, j, a, b)
                    _add(acc, a, c[i] * e[j] * ca)
                    _add(acc, b, c[i] * e[j] * cb)
    parts = [(a, _trim(c) if len(_trim(c)) else np.zeros(1, dtype=complex)) for a, c in acc.items()]
    parts = [(a, c) for a, c in parts if len(c) > 1]
    return make_rational(pol, parts)


def from_function(f, poles, poly_degree: int, interval=None, basis="chebyshev",
                  radius=None, nodes: int = 512, tol: float = 0.0) -> RationalFn:
    """Partial-fraction form of a rational function known only by values.

    `poles` lists (a, order) of the finite poles; principal parts come from
    trapezoid contour integrals on circles around each pole, and the
    polynomial part from Chebyshev interpolation on `interval`.
    """
    poles = [(as_point(a), int(n)) for a, n in poles]
    pts = [a for a, _ in poles]
    theta = 2.0 * math.pi * np.arange(nodes) / nodes
    e = np.exp(1j * theta)
    parts = []
    for a, n in poles:
        others = [abs(a - b) for b in pts if b != a]
        r = radius or (0.5 * min(others) if others else 0.5)
        fv = f(a + r * e)
        c = np.zeros(n + 1, dtype=complex)
        for j in range(1, n + 1):
            c[j] = r**j * np.mean(fv * e**j)
        parts.append((a, c))
    interval = interval or (-1.0, 1.0)
    p, q = (_real_if_real(as_point(v)) for v in interval)
    R_parts = make_rational([0.0], parts)

    def rest(x):
        z = (p + q) / 2 + (q - p) / 2 * x
        return f(z) - eval_deriv(R_parts, z)

    c0 = cheb.chebinterpolate(rest, max(poly_degree, 0)) if poly_degree > 0 else \
        np.array([rest(np.zeros(1))[0]], dtype=complex)
    if tol:
        c0 = np.where(np.abs(c0) > tol * max(np.max(np.abs(c0)), 1e-300), c0, 0)
    R = make_rational(c0, parts, "chebyshev", (p, q))
    if basis == "monomial":
        R = make_rational(R.monomial_p0(), parts)
    return R


# -- Blaschke products ---------------------------------------------------------
def blaschke_factor_rational(a) -> RationalFn:
    """B(a, v) = (1 - conj(a) v)/(v - a) = -conj(a) + (1 - |a|^2)/(v - a)."""
    a = complex(a)
    return make_rational([-np.conj(a)], [(a, [0.0, 1.0 - abs(a) ** 2])])


def blaschke_to_rational(poles) -> RationalFn:
    """prod B(a, v) (a = inf gives the factor v).  Values and derivatives are
    taken from the product, which stays accurate for clustered poles."""
    R = make_rational([1.0])
    counts: dict = {}
    for a in poles:
        a = as_point(a)
        f = make_rational([0.0, 1.0]) if is_inf(a) else blaschke_factor_rational(a)
        R = multiply(R, f)
        key = "inf" if is_inf(a) else a
        counts[key] = (f, counts.get(key, (f, 0))[1] + 1)
    ev = ProductEvaluator([f for f, _ in counts.values()], [m for _, m in counts.values()])
    return R.with_evaluator(ev)


# -- pole sets ----------------------------------------------------------------
class PoleSet:
    """Multiset of extended-plane points with orders; equal points merge."""

    def __init__(self, entries=(), margin: float | None = None):
        merged: dict = {}
        order = []
        for a, n in entries:
            a = as_point(a)
            n = int(n)
            if n < 1:
                raise ConfigInvalid(f"pole order must be >= 1, got {n}")
            key = "inf" if is_inf(a) else a
            if key not in merged:
                order.append(key)
                merged[key] = 0
            merged[key] += n
        self.entries = [(INF if k == "inf" else k, merged[k]) for k in order]
        self.margin = margin

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    @property
    def total_order(self) -> int:
        return sum(n for _, n in self.entries)

    def scaled(self, c: int) -> "PoleSet":
        return PoleSet([(a, n * c) for a, n in self.entries], self.margin)

    def check(self, boundary, margin=None):
        m = margin if margin is not None else (self.margin or POLE_MARGIN * boundary.diam)
        for a, _ in self.entries:
            if not is_inf(a) and boundary.distance(a) < m:
                raise PoleNearBoundary(f"pole {a} is within {m:g} of the boundary")

    def to_json(self):
        return [{"pole": point_to_json(a), "order": n} for a, n in self.entries]

    def __repr__(self):
        return f"PoleSet({self.entries})"


def poles_from_json(obj) -> PoleSet:
    """Accepts [{"pole": p, "order": n}, ...], [[p, n], ...] or {"p": n}."""
    if isinstance(obj, dict):
        return PoleSet([(parse_point(k), v) for k, v in obj.items()])
    out = []
    for item in obj:
        if isinstance(item, dict):
            out.append((parse_point(item["pole"]), item.get("order", 1)))
        else:
            out.append((parse_point(item[0]), item[1]))
    return PoleSet(out)


def rational_from_json(obj) -> RationalFn:
    basis = obj.get("basis", "monomial")
    p0 = [parse_point(c) for c in obj.get("p0", [0.0])]
    parts = []
    for part in obj.get("parts", []):
        parts.append((parse_point(part["pole"]), [parse_point(c) for c in part["coeffs"]]))
    interval = obj.get("interval")
    if interval is not None:
        interval = [parse_point(v) for v in interval]
    return make_rational(p0, parts, basis, interval)
