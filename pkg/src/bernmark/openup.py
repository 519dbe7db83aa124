"""Joukowskii open-up of Jordan arcs.

An arc Gamma_0 is first moved by the affine map L(z) = (2z - (A+B))/(B - A)
so that its endpoints become -1 and 1.  The preimage Gamma of L(Gamma_0)
under F(u) = (u + 1/u)/2 is a Jordan curve through -1 and 1, symmetric
under u -> 1/u.  F maps both the inner domain G- and the outer domain G+
of Gamma conformally onto the complement of the arc, so arc densities are
curve densities divided by |F'(u)|.

Near an endpoint z - 1 = (u - 1)^2 / (2u), which gives the endpoint
quantity Omega_a directly from the curve density at u = +-1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (BranchTrackingFailed, EndpointRequested, ExtrapolationMismatch,
                     NonSimple, DegenerateTangent, NotNormalized, PoleOnArc)
from .exact import disk_normal_density, joukowski, joukowski_deriv
from .geometry import Arc, Curve, Side
from .greens import DEFAULT_NQ, GreenProblem, solve_green
from .points import INF, as_point, is_inf

OPENUP_SAMPLES = 1024
MAX_DOUBLINGS = 4
TAIL_TOL = 1e-14
RESIDUAL_TOL = 1e-8
OMEGA_TOL = 1e-4
POLE_MARGIN = 1e-8


@dataclass
class OpenUp:
    arc: Arc
    curve: Curve          # preimage Gamma (counterclockwise)
    exact: bool           # Gamma is exactly the unit circle
    residual: float       # max |F(Gamma) - L(Gamma_0)| on an offset grid
    reversed: bool        # sample order was flipped to get a positive orientation
    pairing: dict = field(default_factory=dict)

    # -- affine normalisation ------------------------------------------------
    def L(self, z):
        A, B = self.arc.A, self.arc.B
        if is_inf(z):
            return INF
        return (2.0 * np.asarray(z) - (A + B)) / (B - A)

    @property
    def L_scale(self) -> float:
        """|L'|, constant."""
        return 2.0 / abs(self.arc.B - self.arc.A)

    def _L_rot(self) -> complex:
        d = 2.0 / (self.arc.B - self.arc.A)
        return d / abs(d)

    # -- inverse branches ----------------------------------------------------
    def _roots(self, zeta):
        zeta = complex(zeta)
        s = np.sqrt(zeta * zeta - 1.0)
        return complex(zeta + s), complex(zeta - s)

    def F1_inv(self, z):
        """Preimage of z (original coordinates) inside Gamma."""
        z = as_point(z)
        if is_inf(z):
            return 0j
        r1, r2 = self._roots(self.L(z))
        if self.exact:
            return r1 if abs(r1) < abs(r2) else r2
        where = self.curve.side_of(r1, tol=1e-12 * self.curve.diam)
        if where is Side.ON_BOUNDARY:
            raise PoleOnArc(f"{z} lies on the arc")
        return r1 if where is Side.INTERIOR else r2

    def F2_inv(self, z):
        u = self.F1_inv(z)
        return INF if u == 0 else 1.0 / u

    # -- boundary pairing ----------------------------------------------------
    def boundary_preimages(self, t, side):
        """(u1, u2): the preimages of gamma(t) on Gamma from which a move into
        G- (for u1) or G+ (for u2) lands on the given side of the arc."""
        z0 = self.arc.gamma(t)
        n_plus, n_minus = self.arc.normals(t)
        n = (n_minus if side == "minus" else n_plus) * self._L_rot()
        r, _ = self._roots(self.L(z0))
        if self.exact:
            nin = -r / abs(r)
        else:
            _, nin = self.curve.normals(self.curve.project(r))
        du = n / joukowski_deriv(r)
        u1 = r if (np.conj(nin) * du).real > 0 else 1.0 / r
        return u1, 1.0 / u1

    def _curve_density(self, u, pole, interior, nq):
        if self.exact:
            return disk_normal_density(u, pole)
        side = "interior" if interior else "exterior"
        sol = solve_green(GreenProblem(self.curve, side, pole), nq)
        return sol.normal_derivative(self.curve.project(u))

    def density(self, t, a, side="minus", route="minus", nq=DEFAULT_NQ):
        u1, u2 = self.boundary_preimages(t, side)
        alpha = self.F1_inv(a)
        if route == "minus":
            d = self._curve_density(u1, alpha, True, nq) / abs(joukowski_deriv(u1))
        else:
            beta = INF if alpha == 0 else 1.0 / alpha
            d = self._curve_density(u2, beta, False, nq) / abs(joukowski_deriv(u2))
        return float(d) * self.L_scale

    def omega_exact(self, endpoint, a, nq=DEFAULT_NQ) -> float:
        uE = -1.0 + 0j if endpoint == "A" else 1.0 + 0j
        alpha = self.F1_inv(a)
        d = self._curve_density(uE, alpha, True, nq)
        return float(d) * math.sqrt(self.L_scale) / math.sqrt(2.0)


def _track_preimage(g0, M):
    """Samples Gamma(theta_j), theta_j = 2 pi j / M, with F(Gamma) = g0(cos theta)."""
    theta = 2.0 * math.pi * np.arange(M) / M
    zeta = g0(np.cos(theta))
    u = np.empty(M, dtype=complex)
    u[0] = 1.0
    for j in range(1, M):
        s = np.sqrt(zeta[j] ** 2 - 1.0)
        r = zeta[j] + s
        cands = (r, 1.0 / r)
        if j == 1:
            u[j] = cands[0]
            continue
        pred = 2.0 * u[j - 1] - u[j - 2]
        u[j] = min(cands, key=lambda c: abs(c - pred))
    # at theta = pi, zeta = -1 up to rounding and the square root would turn
    # that rounding into an O(sqrt(eps)) error; the exact preimage is -1
    if M % 2 == 0:
        u[M // 2] = -1.0
    close = 2.0 * u[-1] - u[-2]
    if abs(close - 1.0) > 1e-2 * max(abs(u[1] - 1.0), 1e-12) + 1e-6:
        raise BranchTrackingFailed("preimage curve does not close up")
    return theta, u


def open_up(arc: Arc, M: int = OPENUP_SAMPLES) -> OpenUp:
    """Open up the arc; results are cached on the arc."""
    if getattr(arc, "_openup", None) is not None:
        return arc._openup
    if arc.kind == "segment":
        ou = OpenUp(arc, Curve.circle(0.0, 1.0), True, 0.0, False)
    else:
        A, B = arc.A, arc.B

        def g0(x):
            return (2.0 * arc.gamma(x) - (A + B)) / (B - A)

        # double the sample count until the Fourier tail of Gamma is resolved
        for _ in range(MAX_DOUBLINGS + 1):
            theta, u = _track_preimage(g0, M)
            c = np.abs(np.fft.fft(u))
            k = np.abs(np.fft.fftfreq(M, 1.0 / M))
            if c[k > 0.4 * M].max() <= TAIL_TOL * c.max():
                break
            M *= 2
        area = 0.5 * np.sum((np.conj(u) * np.roll(u, -1)).imag)
        try:
            curve = Curve.from_samples(u)
        except (NonSimple, DegenerateTangent) as exc:
            raise BranchTrackingFailed(f"preimage curve is not a Jordan curve: {exc}") from exc
        tm = theta + math.pi / M
        gm = curve.gamma(tm if area > 0 else -tm)
        residual = float(np.max(np.abs(joukowski(gm) - g0(np.cos(tm)))))
        if residual > RESIDUAL_TOL:
            raise BranchTrackingFailed(f"open-up residual {residual:.3g} exceeds {RESIDUAL_TOL}")
        ou = OpenUp(arc, curve, False, residual, area < 0)
    # record the side pairing at the arc midpoint
    u1, _ = ou.boundary_preimages(0.0, "minus")
    ou.pairing = {"minus": "upper" if u1.imag >= 0 else "lower",
                  "plus": "lower" if u1.imag >= 0 else "upper"}
    arc._openup = ou
    return ou


def _check_pole(arc, a):
    a = as_point(a)
    if not is_inf(a) and arc.distance(a) < POLE_MARGIN * arc.diam:
        raise PoleOnArc(f"pole {a} lies on the arc")
    return a


def arc_normal_density(arc: Arc, t, a, side="minus", route="minus", nq=DEFAULT_NQ) -> float:
    """Normal derivative of g(., a) for the arc complement at gamma(t), taken
    in the direction n_side.  `route` picks the curve side used (G- or G+)."""
    t = float(t)
    if not -1.0 < t < 1.0:
        raise EndpointRequested(f"t={t} is an arc endpoint")
    a = _check_pole(arc, a)
    return open_up(arc).density(t, a, side, route, nq)


@dataclass(frozen=True)
class OmegaValue:
    endpoint: str
    pole: complex
    value: float
    method: str = "openup-exact"
    check: float | None = None


def _endpoint_name(endpoint):
    e = str(endpoint).upper()
    if e not in ("A", "B"):
        raise ValueError(f"endpoint must be 'A' or 'B', not {endpoint!r}")
    return e


def omega_extrapolated(arc: Arc, endpoint, a, side="minus", nq=DEFAULT_NQ, npts=8) -> float:
    """Limit of sqrt|z - E| * dg/dn as z -> E along the arc, by polynomial
    extrapolation in rho = sqrt|z - E|."""
    e = _endpoint_name(endpoint)
    a = _check_pole(arc, a)
    ou = open_up(arc)
    E = arc.A if e == "A" else arc.B
    tau = 0.02 * (1.0 - np.cos(np.linspace(0.25, 1.0, npts) * math.pi / 2)) + 1e-4
    ts = -1.0 + tau if e == "A" else 1.0 - tau
    rho = np.sqrt(np.abs(arc.gamma(ts) - E))
    vals = np.array([rho[i] * ou.density(ts[i], a, side, "minus", nq) for i in range(npts)])
    coef = np.polyfit(rho, vals, npts - 1)
    return float(coef[-1])


def omega(arc: Arc, endpoint, a, nq=DEFAULT_NQ, check=True) -> OmegaValue:
    """Omega_a at an arc endpoint via the open-up formula; with `check` the
    value is compared against the extrapolated limit."""
    e = _endpoint_name(endpoint)
    a = _check_pole(arc, a)
    val = open_up(arc).omega_exact(e, a, nq)
    chk = None
    if check:
        chk = omega_extrapolated(arc, e, a, "minus", nq)
        if abs(chk - val) > OMEGA_TOL * abs(val):
            raise ExtrapolationMismatch(
                f"omega: open-up value {val:.12g} vs extrapolated {chk:.12g}")
    return OmegaValue(e, a, val, "openup-exact", chk)


def symmetrize(arc: Arc) -> Arc:
    """The arc {z : z^2 in Gamma_0} through 0, parametrised so that
    z(s)^2 = gamma(2 s^2 - 1) and z(-s) = -z(s)."""
    if abs(arc.A) > 1e-12 * arc.diam:
        raise NotNormalized(f"arc starts at {arc.A}, expected 0")
    if arc.kind == "segment":
        r = np.sqrt(complex(arc.B))
        return Arc.segment(-r, r)
    # gamma(t) = (t + 1) q(t), q(t) = int_0^1 gamma'(-1 + l (t + 1)) dl
    nodes, weights = np.polynomial.legendre.leggauss(len(arc.coeffs) // 2 + 2)
    lam, wl = (nodes + 1) / 2, weights / 2

    def q(t):
        t = np.asarray(t, dtype=float)
        pts = -1.0 + np.multiply.outer(t + 1.0, lam)
        return arc.gamma(pts, 1) @ wl

    # continuous square root of 2 q along [-1, 1]
    tg = np.linspace(-1.0, 1.0, 4097)
    qg = 2.0 * q(tg)
    ph = np.unwrap(np.angle(qg))
    root_g = np.sqrt(np.abs(qg)) * np.exp(0.5j * ph)

    def zfun(s):
        s = np.asarray(s, dtype=float)
        t = 2.0 * s * s - 1.0
        r = np.sqrt(2.0 * q(t))
        idx = np.clip(np.searchsorted(tg, t), 0, len(tg) - 1)
        flip = (r * np.conj(root_g[idx])).real < 0
        r = np.where(flip, -r, r)
        return s * r

    return Arc.from_function(zfun)
