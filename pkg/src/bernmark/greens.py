"""Green's functions of the inner and outer domains of a smooth Jordan curve.

The interior problem is solved as ``g(w, p) = -log|w - p| + Re f(w)`` with f
analytic, ``Re f = log|w - p|`` on the boundary.  ``Re f`` is a double-layer
potential; a Nystrom discretisation with the trapezoid rule gives spectral
accuracy on analytic curves.  The boundary values of the whole analytic
function f (real and imaginary part) are recovered with a periodic Hilbert
transform, so that

    dg/dn = |d/dw (-log(w - p) + f(w))|     on the boundary,

and f is evaluated off the boundary with the barycentric Cauchy formula,
which stays accurate arbitrarily close to the curve.

The exterior domain is handled by the inversion ``w = 1/(z - c)`` about an
interior point c: the outer domain becomes the inner domain of the image
curve and the pole at infinity goes to w = 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg

from .errors import (ExtrapolationUnstable, PoleOnBoundary, PoleOnWrongSide, SolveFailed,
                     WrongSideEvaluation)
from .geometry import Curve, Side
from .points import as_point, is_inf

TWO_PI = 2.0 * math.pi
DEFAULT_NQ = 512
FD_STEP = 1e-4
FD_TOL = 1e-4


def _as_side(side) -> Side:
    if isinstance(side, Side):
        return side
    s = str(side).lower()
    if s in ("interior", "inner", "minus", "-"):
        return Side.INTERIOR
    if s in ("exterior", "outer", "plus", "+"):
        return Side.EXTERIOR
    raise ValueError(f"unknown side {side!r}")


@dataclass(frozen=True)
class GreenProblem:
    curve: Curve
    side: Side
    pole: complex

    def __init__(self, curve, side, pole):
        object.__setattr__(self, "curve", curve)
        object.__setattr__(self, "side", _as_side(side))
        object.__setattr__(self, "pole", as_point(pole))


def inversion_center(curve: Curve) -> complex:
    """An interior point far from the boundary."""
    if curve.kind in ("circle", "ellipse"):
        return curve.params["center"]
    z = curve.samples
    n_plus, n_minus = curve.normals(curve.sample_t[::64])
    base = z[::64]
    steps = curve.diam * np.array([0.02, 0.05, 0.1, 0.2, 0.3, 0.4])
    cand = np.concatenate([[np.mean(z)], (base[:, None] + steps[None, :] * n_minus[:, None]).ravel()])
    w = z[None, :] - cand[:, None]
    wind = np.sum(np.angle(np.roll(w, -1, axis=1) / w), axis=1) / TWO_PI
    dist = np.min(np.abs(w), axis=1)
    score = np.where(np.abs(wind) > 0.5, dist, -np.inf)
    return complex(cand[np.argmax(score)])


class _WorkCurve:
    """The curve on which the interior problem is posed (maybe inverted)."""

    def __init__(self, curve: Curve, center=None):
        self.curve = curve
        self.center = center

    def values(self, s):
        """(Z, Z') at working parameter s."""
        if self.center is None:
            return self.curve.gamma(s), self.curve.gamma(s, 1)
        t = -np.asarray(s)
        d = self.curve.gamma(t) - self.center
        return 1.0 / d, self.curve.gamma(t, 1) / d**2

    def grid(self, N):
        if self.center is None:
            c = self.curve
            return c.grid(N), c.grid(N, 1), c.grid(N, 2)
        idx = (-np.arange(N)) % N
        g0, g1, g2 = (self.curve.grid(N, d)[idx] for d in range(3))
        d = g0 - self.center
        return 1.0 / d, g1 / d**2, -g2 / d**2 + 2.0 * g1**2 / d**3

    def to_work(self, z):
        if self.center is None:
            return z
        return 1.0 / (np.asarray(z) - self.center)


class GreenSolution:
    """Evaluable Green's function of one domain with one pole."""

    def __init__(self, problem: GreenProblem, nq: int):
        self.problem = problem
        self.nq = nq
        curve = problem.curve
        if problem.side is Side.INTERIOR:
            self.work = _WorkCurve(curve)
        else:
            self.work = _WorkCurve(curve, inversion_center(curve))
        self.p = complex(0.0) if is_inf(problem.pole) else complex(self.work.to_work(problem.pole))
        self._solve()

    def _solve(self):
        N = self.nq
        h = TWO_PI / N
        Z, Z1, Z2 = self.work.grid(N)
        s = h * np.arange(N)
        diff = Z[None, :] - Z[:, None]
        np.fill_diagonal(diff, 1.0)
        kern = Z1[None, :] / diff
        idx = np.arange(N)
        kern[idx, idx] = Z2 / (2.0 * Z1)
        A = 0.5 * np.eye(N) + (h / TWO_PI) * kern.imag
        b = np.log(np.abs(Z - self.p))
        try:
            mu = scipy.linalg.solve(A, b)
        except (np.linalg.LinAlgError, ValueError) as exc:
            raise SolveFailed(str(exc)) from exc
        if not np.all(np.isfinite(mu)) or np.max(np.abs(A @ mu - b)) > 1e-8 * (1 + np.max(np.abs(b))):
            raise SolveFailed("Nystrom system is ill-conditioned")

        # boundary values of the analytic completion f
        ds = s[None, :] - s[:, None]
        np.fill_diagonal(ds, 1.0)
        cot = 0.5 / np.tan(ds / 2.0)
        rem = kern - cot
        rem[idx, idx] = Z2 / (2.0 * Z1)
        k = np.fft.fftfreq(N, 1.0 / N)
        sgn = np.sign(k)
        sgn[N // 2] = 0.0
        pv = 1j * math.pi * np.fft.ifft(sgn * np.fft.fft(mu)) + h * (rem @ mu)
        F = 0.5 * mu + pv / (2j * math.pi)
        self.boundary_f = b + 1j * F.imag
        self.mu = mu
        self._nodes = (Z, Z1)
        fh = np.fft.fft(self.boundary_f) / N
        fh[N // 2] = 0.0
        self._fhat = fh
        self._k = k
        spec = np.abs(np.fft.fft(mu))
        tail = spec[np.abs(k) >= 3 * N // 8]
        self.accuracy = float(tail.max() / spec.max()) if tail.size else 0.0

    # -- evaluation ---------------------------------------------------------
    def _f_field(self, w):
        Z, Z1 = self._nodes
        w = np.atleast_1d(np.asarray(w, dtype=complex))
        out = np.empty(w.shape, dtype=complex)
        for i, wi in enumerate(w):
            d = Z - wi
            hit = np.abs(d) == 0
            if np.any(hit):
                out[i] = self.boundary_f[hit][0]
                continue
            q = Z1 / d
            out[i] = np.dot(q, self.boundary_f) / np.sum(q)
        return out

    def _value(self, z):
        w = self.work.to_work(np.atleast_1d(np.asarray(z, dtype=complex)))
        return -np.log(np.abs(w - self.p)) + self._f_field(w).real

    def green_value(self, z):
        """g(z, pole); z must lie strictly inside the solution's domain."""
        zs = np.atleast_1d(np.asarray(z, dtype=complex))
        for zi in zs:
            if self.problem.curve.side_of(zi) is not self.problem.side:
                raise WrongSideEvaluation(f"{zi} is not in the {self.problem.side.value} domain")
        v = self._value(zs)
        return v if np.ndim(z) else float(v[0])

    def _f_deriv(self, s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        return np.exp(1j * np.outer(s, self._k)) @ (1j * self._k * self._fhat)

    def layer_normal_derivative(self, t):
        """dg/dn into the domain from the boundary representation."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        s = t if self.work.center is None else -t
        Zs, Z1s = self.work.values(s)
        grad = -1.0 / (Zs - self.p) + self._f_deriv(s) / Z1s
        n_in = 1j * Z1s / np.abs(Z1s)
        dens = (grad * n_in).real
        if self.work.center is not None:
            dens = dens / np.abs(self.problem.curve.gamma(t) - self.work.center) ** 2
        return dens

    def fd_normal_derivative(self, t, step=FD_STEP):
        """One-sided differences along the normal at steps h, h/2, h/4,
        Richardson-extrapolated twice (error O(h^3))."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        curve = self.problem.curve
        n_plus, n_minus = curve.normals(t)
        n = n_minus if self.problem.side is Side.INTERIOR else n_plus
        x = curve.gamma(t)
        h = step * curve.diam
        d = [self._value(x + s * h * n) / (s * h) for s in (1.0, 0.5, 0.25)]
        r1, r2 = 2.0 * d[1] - d[0], 2.0 * d[2] - d[1]
        return (4.0 * r2 - r1) / 3.0

    def normal_derivative(self, t, method="fd"):
        """dg/dn at gamma(t), normal pointing into the solution's domain.

        ``method='fd'`` (default) extrapolates finite differences and checks
        them against the layer representation; ``method='layer'`` returns
        the representation value directly.
        """
        layer = self.layer_normal_derivative(t)
        if method == "layer":
            out = layer
        else:
            out = self.fd_normal_derivative(t)
            bad = np.abs(out - layer) > FD_TOL * np.abs(layer)
            if np.any(bad):
                raise ExtrapolationUnstable(
                    f"finite differences disagree with layer density by "
                    f"{np.max(np.abs(out - layer) / np.abs(layer)):.3g}")
        return out if np.ndim(t) else float(out[0])

    def harmonic_mass(self) -> float:
        """(1/2pi) * integral of dg/dn ds; equals 1."""
        N = self.nq
        t = TWO_PI * np.arange(N) / N
        dens = self.layer_normal_derivative(t)
        return float(np.sum(dens * self.problem.curve.speed(t)) / N)

    def capacity(self) -> float:
        """Logarithmic capacity of the curve (exterior problems, pole at inf)."""
        if self.problem.side is not Side.EXTERIOR or not is_inf(self.problem.pole):
            raise ValueError("capacity needs the exterior problem with pole at infinity")
        return float(math.exp(-self._f_field(0.0)[0].real))


@lru_cache(maxsize=512)
def _solve_cached(problem: GreenProblem, nq: int) -> GreenSolution:
    return GreenSolution(problem, nq)


def solve_green(problem: GreenProblem, nq: int = DEFAULT_NQ) -> GreenSolution:
    """Solve the Dirichlet problem defining g(., pole) on one side of the curve."""
    if nq < 64 or nq & (nq - 1):
        raise ValueError("nq must be a power of two >= 64")
    curve, pole = problem.curve, problem.pole
    if is_inf(pole):
        if problem.side is not Side.EXTERIOR:
            raise PoleOnWrongSide("the pole at infinity lies in the exterior domain")
    else:
        where = curve.side_of(pole, tol=1e-8 * curve.diam)
        if where is Side.ON_BOUNDARY:
            raise PoleOnBoundary(f"pole {pole} lies on the curve")
        if where is not problem.side:
            raise PoleOnWrongSide(f"pole {pole} is not in the {problem.side.value} domain")
    return _solve_cached(problem, nq)


def green_value(sol: GreenSolution, z):
    return sol.green_value(z)


def normal_derivative(sol: GreenSolution, t, method="fd"):
    return sol.normal_derivative(t, method)


def curve_density(curve: Curve, t, pole, nq: int = DEFAULT_NQ, method="fd"):
    """Normal derivative at gamma(t) of the Green function of whichever side
    of the curve holds the pole."""
    pole = as_point(pole)
    if is_inf(pole):
        side = Side.EXTERIOR
    else:
        side = curve.side_of(pole, tol=1e-8 * curve.diam)
        if side is Side.ON_BOUNDARY:
            raise PoleOnBoundary(f"pole {pole} lies on the curve")
    return solve_green(GreenProblem(curve, side, pole), nq).normal_derivative(t, method)
