"""Smooth Jordan curves and arcs.

Closed curves are stored as finite Fourier series ``gamma(t) = sum_k c_k e^{ikt}``
on ``t in [0, 2pi)`` (circles and ellipses are 2- and 3-term series, so their
derivatives are exact).  Arcs are Chebyshev series on ``t in [-1, 1]``.

Normal convention: ``n_minus = i * tangent`` (the left normal).  For a
counterclockwise curve this points into the bounded component.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numpy.polynomial import chebyshev as cheb
from scipy.spatial import ConvexHull, QhullError, cKDTree

from .errors import ConfigInvalid, DegenerateTangent, EndpointFrame, NonSimple
from .points import parse_point

DEFAULT_SAMPLES = 4096
TWO_PI = 2.0 * math.pi


class Side(enum.Enum):
    INTERIOR = "interior"
    EXTERIOR = "exterior"
    ON_BOUNDARY = "on_boundary"


@dataclass(frozen=True)
class BoundaryFrame:
    point: complex
    tangent: complex
    n_plus: complex
    n_minus: complex


def _diameter(z: np.ndarray) -> float:
    pts = np.c_[z.real, z.imag]
    try:
        pts = pts[ConvexHull(pts).vertices]
    except (QhullError, ValueError):
        pass
    w = pts[:, 0] + 1j * pts[:, 1]
    return float(np.max(np.abs(w[:, None] - w[None, :])))


def _orient(p, q, r):
    return np.sign(((q - p).conjugate() * (r - p)).imag)


def _check_simple(z: np.ndarray, closed: bool, diam: float) -> None:
    """Raise NonSimple if the sampled polyline touches or crosses itself."""
    n = len(z)
    ends = np.r_[z[1:], z[:1]] if closed else z[1:]
    starts = z if closed else z[:-1]
    seg = np.abs(ends - starts)
    if np.min(np.abs(np.diff(z))) <= 1e-9 * diam:
        raise NonSimple("consecutive samples coincide")
    tree = cKDTree(np.c_[z.real, z.imag])
    pairs = tree.query_pairs(r=2.0 * seg.max(), output_type="ndarray")
    if len(pairs) == 0:
        return
    i, j = pairs[:, 0], pairs[:, 1]
    sep = np.abs(i - j)
    if closed:
        sep = np.minimum(sep, n - sep)
    keep = sep > 2
    i, j = i[keep], j[keep]
    if len(i) == 0:
        return
    if np.min(np.abs(z[i] - z[j])) <= 1e-9 * diam:
        raise NonSimple("curve passes through the same point twice")
    m = len(starts)
    ok = (i < m) & (j < m)
    i, j = i[ok], j[ok]
    p1, p2, q1, q2 = starts[i], ends[i], starts[j], ends[j]
    cross = (_orient(p1, p2, q1) * _orient(p1, p2, q2) < 0) & (
        _orient(q1, q2, p1) * _orient(q1, q2, p2) < 0
    )
    if np.any(cross):
        raise NonSimple("curve crosses itself")


class Curve:
    """Counterclockwise C^2 Jordan curve given by a Fourier series.

    Use the constructors `circle`, `ellipse`, `fourier` or `from_samples`.
    """

    closed = True
    t_range = (0.0, TWO_PI)

    def __init__(self, modes, coeffs, kind="fourier", params=None, validate=True):
        modes = np.asarray(modes, dtype=int)
        coeffs = np.asarray(coeffs, dtype=complex)
        order = np.argsort(modes)
        self.modes = modes[order]
        self.coeffs = coeffs[order]
        self.kind = kind
        self.params = dict(params or {})
        if validate:
            self._validate()

    # -- constructors -------------------------------------------------------
    @classmethod
    def circle(cls, center=0.0, radius=1.0):
        if radius <= 0:
            raise ConfigInvalid("circle radius must be positive")
        return cls([0, 1], [center, radius], kind="circle",
                   params={"center": complex(center), "radius": float(radius)},
                   validate=False)

    @classmethod
    def ellipse(cls, center=0.0, semi_axes=(2.0, 1.0)):
        a, b = (float(s) for s in semi_axes)
        if a <= 0 or b <= 0:
            raise ConfigInvalid("ellipse semi-axes must be positive")
        return cls([-1, 0, 1], [(a - b) / 2, center, (a + b) / 2], kind="ellipse",
                   params={"center": complex(center), "semi_axes": (a, b)},
                   validate=False)

    @classmethod
    def fourier(cls, coeffs, modes=None):
        """Curve from coefficients c_k; `coeffs` ordered k = -K..K unless
        `modes` is given.  A clockwise series is reversed (k -> -k)."""
        coeffs = np.asarray(coeffs, dtype=complex)
        if modes is None:
            if len(coeffs) % 2 != 1:
                raise ConfigInvalid("fourier coefficients need odd length 2K+1")
            K = len(coeffs) // 2
            modes = np.arange(-K, K + 1)
        modes = np.asarray(modes, dtype=int)
        area = math.pi * float(np.sum(modes * np.abs(coeffs) ** 2))
        if area < 0:
            modes = -modes
        return cls(modes, coeffs, kind="fourier")

    @classmethod
    def from_samples(cls, z, tol=1e-15):
        """Trigonometric fit of equispaced samples z_j = gamma(2 pi j / M)."""
        z = np.asarray(z, dtype=complex)
        M = len(z)
        c = np.fft.fft(z) / M
        k = np.fft.fftfreq(M, 1.0 / M).astype(int)
        keep = np.abs(k) < M // 2
        c, k = c[keep], k[keep]
        big = np.abs(c) > tol * np.abs(c).max()
        K = int(np.max(np.abs(k[big])))
        sel = np.abs(k) <= K
        return cls.fourier(c[sel], modes=k[sel])

    # -- evaluation ---------------------------------------------------------
    def _deriv_coeffs(self, d):
        return self.coeffs * (1j * self.modes) ** d

    def gamma(self, t, d=0):
        """d-th derivative of the parametrization at t (vectorized)."""
        t = np.asarray(t, dtype=float)
        flat = t.ravel()
        c = self._deriv_coeffs(d)
        out = np.empty(flat.shape, dtype=complex)
        step = max(1, 2_000_000 // max(len(self.modes), 1))
        for s in range(0, len(flat), step):
            out[s:s + step] = np.exp(1j * np.outer(flat[s:s + step], self.modes)) @ c
        return out.reshape(t.shape) if t.ndim else complex(out[0])

    def grid(self, N, d=0):
        """Values of the d-th derivative at t_j = 2 pi j / N (exact folding)."""
        bins = np.zeros(N, dtype=complex)
        np.add.at(bins, self.modes % N, self._deriv_coeffs(d))
        return N * np.fft.ifft(bins)

    def speed(self, t):
        return np.abs(self.gamma(t, 1))

    def normals(self, t):
        """(n_plus, n_minus) at parameter(s) t."""
        dz = self.gamma(t, 1)
        tau = dz / np.abs(dz)
        return -1j * tau, 1j * tau

    def frame(self, t) -> BoundaryFrame:
        t = float(t)
        dz = self.gamma(t, 1)
        tau = dz / abs(dz)
        return BoundaryFrame(self.gamma(t), tau, -1j * tau, 1j * tau)

    @cached_property
    def sample_t(self):
        return TWO_PI * np.arange(DEFAULT_SAMPLES) / DEFAULT_SAMPLES

    @cached_property
    def samples(self):
        return self.grid(DEFAULT_SAMPLES)

    @cached_property
    def diam(self) -> float:
        return _diameter(self.samples)

    @cached_property
    def signed_area(self) -> float:
        return math.pi * float(np.sum(self.modes * np.abs(self.coeffs) ** 2))

    def arclength(self, N=DEFAULT_SAMPLES) -> float:
        return float(np.sum(np.abs(self.grid(N, 1))) * TWO_PI / N)

    @property
    def is_circle(self) -> bool:
        return self.kind == "circle"

    # -- queries ------------------------------------------------------------
    def _validate(self):
        if len(self.modes) == 0:
            raise ConfigInvalid("empty curve")
        dz = self.grid(DEFAULT_SAMPLES, 1)
        if np.min(np.abs(dz)) <= 1e-10 * max(self.diam, 1e-300):
            raise DegenerateTangent("|gamma'| vanishes on the sample grid")
        _check_simple(self.samples, True, self.diam)
        if self.signed_area <= 0:
            raise NonSimple("curve is not counterclockwise")

    def project(self, z) -> float:
        """Parameter of the boundary point nearest to z."""
        z = complex(z)
        t = float(self.sample_t[np.argmin(np.abs(self.samples - z))])
        for _ in range(30):
            g, g1, g2 = self.gamma(t), self.gamma(t, 1), self.gamma(t, 2)
            f = ((g - z).conjugate() * g1).real
            fp = abs(g1) ** 2 + ((g - z).conjugate() * g2).real
            if fp <= 0:
                break
            dt = f / fp
            t -= dt
            if abs(dt) < 1e-15:
                break
        return t % TWO_PI

    def distance(self, z) -> float:
        return abs(complex(z) - self.gamma(self.project(z)))

    def side_of(self, z, tol=None) -> Side:
        z = complex(z)
        tol = 1e-10 * self.diam if tol is None else tol
        near = np.min(np.abs(self.samples - z))
        spacing = self.arclength() / DEFAULT_SAMPLES
        if near < 4.0 * spacing:
            t = self.project(z)
            d = z - self.gamma(t)
            if abs(d) <= tol:
                return Side.ON_BOUNDARY
            _, n_minus = self.normals(t)
            return Side.INTERIOR if (d * np.conj(n_minus)).real > 0 else Side.EXTERIOR
        w = self.samples - z
        wind = np.sum(np.angle(np.roll(w, -1) / w)) / TWO_PI
        return Side.INTERIOR if abs(wind) > 0.5 else Side.EXTERIOR

    def to_spec(self) -> dict:
        if self.kind == "circle":
            c = self.params["center"]
            return {"kind": "circle", "center": [c.real, c.imag],
                    "radius": self.params["radius"]}
        if self.kind == "ellipse":
            c = self.params["center"]
            return {"kind": "ellipse", "center": [c.real, c.imag],
                    "semi_axes": list(self.params["semi_axes"])}
        K = int(np.max(np.abs(self.modes)))
        full = np.zeros(2 * K + 1, dtype=complex)
        full[self.modes + K] = self.coeffs
        return {"kind": "fourier", "coeffs": [[v.real, v.imag] for v in full]}

    def __repr__(self):
        return f"Curve(kind={self.kind!r}, modes={len(self.modes)})"


class Arc:
    """C^2 Jordan arc gamma(t), t in [-1, 1], as a Chebyshev series.

    A = gamma(-1), B = gamma(1).  The orientation is increasing t.
    """

    closed = False
    t_range = (-1.0, 1.0)

    def __init__(self, coeffs, kind="cheb_graph", params=None, validate=True):
        self.coeffs = np.asarray(coeffs, dtype=complex)
        self.kind = kind
        self.params = dict(params or {})
        self._derivs = [self.coeffs]
        self._openup = None
        if validate:
            self._validate()

    @classmethod
    def segment(cls, A, B):
        A, B = complex(A), complex(B)
        if A == B:
            raise ConfigInvalid("segment endpoints coincide")
        return cls([(A + B) / 2, (B - A) / 2], kind="segment",
                   params={"A": A, "B": B}, validate=False)

    @classmethod
    def cheb(cls, coeffs):
        return cls(coeffs, kind="cheb_graph")

    @classmethod
    def graph(cls, poly, x_range=(-1.0, 1.0)):
        """Arc of y = sum_j poly[j] x^j over x in x_range."""
        x0, x1 = (float(v) for v in x_range)
        p = np.polynomial.Polynomial(poly)
        x = np.polynomial.Polynomial([(x0 + x1) / 2, (x1 - x0) / 2])
        y = p(x)
        c = np.zeros(max(len(y.coef), 2), dtype=complex)
        c[: len(y.coef)] += 1j * np.polynomial.chebyshev.poly2cheb(y.coef)
        c[:2] += [(x0 + x1) / 2, (x1 - x0) / 2]
        return cls(c, kind="cheb_graph",
                   params={"graph": list(map(float, poly)), "x_range": (x0, x1)})

    @classmethod
    def from_function(cls, func, tol=1e-15, max_deg=1024):
        """Chebyshev interpolant of a smooth parametrization on [-1, 1]."""
        deg = 16
        while True:
            c = cheb.chebinterpolate(func, deg)
            tail = np.max(np.abs(c[-4:]))
            if tail <= tol * np.max(np.abs(c)) or deg >= max_deg:
                break
            deg *= 2
        big = np.nonzero(np.abs(c) > tol * np.max(np.abs(c)) / 10)[0]
        return cls(c[: big[-1] + 1], kind="cheb_graph")

    def gamma(self, t, d=0):
        while len(self._derivs) <= d:
            self._derivs.append(cheb.chebder(self._derivs[-1]))
        c = self._derivs[d]
        if len(c) == 0:
            c = np.zeros(1, dtype=complex)
        t = np.asarray(t, dtype=float)
        out = cheb.chebval(t, c)
        return out if t.ndim else complex(out)

    @property
    def A(self) -> complex:
        return self.gamma(-1.0)

    @property
    def B(self) -> complex:
        return self.gamma(1.0)

    def normals(self, t):
        dz = self.gamma(t, 1)
        tau = dz / np.abs(dz)
        return -1j * tau, 1j * tau

    def frame(self, t) -> BoundaryFrame:
        t = float(t)
        if not -1.0 < t < 1.0:
            raise EndpointFrame(f"normals are undefined at arc endpoint t={t}")
        dz = self.gamma(t, 1)
        tau = dz / abs(dz)
        return BoundaryFrame(self.gamma(t), tau, -1j * tau, 1j * tau)

    @cached_property
    def sample_t(self):
        return np.linspace(-1.0, 1.0, DEFAULT_SAMPLES)

    @cached_property
    def samples(self):
        return self.gamma(self.sample_t)

    @cached_property
    def diam(self) -> float:
        return _diameter(self.samples)

    def arclength(self, N=DEFAULT_SAMPLES) -> float:
        x, w = np.polynomial.legendre.leggauss(min(N, 400))
        return float(np.sum(w * np.abs(self.gamma(x, 1))))

    def _validate(self):
        if self.A == self.B:
            raise NonSimple("arc endpoints coincide")
        if np.min(np.abs(self.gamma(self.sample_t, 1))) <= 1e-10 * self.diam:
            raise DegenerateTangent("|gamma'| vanishes on the sample grid")
        _check_simple(self.samples, False, self.diam)

    def project(self, z) -> float:
        z = complex(z)
        t = float(self.sample_t[np.argmin(np.abs(self.samples - z))])
        for _ in range(30):
            g, g1, g2 = self.gamma(t), self.gamma(t, 1), self.gamma(t, 2)
            f = ((g - z).conjugate() * g1).real
            fp = abs(g1) ** 2 + ((g - z).conjugate() * g2).real
            if fp <= 0:
                break
            t_new = min(1.0, max(-1.0, t - f / fp))
            if abs(t_new - t) < 1e-15:
                t = t_new
                break
            t = t_new
        return t

    def distance(self, z) -> float:
        return abs(complex(z) - self.gamma(self.project(z)))

    def to_spec(self) -> dict:
        if self.kind == "segment":
            A, B = self.params["A"], self.params["B"]
            return {"kind": "segment", "A": [A.real, A.imag], "B": [B.real, B.imag]}
        return {"kind": "cheb_graph", "coeffs": [[v.real, v.imag] for v in self.coeffs]}

    def __repr__(self):
        return f"Arc(kind={self.kind!r}, A={self.A:.6g}, B={self.B:.6g})"


def make_curve(spec: dict) -> Curve:
    """Build a curve from its JSON description (see README for the schema)."""
    kind = spec.get("kind")
    if kind == "circle":
        return Curve.circle(parse_point(spec.get("center", 0)), float(spec.get("radius", 1.0)))
    if kind == "ellipse":
        return Curve.ellipse(parse_point(spec.get("center", 0)), spec.get("semi_axes", (2.0, 1.0)))
    if kind == "fourier":
        coeffs = [parse_point(c) for c in spec["coeffs"]]
        modes = spec.get("modes")
        return Curve.fourier(coeffs, modes)
    raise ConfigInvalid(f"unknown curve kind {kind!r}")


def make_arc(spec: dict) -> Arc:
    kind = spec.get("kind")
    if kind == "segment":
        return Arc.segment(parse_point(spec["A"]), parse_point(spec["B"]))
    if kind == "cheb_graph":
        if "coeffs" in spec:
            return Arc.cheb([parse_point(c) for c in spec["coeffs"]])
        if "graph" in spec:
            return Arc.graph(spec["graph"], spec.get("x_range", (-1.0, 1.0)))
        raise ConfigInvalid("cheb_graph needs 'coeffs' or 'graph'")
    raise ConfigInvalid(f"unknown arc kind {kind!r}")


def make_domain(spec: dict):
    """Curve or Arc, dispatched on ``spec['kind']``."""
    if spec.get("kind") in ("segment", "cheb_graph"):
        return make_arc(spec)
    return make_curve(spec)


def frame_at(obj, t) -> BoundaryFrame:
    return obj.frame(t)


def side_of(curve: Curve, z, tol=None) -> Side:
    return curve.side_of(z, tol)
