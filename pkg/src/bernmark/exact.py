"""Closed-form Green's-function densities: unit disk, its exterior, the
segment [-1, 1] (through the Joukowskii map), Blaschke products and the
Mobius pole transfer z -> xi / (z - a).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EndpointRequested, EvalAtPole, PoleOnBoundary, PoleOnSegment, UnsupportedCurve
from .geometry import Arc, Curve
from .points import INF, as_point, is_inf

POLE_MARGIN = 1e-8


def joukowski(u):
    return (u + 1.0 / u) / 2.0


def joukowski_deriv(u):
    return (1.0 - 1.0 / u**2) / 2.0


def joukowski_inverse(z):
    """Both preimages (inner, outer) of z under F(u) = (u + 1/u)/2.

    The product of the two is 1; `inner` has modulus <= 1.
    """
    if is_inf(z):
        return 0.0j, INF
    z = complex(z)
    s = np.sqrt(z * z - 1.0)
    outer = z + s if abs(z + s) >= abs(z - s) else z - s
    return 1.0 / outer, outer


def disk_normal_density(w, a):
    """Normal derivative at |w| = 1 of the Green's function of the unit disk
    (|a| < 1, inward normal) or of its exterior (|a| > 1 or a = inf,
    outward normal)."""
    if is_inf(a):
        return np.ones(np.shape(w)) if np.ndim(w) else 1.0
    a = complex(a)
    if abs(abs(a) - 1.0) < POLE_MARGIN:
        raise PoleOnBoundary(f"pole {a} lies on the unit circle")
    w = np.asarray(w, dtype=complex)
    out = abs(1.0 - abs(a) ** 2) / np.abs(w - a) ** 2
    return out if out.ndim else float(out)


def circle_normal_density(curve: Curve, t, a):
    """Density on a circle of any center/radius, into the side holding a."""
    if not curve.is_circle:
        raise UnsupportedCurve("closed-form densities exist only for circles")
    c, r = curve.params["center"], curve.params["radius"]
    w = (np.asarray(curve.gamma(t)) - c) / r
    a_loc = INF if is_inf(a) else (complex(a) - c) / r
    return disk_normal_density(w, a_loc) / r


def blaschke_factor(a, v):
    """B(a, v) = (1 - conj(a) v) / (v - a)."""
    a = complex(a)
    v = np.asarray(v, dtype=complex)
    if np.any(np.abs(v - a) == 0):
        raise EvalAtPole(f"Blaschke factor evaluated at its pole {a}")
    out = (1.0 - np.conj(a) * v) / (v - a)
    return out if out.ndim else complex(out)


def _check_finite(poles):
    poles = [as_point(a) for a in poles]
    if any(is_inf(a) for a in poles):
        raise ValueError("Blaschke products take finite poles only")
    return poles


def blaschke_eval(poles, v):
    """h(v) = prod_j B(a_j, v)."""
    out = np.ones_like(np.asarray(v, dtype=complex))
    for a in _check_finite(poles):
        out = out * blaschke_factor(a, v)
    return out if np.ndim(out) else complex(out)


def blaschke_deriv(poles, v):
    """h'(v) for h = prod_j B(a_j, v), by the product rule.

    B'(a, v) = (|a|^2 - 1) / (v - a)^2.
    """
    poles = _check_finite(poles)
    v = np.asarray(v, dtype=complex)
    if not poles:
        return np.zeros_like(v) if v.ndim else 0j
    vals = [np.asarray(blaschke_factor(a, v)) for a in poles]
    ders = [(abs(a) ** 2 - 1.0) / (v - a) ** 2 for a in poles]
    m = len(poles)
    prefix = [np.ones_like(v)]
    for b in vals[:-1]:
        prefix.append(prefix[-1] * b)
    suffix = [np.ones_like(v)]
    for b in vals[:0:-1]:
        suffix.append(suffix[-1] * b)
    suffix = suffix[::-1]
    out = sum(prefix[j] * ders[j] * suffix[j] for j in range(m))
    return out if np.ndim(out) else complex(out)


def segment_normal_density(x, a, side="plus"):
    """Normal derivative of g(., a) for the complement of [-1, 1] at an
    interior point x.  ``side='minus'`` is the upper side (left normal +i)
    for the orientation -1 -> 1.  For a = inf this is 1/sqrt(1 - x^2).
    """
    x = float(x)
    if not -1.0 < x < 1.0:
        raise EndpointRequested(f"x={x} is not interior to [-1, 1]")
    a = as_point(a)
    if not is_inf(a):
        dist = abs(a.imag) if -1.0 <= a.real <= 1.0 else min(abs(a - 1), abs(a + 1))
        if dist < POLE_MARGIN:
            raise PoleOnSegment(f"pole {a} lies on [-1, 1]")
    theta = math.acos(x)
    # disk points near e^{i theta} map to the lower side of the segment
    u = np.exp(-1j * theta) if side == "minus" else np.exp(1j * theta)
    alpha, _ = joukowski_inverse(a)
    return disk_normal_density(u, alpha) / math.sin(theta)


@dataclass(frozen=True)
class MobiusMap:
    """phi(z) = xi / (z - a) with |xi| = 1."""

    a: complex
    xi: complex = 1.0 + 0j

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = self.xi / (z - self.a)
        return out if out.ndim else complex(out)

    def deriv(self, z):
        z = np.asarray(z, dtype=complex)
        out = -self.xi / (z - self.a) ** 2
        return out if out.ndim else complex(out)

    @classmethod
    def normalized_at(cls, a, z0):
        """Rotation chosen so that phi'(z0) > 0."""
        a, z0 = complex(a), complex(z0)
        d = z0 - a
        return cls(a, -(d * d) / abs(d) ** 2)


@dataclass(frozen=True)
class MobiusTransfer:
    map: MobiusMap
    image: object  # Curve or Arc
    image_param: float
    jacobian: float  # |phi'(z0)| = 1/|z0 - a|^2

    def density_at_infinity(self, nq=512):
        """Normal derivative of the image domain's Green function with
        pole at infinity, at the image of z0."""
        if isinstance(self.image, Curve):
            if self.image.is_circle:
                return 1.0 / self.image.params["radius"]
            from .greens import GreenProblem, solve_green
            sol = solve_green(GreenProblem(self.image, "exterior", INF), nq)
            return sol.normal_derivative(self.image_param)
        raise UnsupportedCurve("use openup.omega for arc images")

    def transferred_density(self, nq=512):
        return self.density_at_infinity(nq) * self.jacobian


def _image_circle(curve: Curve, m: MobiusMap) -> Curve:
    c, r = curve.params["center"], curve.params["radius"]
    d = abs(c - m.a) ** 2 - r * r
    center = m.xi * np.conj(c - m.a) / d
    return Curve.circle(complex(center), r / abs(d))


def mobius_transfer(domain, a, t0) -> MobiusTransfer:
    """Move the finite pole a to infinity with phi_a normalised at gamma(t0).

    For circles the image is again an exact circle; other curves and arcs
    are refitted from samples.
    """
    a = as_point(a)
    if is_inf(a):
        raise ValueError("mobius_transfer needs a finite pole")
    if domain.distance(a) < POLE_MARGIN * domain.diam:
        raise PoleOnBoundary(f"pole {a} lies on the boundary")
    z0 = domain.gamma(t0)
    m = MobiusMap.normalized_at(a, z0)
    jac = 1.0 / abs(z0 - a) ** 2
    w0 = m(z0)
    if isinstance(domain, Curve):
        if domain.is_circle:
            image = _image_circle(domain, m)
        else:
            M = 2048
            image = Curve.from_samples(m(domain.grid(M)))
        t_img = image.project(w0)
    else:
        image = Arc.from_function(lambda s: m(domain.gamma(s)))
        t_img = float(t0)
    return MobiusTransfer(m, image, t_img, jac)
