"""Sharp Bernstein and Markov factors assembled from Green densities."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .errors import ConfigInvalid, PoleOnBoundary
from .exact import circle_normal_density, mobius_transfer
from .geometry import Arc, Curve, Side
from .greens import DEFAULT_NQ, curve_density
from .openup import arc_normal_density, omega, open_up
from .points import double_factorial_odd, is_inf, point_to_json
from .rational import PoleSet

POLE_MARGIN = 1e-8
MAX_WORKERS = 8


@dataclass
class Contribution:
    pole: complex
    order: int
    side: str
    density: float

    @property
    def weighted(self) -> float:
        return self.order * self.density


@dataclass
class FactorReport:
    kind: str                    # curve | arc | markov
    target: object               # boundary parameter or endpoint tag
    point: complex
    k: int
    contributions: list
    S_plus: float = 0.0
    S_minus: float = 0.0
    factor: float = 0.0
    omega_sums: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "target": self.target,
            "point": point_to_json(self.point),
            "k": self.k,
            "S_plus": self.S_plus,
            "S_minus": self.S_minus,
            "factor": self.factor,
            "omega_sums": dict(self.omega_sums),
            "contributions": [{"pole": point_to_json(c.pole), "order": c.order,
                               "side": c.side, "density": c.density} for c in self.contributions],
            "metadata": dict(self.metadata),
        }

    def csv_rows(self) -> list:
        """One dict per pole contribution."""
        return [{"kind": self.kind, "target": self.target, "k": self.k,
                 "pole_re": c.pole.real, "pole_im": c.pole.imag if not is_inf(c.pole) else 0.0,
                 "order": c.order, "side": c.side, "density": c.density,
                 "S_plus": self.S_plus, "S_minus": self.S_minus, "factor": self.factor}
                for c in self.contributions]


def _as_poleset(poles) -> PoleSet:
    if isinstance(poles, PoleSet):
        return poles
    if isinstance(poles, dict):
        return PoleSet(poles.items())
    return PoleSet(poles)


def _pmap(fn, items, parallel):
    if parallel and len(items) > 1:
        with ThreadPoolExecutor(max_workers=min(MAX_WORKERS, len(items))) as ex:
            return list(ex.map(fn, items))
    return [fn(x) for x in items]


def bernstein_factor_curve(curve: Curve, poles, z0=None, t=None, k: int = 1,
                           nq: int = DEFAULT_NQ, route: str = "direct") -> FactorReport:
    """max(S+, S-) at a point of a Jordan curve (raised to k for k > 1).

    Give the boundary point either as `z0` or by its parameter `t`.
    `route='mobius'` evaluates finite-pole densities on circles through the
    pole transfer z -> xi/(z - a) instead of the direct closed form.
    """
    if (z0 is None) == (t is None):
        raise ConfigInvalid("give exactly one of z0 or t")
    if t is None:
        t = curve.project(z0)
        if abs(curve.gamma(t) - complex(z0)) > 1e-8 * curve.diam:
            raise ConfigInvalid(f"{z0} is not on the curve")
    t = float(t)
    ps = _as_poleset(poles)
    sides = []
    for a, n in ps:
        if is_inf(a):
            sides.append("plus")
            continue
        if curve.distance(a) < POLE_MARGIN * curve.diam:
            raise PoleOnBoundary(f"pole {a} lies on the curve")
        sides.append("minus" if curve.side_of(a) is Side.INTERIOR else "plus")

    def dens(a):
        if curve.is_circle:
            if route == "mobius" and not is_inf(a):
                return float(mobius_transfer(curve, a, t).transferred_density(nq))
            return float(circle_normal_density(curve, t, a))
        return float(curve_density(curve, t, a, nq))

    vals = _pmap(dens, [a for a, _ in ps], not curve.is_circle)
    contribs = [Contribution(a, n, s, d) for (a, n), s, d in zip(ps, sides, vals)]
    Sp = sum(c.weighted for c in contribs if c.side == "plus")
    Sm = sum(c.weighted for c in contribs if c.side == "minus")
    return FactorReport("curve", t, curve.gamma(t), k, contribs, Sp, Sm, max(Sp, Sm) ** k,
                        metadata={"nq": nq, "route": route,
                                  "exact": curve.is_circle})


def bernstein_factor_arc(arc: Arc, poles, t, k: int = 1, nq: int = DEFAULT_NQ) -> FactorReport:
    """max(S+, S-)^k at the interior arc point gamma(t)."""
    t = float(t)
    ps = _as_poleset(poles)
    ou = open_up(arc)
    jobs = [(a, side) for a, _ in ps for side in ("plus", "minus")]
    vals = _pmap(lambda job: arc_normal_density(arc, t, job[0], job[1], nq=nq), jobs,
                 not ou.exact)
    orders = dict((("inf" if is_inf(a) else a), n) for a, n in ps)
    contribs = [Contribution(a, orders["inf" if is_inf(a) else a], s, float(d))
                for (a, s), d in zip(jobs, vals)]
    Sp = sum(c.weighted for c in contribs if c.side == "plus")
    Sm = sum(c.weighted for c in contribs if c.side == "minus")
    return FactorReport("arc", t, arc.gamma(t), k, contribs, Sp, Sm, max(Sp, Sm) ** k,
                        metadata={"nq": nq, "exact": ou.exact, "openup_residual": ou.residual,
                                  "pairing": dict(ou.pairing)})


def markov_constant(k: int) -> float:
    """2^k / (2k - 1)!!"""
    return 2.0**k / double_factorial_odd(k)


def markov_factor(arc: Arc, poles, endpoint="global", k: int = 1, nq: int = DEFAULT_NQ,
                  check: bool = True) -> FactorReport:
    """(2^k/(2k-1)!!) * M^(2k) with M = sum_i n_i Omega_{a_i}(endpoint);
    `endpoint='global'` takes the larger of the two endpoint sums."""
    if k < 1:
        raise ConfigInvalid("k must be >= 1")
    ep = str(endpoint)
    ep = ep.upper() if ep.upper() in ("A", "B") else ep.lower()
    if ep not in ("A", "B", "global"):
        raise ConfigInvalid(f"endpoint must be A, B or global, not {endpoint!r}")
    ps = _as_poleset(poles)
    open_up(arc)
    wanted = ("A", "B") if ep == "global" else (ep,)
    jobs = [(a, e) for a, _ in ps for e in wanted]
    vals = _pmap(lambda job: omega(arc, job[1], job[0], nq=nq, check=check).value, jobs,
                 arc.kind != "segment")
    orders = dict((("inf" if is_inf(a) else a), n) for a, n in ps)
    contribs = [Contribution(a, orders["inf" if is_inf(a) else a], e, float(v))
                for (a, e), v in zip(jobs, vals)]
    sums = {e: sum(c.weighted for c in contribs if c.side == e) for e in wanted}
    M = max(sums.values())
    which = max(sums, key=sums.get)
    point = arc.A if which == "A" else arc.B
    return FactorReport("markov", ep, point, k, contribs, factor=markov_constant(k) * M ** (2 * k),
                        omega_sums=sums,
                        metadata={"nq": nq, "constant": markov_constant(k), "M": M,
                                  "endpoint_used": which})


def recompute_markov(report: FactorReport) -> float:
    """The Markov factor rebuilt from the stored contributions."""
    sums: dict = {}
    for c in report.contributions:
        sums[c.side] = sums.get(c.side, 0.0) + c.weighted
    return markov_constant(report.k) * max(sums.values()) ** (2 * report.k)
