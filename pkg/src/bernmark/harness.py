"""Verification experiments: inequality checks on concrete rational
functions, sharpness sweeps over extremal families, randomized corpora,
and JSON/CSV report writing."""
from __future__ import annotations

import csv
import datetime as _dt
import io
import json
import math
import platform
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigInvalid
from .extremal import ExtremalFamily
from .factors import bernstein_factor_arc, bernstein_factor_curve, markov_factor
from .geometry import Arc, Curve, make_domain
from .greens import DEFAULT_NQ
from .points import INF, as_point, is_inf, parse_point
from .rational import (DEFAULT_SAMPLES, RationalFn, derivative_sup, eval_deriv, make_rational,
                       poles_from_json, rational_from_json, sup_norm)

DEFAULT_TOL = 5e-2
MAX_WORKERS = 8


# -- targets ----------------------------------------------------------------------
@dataclass(frozen=True)
class Target:
    """A boundary parameter t, a boundary point z0, or an arc endpoint tag."""

    t: float | None = None
    z0: complex | None = None
    endpoint: str | None = None

    def label(self):
        if self.endpoint is not None:
            return self.endpoint
        if self.t is not None:
            return f"t={self.t:.17g}"
        return f"z={self.z0.real:.17g}{self.z0.imag:+.17g}j"


def parse_targets(spec) -> list:
    """{"t": x | [x...]}, {"z0": p | [p...]}, {"endpoint": "A"}, a list of
    those, or a bare endpoint tag."""
    if spec is None:
        raise ConfigInvalid("missing target ('at')")
    if isinstance(spec, list):
        return [t for s in spec for t in parse_targets(s)]
    if isinstance(spec, str):
        if spec.upper() in ("A", "B") or spec.lower() == "global":
            return [Target(endpoint=spec.upper() if spec.upper() in ("A", "B") else "global")]
        raise ConfigInvalid(f"cannot parse target {spec!r}")
    if isinstance(spec, (int, float)):
        return [Target(t=float(spec))]
    if "t" in spec:
        ts = spec["t"] if isinstance(spec["t"], list) else [spec["t"]]
        return [Target(t=float(x)) for x in ts]
    if "z0" in spec:
        zs = spec["z0"]
        if not (isinstance(zs, list) and zs and isinstance(zs[0], (list, str))):
            zs = [zs]
        return [Target(z0=parse_point(z)) for z in zs]
    if "endpoint" in spec:
        return parse_targets(str(spec["endpoint"]))
    raise ConfigInvalid(f"cannot parse target {spec!r}")


def _resolve_t(domain, target: Target) -> float:
    if target.t is not None:
        return target.t
    t = domain.project(target.z0)
    if abs(domain.gamma(t) - target.z0) > 1e-8 * domain.diam:
        raise ConfigInvalid(f"{target.z0} is not on the boundary")
    return t


# -- verification -------------------------------------------------------------------
@dataclass
class VerifyRow:
    n: int
    target: str
    k: int
    deriv_abs: float
    norm: float
    factor: float
    ratio: float
    family: str = ""
    violation: bool = False

    def to_json(self):
        return {"n": self.n, "target": self.target, "k": self.k, "deriv_abs": self.deriv_abs,
                "norm": self.norm, "factor": self.factor, "ratio": self.ratio,
                "family": self.family, "violation": self.violation}


def factor_for(domain, poles, target: Target, k: int = 1, nq: int = DEFAULT_NQ):
    """The FactorReport matching a target on a curve or arc."""
    if isinstance(domain, Curve):
        if target.endpoint is not None:
            raise ConfigInvalid("curves have no endpoints")
        return bernstein_factor_curve(domain, poles, t=_resolve_t(domain, target), k=k, nq=nq)
    if target.endpoint is not None:
        return markov_factor(domain, poles, target.endpoint, k, nq)
    return bernstein_factor_arc(domain, poles, _resolve_t(domain, target), k, nq)


def verify_inequality(R: RationalFn, domain, target, k: int = 1, nq: int = DEFAULT_NQ,
                      samples: int = DEFAULT_SAMPLES, tol: float = DEFAULT_TOL,
                      expect_equality: bool = False) -> VerifyRow:
    """ratio = |R^(k)| / (||R|| * factor) at a boundary point or endpoint.

    At an arc endpoint the derivative is taken at the endpoint; with
    ``target.endpoint == 'global'`` it is ||R^(k)|| over the whole arc.
    """
    if not isinstance(target, Target):
        target = parse_targets(target)[0]
    report = factor_for(domain, R.poles(), target, k, nq)
    norm = float(sup_norm(R, domain, samples))
    if target.endpoint == "global":
        d = float(derivative_sup(R, domain, k, samples))
    elif target.endpoint is not None:
        d = abs(eval_deriv(R, domain.A if target.endpoint == "A" else domain.B, k))
    else:
        d = abs(eval_deriv(R, domain.gamma(_resolve_t(domain, target)), k))
    ratio = d / (norm * report.factor) if report.factor > 0 else (0.0 if d == 0 else math.inf)
    bad = ratio > 1.0 + tol or (expect_equality and abs(ratio - 1.0) > tol)
    return VerifyRow(R.degree, target.label(), k, float(d), norm, float(report.factor),
                     float(ratio), str(R.meta.get("family", "")), bool(bad))


@dataclass
class VerifyReport:
    rows: list

    def summary(self):
        ratios = [r.ratio for r in self.rows]
        out = {"rows": len(self.rows), "max_ratio": max(ratios) if ratios else None,
               "min_ratio": min(ratios) if ratios else None,
               "violations": sum(r.violation for r in self.rows), "trend_slope": None}
        ns = np.array([r.n for r in self.rows], dtype=float)
        if len(set(ns)) > 1:
            out["trend_slope"] = float(np.polyfit(ns, ratios, 1)[0])
        return out


# -- configuration ---------------------------------------------------------------------
@dataclass
class ExperimentConfig:
    name: str
    domain: dict
    tasks: list
    nq: int = DEFAULT_NQ
    samples: int = DEFAULT_SAMPLES
    seed: int = 0
    out: str | None = None
    raw: dict = field(default_factory=dict)

    @classmethod
    def from_json(cls, obj) -> "ExperimentConfig":
        if not isinstance(obj, dict):
            raise ConfigInvalid("config must be a JSON object")
        if "domain" not in obj or "tasks" not in obj:
            raise ConfigInvalid("config needs 'domain' and 'tasks'")
        cfg = cls(name=str(obj.get("name", "experiment")), domain=obj["domain"], tasks=list(obj["tasks"]),
                  nq=int(obj.get("nq", DEFAULT_NQ)), samples=int(obj.get("samples", DEFAULT_SAMPLES)),
                  seed=int(obj.get("seed", 0)), out=obj.get("out"), raw=obj)
        cfg.validate()
        return cfg

    def validate(self):
        make_domain(self.domain)
        for task in self.tasks:
            kind = task.get("type")
            if kind not in TASKS:
                raise ConfigInvalid(f"unknown task type {kind!r}")
            ns = task.get("n")
            if isinstance(ns, list) and any(b <= a for a, b in zip(ns, ns[1:])):
                raise ConfigInvalid("n-sweep must be strictly increasing")

    def echo(self):
        d = dict(self.raw) if self.raw else {"name": self.name, "domain": self.domain,
                                             "tasks": self.tasks}
        d.update({"nq": self.nq, "samples": self.samples, "seed": self.seed})
        return d


def load_config(path_or_json) -> ExperimentConfig:
    return ExperimentConfig.from_json(load_json_arg(path_or_json))


def load_json_arg(value):
    """Inline JSON text, a path to a JSON file, or an already-parsed object."""
    if not isinstance(value, str):
        return value
    text = value.strip()
    if text[:1] in "[{\"" or text in ("inf",) or _is_number(text):
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigInvalid(f"invalid JSON: {exc}") from exc
    p = Path(value)
    if not p.exists():
        preset = Path(__file__).parent / "presets" / value
        if preset.exists():
            p = preset
        elif (preset.with_suffix(".json")).exists():
            p = preset.with_suffix(".json")
        else:
            raise ConfigInvalid(f"no such file: {value}")
    try:
        return json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigInvalid(f"invalid JSON in {p}: {exc}") from exc


def _is_number(s):
    try:
        float(s)
        return True
    except ValueError:
        return False


# -- random draws ------------------------------------------------------------------------
def draw_point(region: dict, rng) -> complex:
    """Uniform sample from an annulus, disk or rectangle descriptor."""
    kind = region.get("kind", "annulus")
    c = parse_point(region.get("center", 0.0))
    if kind in ("annulus", "disk"):
        r0 = float(region.get("r_in", 0.0)) if kind == "annulus" else 0.0
        r1 = float(region["r_out"] if kind == "annulus" else region["radius"])
        r = math.sqrt(rng.uniform(r0 * r0, r1 * r1))
        return c + r * complex(math.cos(th := rng.uniform(0, 2 * math.pi)), math.sin(th))
    if kind == "rectangle":
        lo, hi = parse_point(region["lower"]), parse_point(region["upper"])
        return complex(rng.uniform(lo.real, hi.real), rng.uniform(lo.imag, hi.imag))
    raise ConfigInvalid(f"unknown region kind {kind!r}")


def random_rational(domain, region: dict, rng, max_degree: int = 60, max_poles: int = 4,
                    margin: float = 0.1) -> RationalFn:
    """Random partial fractions with poles drawn from `region` at distance
    >= margin from the boundary; part coefficients are scaled by d^j so every
    term is O(1) on the boundary."""
    m = int(rng.integers(1, max_poles + 1))
    poles = []
    while len(poles) < m:
        a = draw_point(region, rng)
        if domain.distance(a) >= margin and all(abs(a - b) > margin for b in poles):
            poles.append(a)
    budget = int(rng.integers(m + 1, max_degree + 1))
    cuts = np.sort(rng.choice(np.arange(1, budget), size=m, replace=False)) if budget > m else np.arange(1, m + 1)
    orders = np.diff(np.r_[0, cuts, budget])
    n0, orders = int(orders[-1]), [int(o) for o in orders[:-1]]
    parts = []
    for a, n in zip(poles, orders):
        d = domain.distance(a)
        c = (rng.normal(size=n + 1) + 1j * rng.normal(size=n + 1)) * d ** np.arange(n + 1)
        c[0] = 0.0
        parts.append((a, c / math.sqrt(n)))
    p0 = (rng.normal(size=n0 + 1) + 1j * rng.normal(size=n0 + 1)) / math.sqrt(n0 + 1)
    return make_rational(p0, parts, meta={"family": "random"})


# -- tasks ------------------------------------------------------------------------------------
def _task_factor(cfg, domain, task, rng):
    poles = poles_from_json(task["poles"])
    rows = []
    for tg in parse_targets(task.get("at")):
        rep = factor_for(domain, poles, tg, int(task.get("k", 1)), cfg.nq)
        rows.append({"type": "factor", "target": tg.label(), **rep.to_json()})
    return rows


def _verify_rows(cfg, domain, R, task, expect_equality=False):
    tol = float(task.get("tolerance", DEFAULT_TOL))
    rows = []
    for tg in parse_targets(task.get("at")):
        row = verify_inequality(R, domain, tg, int(task.get("k", 1)), cfg.nq, cfg.samples, tol,
                                expect_equality)
        rows.append({"type": "verify", **row.to_json()})
    return rows


def _task_verify(cfg, domain, task, rng):
    return _verify_rows(cfg, domain, rational_from_json(task["rational"]), task)


FAMILY_PARAMS = {"blaschke": {"poles", "repeat"}, "lemniscate": {"T", "z0"},
                 "mobius": {"pole", "z0", "base"}, "markov": {"endpoint", "fixed_poles"}}


def family_member(domain, family: str, params: dict, n: int) -> RationalFn:
    params = dict(params or {})
    key = family.split("_")[0] if not family.startswith("symmetrized") else "markov"
    unknown = set(params) - FAMILY_PARAMS.get(key, set())
    if key not in FAMILY_PARAMS or unknown:
        raise ConfigInvalid(f"family {family!r}: unknown parameters {sorted(unknown)}"
                            if key in FAMILY_PARAMS else f"unknown family {family!r}")
    if family in ("markov", "symmetrized_markov"):
        params.setdefault("arc", domain if isinstance(domain, Arc) else None)
        params["fixed_poles"] = [(parse_point(a), int(m)) for a, m in params.get("fixed_poles", [])]
    elif family in ("mobius", "mobius_power"):
        params.setdefault("curve", domain if isinstance(domain, Curve) else None)
        params["pole"] = parse_point(params["pole"])
        if "z0" in params:
            params["z0"] = parse_point(params["z0"])
    elif family in ("lemniscate", "lemniscate_power"):
        if "T" in params:
            params["T"] = [parse_point(c) for c in params["T"]]
        if "z0" in params:
            params["z0"] = parse_point(params["z0"])
    elif family.startswith("blaschke"):
        params["poles"] = [parse_point(a) for a in params["poles"]]
    return ExtremalFamily(family, params).member(n)


def _task_family_sweep(cfg, domain, task, rng):
    ns = task.get("n", [])
    ns = ns if isinstance(ns, list) else [ns]
    expect = task.get("expect") == "equality"

    def one(n):
        R = family_member(domain, task["family"], task.get("params", {}), int(n))
        return _verify_rows(cfg, domain, R, task, expect)

    return [r for rows in _pmap(one, ns) for r in rows]


def _task_random_verify(cfg, domain, task, rng):
    region = task.get("region", {"kind": "annulus", "center": [0, 0], "r_in": 0.3, "r_out": 3.0})
    count = int(task.get("count", 10))
    sub = np.random.default_rng(rng.integers(2**63))
    Rs = [random_rational(domain, region, sub, int(task.get("max_degree", 60)),
                          int(task.get("max_poles", 4)), float(task.get("margin", 0.1)))
          for _ in range(count)]
    targets = task.get("at")
    if targets is None:
        lo, hi = domain.t_range
        ts = sub.uniform(lo, hi, size=(count, int(task.get("points", 3))))
        jobs = [(R, {"t": [float(x) for x in row]}) for R, row in zip(Rs, ts)]
    else:
        jobs = [(R, targets) for R in Rs]

    def one(item):
        i, (R, at) = item
        return [{**r, "sample": i} for r in _verify_rows(cfg, domain, R, {**task, "at": at})]

    return [r for rows in _pmap(one, list(enumerate(jobs))) for r in rows]


TASKS = {"factor": _task_factor, "verify": _task_verify, "family_sweep": _task_family_sweep,
         "random_verify": _task_random_verify}


def _pmap(fn, items):
    if len(items) > 1:
        with ThreadPoolExecutor(max_workers=min(MAX_WORKERS, len(items))) as ex:
            return list(ex.map(fn, items))
    return [fn(x) for x in items]


# -- reports ------------------------------------------------------------------------------------
def versions():
    import scipy

    from . import __version__
    return {"bernmark": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
            "python": platform.python_version()}


def run_experiment(config, out: str | None = None) -> dict:
    """Run every task of the config; write JSON (and CSV alongside) when an
    output path is given.  Returns the report dictionary."""
    cfg = config if isinstance(config, ExperimentConfig) else load_config(config)
    domain = make_domain(cfg.domain)
    rng = np.random.default_rng(cfg.seed)
    rows = []
    for i, task in enumerate(cfg.tasks):
        for r in TASKS[task["type"]](cfg, domain, task, rng):
            r["task"] = task.get("name", f"task{i}")
            rows.append(r)
    verify = [r for r in rows if r["type"] == "verify"]
    ratios = [r["ratio"] for r in verify]
    summary = {"rows": len(rows), "verify_rows": len(verify),
               "max_ratio": max(ratios) if ratios else None,
               "violations": sum(1 for r in verify if r["violation"])}
    report = {"config_echo": cfg.echo(), "rows": rows, "summary": summary, "versions": versions()}
    path = out or cfg.out
    if path:
        write_report(report, path)
    return report


def _fmt(x):
    if isinstance(x, bool) or x is None:
        return json.dumps(x)
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isfinite(x):
            return format(x, ".17g")
        return json.dumps("inf" if x > 0 else ("-inf" if x < 0 else "nan"))
    if isinstance(x, (complex, np.complexfloating)):
        x = complex(x)
        if is_inf(x):
            return json.dumps("inf")
        return "[" + _fmt(x.real) + ", " + _fmt(x.imag) + "]"
    if isinstance(x, str):
        return json.dumps(x)
    if isinstance(x, dict):
        return "{" + ", ".join(json.dumps(str(k)) + ": " + _fmt(v) for k, v in x.items()
                               if not str(k).startswith("_")) + "}"
    if isinstance(x, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_fmt(v) for v in x) + "]"
    return json.dumps(str(x))


def dumps(obj) -> str:
    """JSON with every float written to 17 significant digits."""
    return _fmt(obj)


CSV_COLUMNS = ["task", "type", "n", "target", "k", "family", "pole", "order", "side", "density",
               "S_plus", "S_minus", "deriv_abs", "norm", "factor", "ratio", "violation"]


def _csv_value(v):
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    if isinstance(v, (complex, list)):
        return dumps(v)
    return str(v)


def csv_text(report: dict, timestamp: str | None = None) -> str:
    buf = io.StringIO()
    stamp = timestamp or _dt.datetime.now(_dt.timezone.utc).isoformat()
    buf.write(f"# generated {stamp}\n")
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in report["rows"]:
        if r["type"] == "factor":
            for c in r["contributions"]:
                w.writerow({k: _csv_value(v) for k, v in {
                    "task": r.get("task", ""), "type": "factor", "target": r["target"],
                    "k": r["k"], "pole": c["pole"], "order": c["order"], "side": c["side"],
                    "density": c["density"], "S_plus": r["S_plus"], "S_minus": r["S_minus"],
                    "factor": r["factor"]}.items()})
        else:
            w.writerow({k: _csv_value(r.get(k)) for k in CSV_COLUMNS})
    return buf.getvalue()


def write_report(report: dict, path: str):
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(dumps(report) + "\n")
    p.with_suffix(".csv").write_text(csv_text(report))
    return p
