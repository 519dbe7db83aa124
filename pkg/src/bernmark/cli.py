"""Command-line interface: ``bernmark <subcommand> ...``.

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 inequality violation beyond tolerance.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import errors as E
from .geometry import Arc, make_domain
from .greens import DEFAULT_NQ
from .harness import (DEFAULT_TOL, ExperimentConfig, Target, dumps, factor_for, family_member,
                      load_json_arg, parse_targets, run_experiment, verify_inequality, versions,
                      write_report)
from .openup import omega
from .points import parse_point
from .rational import DEFAULT_SAMPLES, poles_from_json, rational_from_json

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_VIOLATION = 0, 2, 3, 4



def parse_at(text: str):
    """'A' / 'B' / 'global', a parameter '0.3', 't=0.3', a point '[1, 0]',
    'z=1+0.5j' or '1+0.5j', or a JSON target object."""
    s = text.strip()
    if s.upper() in ("A", "B") or s.lower() == "global":
        return parse_targets(s)
    if s.startswith("{"):
        return parse_targets(json.loads(s))
    if s.startswith("["):
        return [Target(z0=parse_point(json.loads(s)))]
    if s.startswith("t="):
        return [Target(t=float(s[2:]))]
    if s.startswith("z="):
        return [Target(z0=parse_point(s[2:]))]
    if "j" in s or "i" in s:
        return [Target(z0=parse_point(s))]
    try:
        return [Target(t=float(s))]
    except ValueError as exc:
        raise E.ConfigInvalid(f"cannot parse --at {text!r}") from exc


def _report(args, rows, echo):
    verify = [r for r in rows if r.get("type") == "verify"]
    return {"config_echo": echo, "rows": rows,
            "summary": {"rows": len(rows), "violations": sum(1 for r in verify if r["violation"])},
            "versions": versions()}


def cmd_factor(args):
    domain = make_domain(load_json_arg(args.domain))
    poles = poles_from_json(load_json_arg(args.poles))
    rows = []
    for tg in parse_at(args.at):
        rep = factor_for(domain, poles, tg, args.k, args.nq)
        rows.append({"type": "factor", "target": tg.label(), **rep.to_json()})
    echo = {"command": "factor", "domain": load_json_arg(args.domain),
            "poles": load_json_arg(args.poles), "at": args.at, "k": args.k, "nq": args.nq}
    return _report(args, rows, echo)


def cmd_omega(args):
    arc = make_domain(load_json_arg(args.arc))
    if not isinstance(arc, Arc):
        raise E.ConfigInvalid("omega needs an arc")
    v = omega(arc, args.endpoint, parse_point(args.pole), nq=args.nq)
    row = {"type": "omega", "target": v.endpoint, "pole": v.pole, "density": v.value,
           "method": v.method, "check": v.check}
    echo = {"command": "omega", "arc": load_json_arg(args.arc), "endpoint": args.endpoint,
            "pole": args.pole, "nq": args.nq}
    return _report(args, [row], echo)


def cmd_verify(args):
    domain = make_domain(load_json_arg(args.domain))
    R = rational_from_json(load_json_arg(args.rational))
    rows = [{"type": "verify", **verify_inequality(R, domain, tg, args.k, args.nq, args.samples,
                                                   args.tol).to_json()}
            for tg in parse_at(args.at)]
    echo = {"command": "verify", "domain": load_json_arg(args.domain),
            "rational": load_json_arg(args.rational), "at": args.at, "k": args.k,
            "nq": args.nq, "samples": args.samples}
    return _report(args, rows, echo)


def cmd_extremal(args):
    params = load_json_arg(args.params) if args.params else {}
    domain_spec = params.pop("domain", None)
    if domain_spec is None:
        domain_spec = {"kind": "segment", "A": [-1, 0], "B": [1, 0]} if args.family == "markov" \
            else {"kind": "circle", "center": [0, 0], "radius": 1.0}
    domain = make_domain(domain_spec)
    R = family_member(domain, args.family, params, args.n)
    meta = {k: v for k, v in R.meta.items() if k != "blaschke_poles"}
    row = {"type": "extremal", "n": args.n, "family": meta.get("family", args.family),
           "metadata": meta, "rational": R.to_json()}
    echo = {"command": "extremal", "family": args.family, "params": load_json_arg(args.params)
            if args.params else {}, "n": args.n}
    return _report(args, [row], echo)


def cmd_sweep(args):
    obj = load_json_arg(args.config)
    if args.seed is not None:
        obj = {**obj, "seed": args.seed}
    if args.nq_given:
        obj = {**obj, "nq": args.nq}
    if args.samples_given:
        obj = {**obj, "samples": args.samples}
    cfg = ExperimentConfig.from_json(obj)
    return run_experiment(cfg, out=None)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--nq", type=int, default=None, help=f"quadrature nodes (default {DEFAULT_NQ})")
    common.add_argument("--samples", type=int, default=None,
                        help=f"norm sampling grid (default {DEFAULT_SAMPLES})")
    common.add_argument("--out", help="JSON report path; the CSV goes alongside")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--k", type=int, default=1, help="derivative order")

    p = argparse.ArgumentParser(prog="bernmark", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("factor", parents=[common], help="Bernstein/Markov factor")
    s.add_argument("--domain", required=True)
    s.add_argument("--poles", required=True)
    s.add_argument("--at", required=True)
    s.set_defaults(func=cmd_factor)

    s = sub.add_parser("omega", parents=[common], help="endpoint quantity of an arc")
    s.add_argument("--arc", required=True)
    s.add_argument("--endpoint", required=True, choices=["A", "B"])
    s.add_argument("--pole", required=True)
    s.set_defaults(func=cmd_omega)

    s = sub.add_parser("verify", parents=[common], help="check the inequality for one function")
    s.add_argument("--domain", required=True)
    s.add_argument("--rational", required=True)
    s.add_argument("--at", required=True)
    s.add_argument("--tol", type=float, default=DEFAULT_TOL)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("extremal", parents=[common], help="build an extremal family member")
    s.add_argument("--family", required=True, choices=["blaschke", "lemniscate", "mobius", "markov"])
    s.add_argument("--params", default=None)
    s.add_argument("--n", type=int, required=True)
    s.set_defaults(func=cmd_extremal)

    s = sub.add_parser("sweep", parents=[common], help="run an experiment config")
    s.add_argument("--config", required=True)
    s.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    args.nq_given = args.nq is not None
    args.samples_given = args.samples is not None
    args.nq = args.nq or DEFAULT_NQ
    args.samples = args.samples or DEFAULT_SAMPLES
    try:
        report = args.func(args)
    except E.NUMERICAL as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (E.BernmarkError, ValueError, KeyError, TypeError, json.JSONDecodeError) as exc:
        print(f"configuration error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.out:
        write_report(report, args.out)
    print(dumps(report))
    violations = sum(1 for r in report["rows"] if r.get("type") == "verify" and r["violation"])
    return EXIT_VIOLATION if violations else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
