"""Command-line entry point: ``lossylab <command> ...``.

Exit codes: 0 when every verdict passes, 1 when any verdict fails, 2 on
usage, parse or infeasibility errors.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .params import ParamError, lossiness_bound_wcdist, regime_check, theta_report
from .scenario import ScenarioError, dumps, format_report, normalize, run_scenario

PIPELINE_COMMANDS = ("disguise", "szk", "owf", "efi", "lossiness")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(2)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="lossylab", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"lossylab {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def scenario_cmd(name, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("scenario", type=Path)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", type=Path, default=None)
        mode = p.add_mutually_exclusive_group()
        mode.add_argument("--exhaustive", dest="exhaustive", action="store_true", default=None)
        mode.add_argument("--sampled", dest="exhaustive", action="store_false")
        p.add_argument("--jobs", type=int, default=1)
        p.add_argument("--normalized", action="store_true", help="print the report without runtime fields")
        return p

    scenario_cmd("run", "run every pipeline listed in a scenario")
    for name in PIPELINE_COMMANDS:
        scenario_cmd(name, f"run the {name} pipeline (and what it depends on)")
    p = sub.add_parser("params", help="evaluate the threshold calculus for a JSON parameter block")
    p.add_argument("block", type=Path)
    p.add_argument("--out", type=Path, default=None)
    p = sub.add_parser("report", help="pretty-print a run report")
    p.add_argument("report", type=Path)
    return ap


def _params(args) -> int:
    try:
        doc = json.loads(args.block.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {args.block}: {exc}", file=sys.stderr)
        return 2
    try:
        m, n, gamma = int(doc.get("m", 1)), int(doc.get("n", 2)), float(doc["gamma"])
        mu = float(doc.get("mu", 0))
        d = doc.get("d")
        if "lambda" in doc:
            lam = float(doc["lambda"])
        elif d is not None:
            lam = lossiness_bound_wcdist(m, n, float(d), gamma)
        else:
            raise ParamError("need 'lambda' or 'd'")
        rep = theta_report(mu, lam, gamma, m=m, n=n, eta=doc.get("eta"))
        regimes = regime_check(doc.get("T_exponent", 1), doc.get("m_exponent", 1), mu, gamma, lam, n,
                               d=d, eta=doc.get("eta"), tau=doc.get("tau"), tau_pi=doc.get("tau_pi"))
    except (KeyError, ValueError, TypeError) as exc:
        print(f"error: {args.block}: {exc}", file=sys.stderr)
        return 2
    print(rep.table())
    for name, flag in regimes.items():
        print(f"regime {name:<18} {flag.satisfied}")
        for line in flag.binding:
            print(f"    {line}")
    if args.out:
        out = {"schema_version": 1, "theta": rep.to_json(), "regimes": {k: v.to_json() for k, v in regimes.items()}}
        args.out.write_text(dumps(out))
    return 0


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    if args.command == "params":
        return _params(args)
    if args.command == "report":
        try:
            doc = json.loads(args.report.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            print(f"error: {args.report}: {exc}", file=sys.stderr)
            return 2
        print(format_report(doc))
        return 0 if doc.get("passed") else 1
    only = None if args.command == "run" else [args.command]
    try:
        rep = run_scenario(args.scenario, seed=args.seed, out=args.out, exhaustive=args.exhaustive,
                           jobs=args.jobs, only=only)
    except (ScenarioError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    doc = rep.to_json()
    if args.normalized:
        sys.stdout.write(dumps(normalize(doc)))
    else:
        print(format_report(doc))
    return 0 if rep.passed else 1


if __name__ == "__main__":
    sys.exit(main())
