"""Scenario files, pipeline orchestration and run reports."""
from __future__ import annotations

import json
import logging
import math
import os
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional

from . import __version__, kernels
from .crypto import InverterOracle, efi_decide, efi_pair, owf_dichotomy, restricted_supports
from .disguise import DisguiseCollection, build_disguising_collection, delta_of
from .information import as_fraction, frac_json
from .params import regime_check, theta_report
from .problems import PromiseProblem, to_hex
from .reductions import (PermInvariantF, distinguisher_error, mild_lossiness_estimate, p_of_f,
                         reduction_from_json)
from .szk import build_instance_circuits, polarize, szk_gap_report

log = logging.getLogger("lossylab")

SCHEMA_VERSION = 1
PIPELINES = ("lossiness", "disguise", "szk", "owf", "efi", "params")
SAMPLED = {"disguise", "owf", "efi"}
DEPENDS = {"szk": ["disguise"], "owf": ["disguise"], "efi": ["disguise"]}


class ScenarioError(ValueError):
    pass


def _field(doc, path: str, cast=None, default=...):
    cur = doc
    for key in path.split("."):
        if not isinstance(cur, dict) or key not in cur:
            if default is not ...:
                return default
            raise ScenarioError(f"field '{path}': missing")
        cur = cur[key]
    if cast is None:
        return cur
    try:
        return cast(cur)
    except (TypeError, ValueError, ZeroDivisionError, KeyError) as exc:
        raise ScenarioError(f"field '{path}': {exc}") from exc


@dataclass
class Scenario:
    name: str
    problem: PromiseProblem
    f: PermInvariantF
    reduction_doc: dict
    gamma: Fraction
    eps: Fraction
    d: int
    ell_claim: Optional[float]
    mu_claim: Optional[Fraction]
    nu: Optional[Fraction]
    seed: Optional[int]
    pipelines: List[str]
    output: Optional[str]
    collection_path: Optional[str]
    options: dict
    source: dict
    base: Path

    @classmethod
    def load(cls, path) -> "Scenario":
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ScenarioError(f"{path}: {exc.strerror}") from exc
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
        return cls.from_doc(doc, path.parent)

    @classmethod
    def from_doc(cls, doc: dict, base: Path = Path(".")) -> "Scenario":
        if not isinstance(doc, dict):
            raise ScenarioError("scenario must be a JSON object")
        version = _field(doc, "schema_version", int)
        if version != SCHEMA_VERSION:
            raise ScenarioError(f"field 'schema_version': unsupported version {version}")
        try:
            problem = PromiseProblem.from_json(_field(doc, "problem"))
        except ValueError as exc:
            raise ScenarioError(f"field 'problem': {exc}") from exc
        try:
            f = PermInvariantF.from_json(_field(doc, "f"))
        except (ValueError, KeyError) as exc:
            raise ScenarioError(f"field 'f': {exc}") from exc
        gamma = _field(doc, "params.gamma", as_fraction)
        if gamma <= 0:
            raise ScenarioError("field 'params.gamma': must be positive")
        eps = _field(doc, "params.eps", as_fraction, gamma / 4)
        d = _field(doc, "params.d", int, None)
        if d is None:
            d = math.ceil((f.m + 1) / eps)
        ell = _field(doc, "params.ell_claim", float, None)
        mu = _field(doc, "params.mu_claim", as_fraction, None)
        nu = _field(doc, "params.nu", as_fraction, None)
        seed = _field(doc, "seed", int, None)
        pipes = _field(doc, "pipelines", list)
        bad = [p for p in pipes if p not in PIPELINES]
        if bad:
            raise ScenarioError(f"field 'pipelines': unknown pipeline(s) {bad}")
        return cls(_field(doc, "name", str), problem, f, _field(doc, "reduction", dict), gamma, eps, d, ell, mu,
                   nu, seed, pipes, _field(doc, "output", str, None), _field(doc, "collection", str, None),
                   _field(doc, "options", dict, {}), doc, Path(base))

    def echo(self) -> dict:
        return self.source


@dataclass
class Verdict:
    pipeline: str
    name: str
    passed: bool
    value: object
    bound: object
    relation: str

    def to_json(self) -> dict:
        return asdict(self)


@dataclass
class RunReport:
    scenario: dict
    seed: int
    results: Dict[str, dict] = field(default_factory=dict)
    verdicts: List[Verdict] = field(default_factory=list)
    work: Dict[str, int] = field(default_factory=dict)
    runtime: Dict[str, object] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts)

    @property
    def as_designed(self) -> bool:
        expected = set(self.scenario.get("expected_failures", []))
        failed = {f"{v.pipeline}:{v.name}" for v in self.verdicts if not v.passed}
        return failed == expected

    def to_json(self) -> dict:
        return {"schema_version": SCHEMA_VERSION, "tool_version": __version__, "scenario": self.scenario,
                "seed": self.seed, "results": self.results, "verdicts": [v.to_json() for v in self.verdicts],
                "passed": self.passed, "as_designed": self.as_designed, "work": self.work,
                "runtime": self.runtime}


def normalize(report: dict) -> dict:
    """Drop wall-clock and machine-dependent fields."""
    return {k: v for k, v in report.items() if k != "runtime"}


def dumps(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _resolve_seed(sc: Scenario, seed: Optional[int], pipes: List[str]) -> Optional[int]:
    if seed is not None:
        return int(seed)
    if sc.seed is not None:
        return sc.seed
    env = os.environ.get("LOSSYLAB_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise ScenarioError(f"LOSSYLAB_SEED is not an integer: {env!r}") from exc
    if SAMPLED & set(pipes):
        raise ScenarioError("no seed given (scenario, --seed or LOSSYLAB_SEED) for a sampled pipeline")
    return None


def _order(requested: List[str], need_ell: bool = False) -> List[str]:
    want = set(requested)
    for p in requested:
        want.update(DEPENDS.get(p, []))
    if need_ell and want & {"disguise", "szk", "owf", "efi"}:
        # without a claimed ell the disguise step needs the measured one
        want.add("lossiness")
    return [p for p in PIPELINES if p in want]


def _load_collection(path: Path) -> DisguiseCollection:
    try:
        return DisguiseCollection.from_json(json.loads(Path(path).read_text()))
    except (OSError, ValueError, KeyError) as exc:
        raise ScenarioError(f"field 'collection': cannot load {path}: {exc}") from exc


def _num(x):
    return frac_json(x) if isinstance(x, Fraction) else x


def run_scenario(path=None, scenario: Optional[Scenario] = None, seed: Optional[int] = None,
                 out: Optional[str] = None, exhaustive: Optional[bool] = None, jobs: int = 1,
                 only: Optional[List[str]] = None, write: bool = True) -> RunReport:
    """Execute the requested pipelines in dependency order and write the report."""
    sc = scenario or Scenario.load(path)
    requested = only or sc.pipelines
    out_path = Path(out) if out else (sc.base / sc.output if sc.output else None)
    coll_path = (sc.base / sc.collection_path) if sc.collection_path else (
        out_path.with_name(out_path.stem + ".collection.json") if out_path else None)
    state: dict = {}
    # an explicitly named collection file stands in for the disguise step
    if sc.collection_path and "disguise" not in requested and coll_path.exists():
        state["collection"] = _load_collection(coll_path)
        pipes = [p for p in _order(requested) if p != "disguise"]
    else:
        pipes = _order(requested, need_ell=sc.ell_claim is None)
    seed = _resolve_seed(sc, seed, pipes)
    rep = RunReport(sc.echo(), seed if seed is not None else 0)
    rep.runtime = {"backend": kernels.BACKEND, "jobs": jobs, "seconds": {}}
    opts = sc.options
    problem, f = sc.problem, sc.f
    try:
        R = reduction_from_json(sc.reduction_doc, problem, f)
    except ValueError as exc:
        raise ScenarioError(f"field 'reduction': {exc}") from exc
    m = R.m

    dist = distinguisher_error(R, problem, f)
    mu = sc.mu_claim if sc.mu_claim is not None else dist.mu
    rep.results["reduction"] = {"name": R.name, "m": m, "N": R.N, "omega": len(R.omega), "L": R.L,
                                "mu_measured": frac_json(dist.mu), "mu_used": frac_json(mu),
                                "vacuous": dist.vacuous}
    ell = sc.ell_claim
    if ell is None and "collection" in state:
        ell = state["collection"].ell
    t_all = time.perf_counter()

    def timed(name, fn):
        t = time.perf_counter()
        fn()
        rep.runtime["seconds"][name] = round(time.perf_counter() - t, 6)

    def verdict(pipe, name, ok, value, bound, rel):
        rep.verdicts.append(Verdict(pipe, name, bool(ok), _num(value), _num(bound), rel))


    def do_lossiness():
        nonlocal ell
        cap = int(opts.get("lossiness_s_cap", R.N))
        lr = mild_lossiness_estimate(R, problem, sc.gamma, budget=int(opts.get("lossiness_budget", 2_000_000)),
                                     seed=seed or 0, exhaustive=exhaustive, s_cap=cap)
        rep.results["lossiness"] = asdict(lr)
        rep.work["lossiness_evaluations"] = lr.evaluated
        if sc.ell_claim is not None:
            verdict("lossiness", "measured ell within claim", lr.ell <= sc.ell_claim + 1e-9,
                    lr.ell, sc.ell_claim, "<=")
        else:
            ell = lr.ell

    def do_disguise():
        if ell is None:
            raise ScenarioError("field 'params.ell_claim': required when the lossiness pipeline is not run")
        p = p_of_f(f)
        coll = build_disguising_collection(R, problem.no, problem.yes, m - p, p - 1, sc.d, sc.eps, ell,
                                           seed=seed, jobs=jobs, max_rows=int(opts.get("max_rows", 10**5)))
        if write and coll_path is not None:
            coll_path.parent.mkdir(parents=True, exist_ok=True)
            coll_path.write_text(dumps(coll.to_json()))
        state["collection"] = coll
        rep.results["disguise"] = {k: v for k, v in coll.to_json().items() if k != "pairs"}
        rep.results["disguise"]["s"] = coll.s
        rep.work["disguise_rows"] = coll.rows
        if not coll.degenerate:
            verdict("disguise", "achieved within bound", coll.achieved <= coll.bound, coll.achieved,
                    coll.bound, "<=")

    def collection() -> DisguiseCollection:
        if "collection" not in state:
            if coll_path is None or not coll_path.exists():
                raise ScenarioError("no persisted disguising collection: run the disguise pipeline first")
            state["collection"] = _load_collection(coll_path)
        return state["collection"]

    def do_szk():
        coll = collection()
        g = szk_gap_report(R, problem, f, coll, ell=ell, gamma=sc.gamma, mu=mu, seed=seed)
        res = g.to_json(problem.n)
        if not coll.degenerate and g.theta_szk is not None and g.theta_szk > 1:
            a, perm = g.advice
            y = problem.yes[0] if problem.yes else problem.instances[0]
            C0, C1 = build_instance_circuits(R, problem, f, coll, a, perm, y)
            k = int(opts.get("polarize_k", 2))
            res["polarization"] = polarize(C0, C1, g.alpha, g.beta, k).to_json()
        rep.results["szk"] = res
        if g.yes_gap_min is not None:
            verdict("szk", "yes gap", g.yes_ok, g.yes_gap_min, g.beta, ">=")
        if g.no_gap_max is not None:
            verdict("szk", "no gap", g.no_ok, g.no_gap_max, g.alpha, "<=")
        verdict("szk", "collection consistency", g.consistent, None, None, "NO-side <= achieved")

    def do_owf():
        coll = collection()
        strategy = opts.get("inverter", "brute-force")
        inv = InverterOracle(strategy)
        d = owf_dichotomy(problem, R, f, coll, inv, seed=seed, ell=ell, gamma=sc.gamma, mu=mu)
        res = d.to_json(problem.n)
        a, perm = d.advice
        if problem.yes:
            C0, C1 = build_instance_circuits(R, problem, f, coll, a, perm, problem.yes[0])
            rp = restricted_supports(C0, C1, mu)
            res["restricted"] = {"retained0": frac_json(rp.retained0), "retained1": frac_json(rp.retained1),
                                 "premise_ok": rp.premise_ok, "case_split_ok": rp.case_split_ok}
        rep.results["owf"] = res
        rep.work["owf_queries"] = inv.queries
        verdict("owf", "all instances decided", d.all_correct, None, None, "all correct")
        no_flags = [x for x in d.flags if "NO-side" in x]
        verdict("owf", "NO-side X within delta+gamma", not no_flags, len(no_flags), 0, "==")

    def do_efi():
        coll = collection()
        ep = efi_pair(problem, R, f, coll, seed=seed)
        nu = sc.nu if sc.nu is not None else 1 - 2 * mu
        trials = int(opts.get("efi_trials", 1000))
        decisions = {}
        rates = []
        for z in problem.instances:
            dz = efi_decide(problem, R, f, coll, nu, z, seed=seed, trials=trials, ell=ell, gamma=sc.gamma)
            decisions[to_hex(z, problem.n)] = dz.to_json(problem.n)
            rates.append(dz.correct_rate)
        rep.results["efi"] = {"D": frac_json(ep.D), "y": to_hex(ep.y, problem.n), "nu": frac_json(Fraction(nu)),
                              "trials": trials, "decisions": decisions}
        rep.work["efi_trials"] = trials * len(problem.instances)
        verdict("efi", "statistical distance", ep.D >= 1 - 2 * mu, ep.D, 1 - 2 * mu, ">=")
        verdict("efi", "per-instance correctness", min(rates) >= 2 / 3, min(rates), 2 / 3, ">=")

    def do_params():
        lam = (ell if ell is not None else 0.0) / m
        tr = theta_report(min(float(mu), 0.4999999), lam, sc.gamma, m=m, n=problem.n)
        rc = regime_check(int(opts.get("T_exponent", m)), math.log2(m), float(mu), float(sc.gamma), lam,
                          n=max(problem.n, 2))
        rep.results["params"] = {"theta": tr.to_json(), "regimes": {k: v.to_json() for k, v in rc.items()}}

    steps = {"lossiness": do_lossiness, "disguise": do_disguise, "szk": do_szk, "owf": do_owf, "efi": do_efi,
             "params": do_params}
    for p in pipes:
        log.info("pipeline %s", p)
        timed(p, steps[p])
    rep.results["delta"] = delta_of(ell, m) if ell is not None else None
    rep.runtime["seconds"]["total"] = round(time.perf_counter() - t_all, 6)
    if write and out_path is not None:
        out_path.parent.mkdir(parents=True, exist_ok=True)
        out_path.write_text(dumps(rep.to_json()))
    return rep


def bundled_scenarios() -> Dict[str, Path]:
    root = Path(__file__).with_name("scenarios")
    return {p.stem: p for p in sorted(root.glob("*.json")) if not p.stem.startswith("params-")}


def format_report(doc: dict) -> str:
    """Plain-text verdict table for a run report."""
    lines = [f"scenario  {doc['scenario'].get('name')}", f"seed      {doc['seed']}",
             f"passed    {doc['passed']}", f"designed  {doc.get('as_designed')}", ""]
    for v in doc["verdicts"]:
        mark = "PASS" if v["passed"] else "FAIL"
        lines.append(f"{mark}  {v['pipeline']:<10} {v['name']:<32} {_short(v['value'])} {v['relation']} "
                     f"{_short(v['bound'])}")
    return "\n".join(lines)


def _short(v) -> str:
    if isinstance(v, dict) and "num" in v:
        return f"{v['num']}/{v['den']}" if v["den"] != 1 else str(v["num"])
    if isinstance(v, float):
        return f"{v:.6g}"
    return "-" if v is None else str(v)
