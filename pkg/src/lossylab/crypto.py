"""EFI and one-way-function candidates built from the instance circuits, with brute-force adversaries."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np

from .disguise import DisguiseCollection, delta_of
from .information import FiniteDistribution, SUniform, derive_seed, frac_json, statistical_distance
from .problems import PromiseProblem, to_hex
from .reductions import PermInvariantF, StochasticReduction, distinguisher_error
from .szk import CircuitDescriptor, build_instance_circuits, draw_advice

OWF_REPETITION_CONSTANT = 64


class CryptoError(ValueError):
    pass


class ParameterError(CryptoError):
    pass


# -- candidates and inverters ---------------------------------------------------------

class OwfCandidate:
    """F := Ĉ0 (single-branch) or F(b, r) selecting Ĉ0 / Ĉ1[y*] (two-branch)."""

    def __init__(self, C0: CircuitDescriptor, C1: Optional[CircuitDescriptor] = None, y_star: Optional[int] = None):
        self.C0 = C0
        self.C1 = C1
        self.y_star = y_star
        if C1 is not None and C1.randomness_size != C0.randomness_size:
            raise CryptoError("branches must share the randomness space")

    @property
    def variant(self) -> str:
        return "single-branch" if self.C1 is None else "two-branch"

    @property
    def randomness_size(self) -> int:
        return self.C0.randomness_size

    @property
    def kappa(self) -> int:
        return self.C0.kappa


def owf_eval(F: OwfCandidate, b: int, r: int):
    if not 0 <= r < F.randomness_size:
        raise CryptoError(f"randomness index {r} outside [0, {F.randomness_size})")
    if F.variant == "single-branch" or b == 0:
        return F.C0.evaluate(r)
    return F.C1.evaluate(r)


def single_branch_candidate(R, problem, f, collection, seed: int = 0) -> OwfCandidate:
    a, perm = draw_advice(collection, R.m, seed)
    C0, _ = build_instance_circuits(R, problem, f, collection, a, perm, problem.instances[0])
    return OwfCandidate(C0)


def two_branch_candidate(R, problem, f, collection, seed: int = 0) -> OwfCandidate:
    """y* is drawn from U_{K_a} once, at construction."""
    a, perm = draw_advice(collection, R.m, seed)
    K, _ = collection.pairs[a]
    rng = np.random.default_rng(derive_seed(seed, 29))
    y_star = K[int(rng.integers(len(K)))]
    C0, C1 = build_instance_circuits(R, problem, f, collection, a, perm, y_star)
    return OwfCandidate(C0, C1, y_star)


class InverterOracle:
    """Adversary against Ĉ0: returns some r' with Ĉ0(r') = z, or None."""

    STRATEGIES = ("brute-force", "always-fail", "planted")

    def __init__(self, strategy: str = "brute-force", planted: Iterable = ()):
        if strategy not in self.STRATEGIES:
            raise CryptoError(f"unknown inverter strategy {strategy!r}")
        self.strategy = strategy
        self.planted = set(planted)
        self.queries = 0
        self.successes = 0
        self._pre: Dict[int, Dict] = {}

    def _preimages(self, C0: CircuitDescriptor) -> Dict:
        key = id(C0)
        if key not in self._pre:
            first: Dict = {}
            for r, w in enumerate(C0.table()):
                first.setdefault(w, r)
            self._pre[key] = first
        return self._pre[key]

    def would_invert(self, C0: CircuitDescriptor, z) -> bool:
        if self.strategy == "always-fail":
            return False
        if self.strategy == "planted" and z not in self.planted:
            return False
        return z in self._preimages(C0)

    def invert(self, C0: CircuitDescriptor, z) -> Optional[int]:
        self.queries += 1
        if not self.would_invert(C0, z):
            return None
        self.successes += 1
        return self._preimages(C0)[z]


# -- image restriction ----------------------------------------------------------------

@dataclass
class RestrictedPair:
    A: tuple
    law0: FiniteDistribution
    law1: FiniteDistribution
    retained0: Fraction
    retained1: Fraction
    shift0: Fraction
    shift1: Fraction
    premise_ok: bool
    case_split_ok: bool


def _conditional(L: FiniteDistribution, keep) -> Tuple[FiniteDistribution, Fraction]:
    mass = sum((L(a) for a in keep), Fraction(0))
    if not mass:
        return None, Fraction(0)
    return FiniteDistribution(tuple(keep), [L(a) / mass for a in keep]), mass


def restricted_supports(C0, C1, mu=0) -> RestrictedPair:
    """A = {a : D̂0(a) ≥ D̂1(a)}; C̃0 is Ĉ0 conditioned on A, C̃1 is Ĉ1 conditioned on A^c."""
    L0 = C0.law() if isinstance(C0, CircuitDescriptor) else C0
    L1 = C1.law() if isinstance(C1, CircuitDescriptor) else C1
    mu = Fraction(mu)
    keys = list(dict.fromkeys(list(L0.support) + list(L1.support)))
    A = tuple(a for a in keys if L0(a) >= L1(a))
    Ac = tuple(a for a in keys if L0(a) < L1(a))
    t0, m0 = _conditional(L0, A)
    t1, m1 = _conditional(L1, Ac)
    s0 = statistical_distance(L0, t0) if t0 is not None else Fraction(1)
    s1 = statistical_distance(L1, t1) if t1 is not None else Fraction(1)
    premise = statistical_distance(L0, L1) >= 1 - 2 * mu
    split = (m0 >= 1 - mu and m1 >= 1 - 2 * mu) or (m0 >= 1 - 2 * mu and m1 >= 1 - mu)
    return RestrictedPair(A, t0, t1, m0, m1, s0, s1, premise, split)


# -- the OWF dichotomy ----------------------------------------------------------------

def owf_repetitions(theta: float) -> int:
    return math.ceil(OWF_REPETITION_CONSTANT / theta ** 2)


def exact_X(C0: CircuitDescriptor, C1: CircuitDescriptor, inverter: InverterOracle) -> Tuple[Fraction, Fraction]:
    """Pr[B=1 | b=0], Pr[B=1 | b=1] for a deterministic inverter, by enumeration."""
    L0, L1 = C0.law(), C1.law()
    p0 = sum((L0(z) for z in L0.support if inverter.would_invert(C0, z)), Fraction(0))
    p1 = sum((L1(z) for z in L1.support if inverter.would_invert(C0, z)), Fraction(0))
    return p0, p1


def run_B(C0: CircuitDescriptor, C1: CircuitDescriptor, inverter: InverterOracle, k: int, seed: int
          ) -> Tuple[int, int, int, int]:
    """k runs of B^A; returns (successes | b=0, trials | b=0, successes | b=1, trials | b=1)."""
    rng = np.random.default_rng(seed)
    size = C0.randomness_size
    bs = rng.integers(0, 2, size=k)
    rs = rng.integers(0, size, size=k)
    t0 = C0.table()
    t1 = C1.table()
    out = [0, 0, 0, 0]
    for b, r in zip(bs, rs):
        z = (t1 if b else t0)[int(r)]
        r2 = inverter.invert(C0, z)
        hit = r2 is not None and t0[r2] == z
        out[2 * int(b)] += int(hit)
        out[2 * int(b) + 1] += 1
    return tuple(out)


@dataclass
class DichotomyReport:
    theta: float
    k: int
    threshold: float
    delta: float
    gamma: Fraction
    mu: Fraction
    inverter: str
    advice: Tuple[int, tuple]
    per_instance: Dict[int, dict] = field(default_factory=dict)
    flags: List[str] = field(default_factory=list)

    @property
    def all_correct(self) -> bool:
        return all(v["correct"] for v in self.per_instance.values())

    def to_json(self, n: int) -> dict:
        return {
            "theta_owf": self.theta, "k": self.k, "repetition_constant": OWF_REPETITION_CONSTANT,
            "threshold": self.threshold, "delta": self.delta, "gamma": frac_json(self.gamma),
            "mu": frac_json(self.mu), "inverter": self.inverter,
            "advice": {"a": self.advice[0], "perm": list(self.advice[1])},
            "per_instance": {to_hex(y, n): {**{k: v for k, v in d.items() if k != "X_exact"},
                                            "X_exact": frac_json(d["X_exact"])}
                             for y, d in sorted(self.per_instance.items())},
            "all_correct": self.all_correct, "flags": list(self.flags),
        }


def owf_dichotomy(problem: PromiseProblem, R: StochasticReduction, f: PermInvariantF,
                  collection: DisguiseCollection, inverter: InverterOracle, theta=None, seed: int = 0,
                  ell=None, gamma=None, mu=None, k: Optional[int] = None) -> DichotomyReport:
    """Run C^A on every promise instance: estimate X with k runs of B^A and threshold it.

    θ_owf defaults to (1 - 10μ) - (δ + γ) from the claimed parameters.
    """
    ell = collection.ell if ell is None else float(ell)
    gamma = 4 * collection.eps if gamma is None else Fraction(gamma)
    mu = distinguisher_error(R, problem, f).mu if mu is None else Fraction(mu)
    delta = delta_of(ell, R.m)
    alpha = delta + float(gamma)
    if theta is None:
        theta = float(1 - 10 * mu) - alpha
    theta = float(theta)
    if theta <= 0:
        raise ParameterError(f"theta_owf = {theta:.6g} must be positive")
    k = owf_repetitions(theta) if k is None else int(k)
    threshold = alpha + theta / 4
    advice = draw_advice(collection, R.m, seed)
    rep = DichotomyReport(theta, k, threshold, delta, gamma, mu, inverter.strategy, advice)
    for i, y in enumerate(problem.instances):
        C0, C1 = build_instance_circuits(R, problem, f, collection, advice[0], advice[1], y)
        p0, p1 = exact_X(C0, C1, inverter)
        X = abs(p0 - p1)
        s0, n0, s1, n1 = run_B(C0, C1, inverter, k, derive_seed(seed, 31, i))
        est = abs((s0 / n0 if n0 else 0.0) - (s1 / n1 if n1 else 0.0))
        side = problem.chi(y)
        decision = int(est > threshold)
        rep.per_instance[y] = {"side": side, "X_exact": X, "X_estimate": est, "decision": decision,
                               "correct": decision == side, "trials": [n0, n1]}
        if side == 0 and float(X) > alpha:
            rep.flags.append(f"{to_hex(y, problem.n)}: NO-side X = {float(X):.6g} exceeds delta+gamma = {alpha:.6g}")
        if side == 1 and inverter.strategy == "brute-force" and float(X) < 1 - theta / 2 - 10 * float(mu):
            rep.flags.append(f"{to_hex(y, problem.n)}: YES-side X = {float(X):.6g} below 1-theta/2-10mu")
    if inverter.strategy != "brute-force":
        rep.flags.append("inverter is not exhaustive: no decision guarantee")
    return rep


# -- EFI ------------------------------------------------------------------------------

@dataclass
class EfiPair:
    law0: FiniteDistribution
    law1: FiniteDistribution
    D: Fraction
    y: int
    advice: Tuple[int, tuple]


def efi_pair(problem: PromiseProblem, R: StochasticReduction, f: PermInvariantF,
             collection: DisguiseCollection, seed: int = 0) -> EfiPair:
    """Sample y ~ U_{T_a} and return the exact laws of (Ĉ0, Ĉ1[y])."""
    if collection.b_Y:
        raise CryptoError("no YES instances (b_Y = 1): the EFI pair is undefined")
    if collection.b_N:
        raise CryptoError("no NO instances (b_N = 1): the circuits are the fixed bypass pair")
    a, perm = draw_advice(collection, R.m, seed)
    _, T = collection.pairs[a]
    rng = np.random.default_rng(derive_seed(seed, 37))
    y = T[int(rng.integers(len(T)))]
    C0, C1 = build_instance_circuits(R, problem, f, collection, a, perm, y)
    return EfiPair(C0.law(), C1.law(), statistical_distance(C0.law(), C1.law()), y, (a, perm))


def efi_laws(R, problem, f, collection, advice) -> Tuple[FiniteDistribution, FiniteDistribution]:
    """The EFI states as sampled: law of Ĉ0, and of Ĉ1[y] with y ~ U_{T_a}."""
    a, perm = advice
    _, T = collection.pairs[a]
    laws = []
    C0 = None
    for y, c in SUniform(T).distribution().items():
        if not c:
            continue
        C0, C1 = build_instance_circuits(R, problem, f, collection, a, perm, y)
        laws.append((c, C1.law()))
    keys = list(dict.fromkeys(list(C0.law().support) + [w for _, L in laws for w in L.support]))
    mix = FiniteDistribution(tuple(keys), [sum((c * L(w) for c, L in laws), Fraction(0)) for w in keys])
    return C0.law(), mix


@dataclass
class EfiDecision:
    z: int
    side: int
    tau: float
    k: int
    p_success: Fraction
    decision: Optional[int] = None
    correct: Optional[bool] = None
    correct_rate: Optional[float] = None
    hoeffding: float = 0.0

    def to_json(self, n: int) -> dict:
        return {"z": to_hex(self.z, n), "side": self.side, "tau": self.tau, "k": self.k,
                "p_success": frac_json(self.p_success), "decision": self.decision, "correct": self.correct,
                "correct_rate": self.correct_rate, "hoeffding": self.hoeffding}


def efi_tau(nu, delta: float, gamma) -> float:
    return float(nu) / 4 - 3 * (delta + float(gamma)) / 4


def efi_decide(problem: PromiseProblem, R: StochasticReduction, f: PermInvariantF,
               collection: DisguiseCollection, nu, z: int, seed: int = 0, trials: int = 1,
               ell=None, gamma=None, k: Optional[int] = None) -> EfiDecision:
    """Algorithm C: k runs of B, answer YES (the 0-branch) iff |mean - 1/2| ≥ τ.

    B hands C'_b to the optimal statistical distinguisher for the EFI laws;
    each run succeeds with an exactly computed probability, so k runs are one
    seeded binomial draw. With trials > 1 the empirical correctness rate is recorded.
    """
    ell = collection.ell if ell is None else float(ell)
    gamma = 4 * collection.eps if gamma is None else Fraction(gamma)
    delta = delta_of(ell, R.m)
    tau = efi_tau(nu, delta, gamma)
    if tau <= 0:
        raise ParameterError(f"tau = {tau:.6g} must be positive")
    k = math.ceil(1 / tau ** 2) if k is None else int(k)
    advice = draw_advice(collection, R.m, seed)
    E0, E1 = efi_laws(R, problem, f, collection, advice)
    C0, C1 = build_instance_circuits(R, problem, f, collection, advice[0], advice[1], z)
    guess1 = {w for w in set(E0.support) | set(E1.support) if E1(w) > E0(w)}
    L0, L1 = C0.law(), C1.law()
    correct0 = sum((L0(w) for w in L0.support if w not in guess1), Fraction(0))
    correct1 = sum((L1(w) for w in L1.support if w in guess1), Fraction(0))
    p = (correct0 + correct1) / 2
    side = problem.chi(z)
    rng = np.random.default_rng(derive_seed(seed, 41, z))
    means = rng.binomial(k, float(p), size=trials) / k
    decisions = np.where(np.abs(means - 0.5) >= tau, 1, 0)
    out = EfiDecision(z, side, tau, k, p, hoeffding=1 - math.exp(-2 * k * tau * tau))
    out.decision = int(decisions[0])
    out.correct = out.decision == side
    out.correct_rate = float(np.mean(decisions == side))
    return out
