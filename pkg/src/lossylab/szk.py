"""Instance circuits of the lossy-to-SD reduction, their exact laws, the gap report and polarization."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .disguise import DisguiseCollection, arrangements, delta_of
from .information import (FiniteDistribution, SUniform, derive_seed, frac_json, lcm_of,
                          statistical_distance)
from .problems import PromiseProblem, to_hex
from .reductions import PermInvariantF, StochasticReduction, distinguisher_error, p_of_f

MAX_RANDOMNESS = 2_000_000

NEAR_PAIR = (FiniteDistribution((0, 1), [Fraction(1, 2), Fraction(1, 2)]),
             FiniteDistribution((0, 1), [Fraction(3, 4), Fraction(1, 4)]))
FAR_PAIR = (FiniteDistribution.point(0), FiniteDistribution.point(1))


class SZKError(ValueError):
    pass


class PolarizationError(ValueError):
    pass


class CircuitDescriptor:
    """One circuit of the pair: samples slot inputs, permutes them, runs R.

    Slots before permutation are [K]*(m-p) + [K or y] + [T]*(p-1); output
    position i reads slot perm[i]. Randomness is a uniform index in
    [0, d^m * L): one digit in [d] per position (ignored for the pinned slot)
    and a final digit in [L] selecting the kernel outcome.
    """

    def __init__(self, R: Optional[StochasticReduction], K: tuple = (), T: tuple = (), perm: tuple = (),
                 p: int = 1, b_Y: int = 0, b_N: int = 0, y: Optional[int] = None,
                 fixed: Optional[FiniteDistribution] = None):
        self.R = R
        self.K, self.T = tuple(K), tuple(T)
        self.perm = tuple(perm)
        self.p = p
        self.b_Y, self.b_N = b_Y, b_N
        self.y = y
        self.fixed = fixed
        self._law = None
        self._table = None
        if fixed is None:
            m = R.m
            if sorted(self.perm) != list(range(m)):
                raise SZKError("perm must be a permutation of the slots")
            if not 1 <= p <= m:
                raise SZKError("p must lie in [1, m]")
            if not self.K or (p > 1 and not self.T):
                raise SZKError("empty multiset for a sampled slot")

    @property
    def role(self) -> str:
        if self.fixed is not None:
            return "fixed"
        return "baseline" if self.y is None else "pinned"

    @property
    def d(self) -> int:
        return len(self.K)

    def kinds(self) -> tuple:
        m = self.R.m
        slots = ["K"] * (m - self.p) + ["K" if self.y is None else "y"] + ["T"] * (self.p - 1)
        return tuple(slots[self.perm[i]] for i in range(m))

    @property
    def randomness_size(self) -> int:
        if self.fixed is not None:
            return lcm_of(q.denominator for q in self.fixed.masses)
        return self.d ** self.R.m * self.R.L

    @property
    def kappa(self) -> int:
        """Bits needed to index the randomness space."""
        return max(1, math.ceil(math.log2(self.randomness_size)))

    def slot_laws(self) -> List[FiniteDistribution]:
        table = {"K": SUniform(self.K).distribution(),
                 "T": SUniform(self.T).distribution() if self.T else None,
                 "y": FiniteDistribution.point(self.y)}
        return [table[k] for k in self.kinds()]

    def law(self) -> FiniteDistribution:
        if self._law is None:
            self._law = self.fixed if self.fixed is not None else self.R.law(self.slot_laws())
        return self._law

    def evaluate(self, r: int):
        """Deterministic outcome at randomness index r."""
        size = self.randomness_size
        if not 0 <= r < size:
            raise SZKError(f"randomness index {r} outside [0, {size})")
        if self.fixed is not None:
            acc = 0
            for a, q in self.fixed.items():
                acc += q.numerator * (size // q.denominator)
                if r < acc:
                    return a
            raise AssertionError("unreachable")
        R = self.R
        r, j = divmod(r, R.L)
        digits = []
        for _ in range(R.m):
            r, x = divmod(r, self.d)
            digits.append(x)
        digits.reverse()
        t = []
        for kind, x in zip(self.kinds(), digits):
            t.append(self.K[x] if kind == "K" else self.T[x] if kind == "T" else self.y)
        acc = 0
        for w, c in zip(R.omega, R.km.rows[R.rank(t)]):
            acc += c
            if j < acc:
                return w
        raise AssertionError("unreachable")

    def table(self) -> List:
        """Outcome for every randomness index (cached)."""
        if self._table is None:
            size = self.randomness_size
            if size > MAX_RANDOMNESS:
                raise SZKError(f"randomness space {size} exceeds {MAX_RANDOMNESS}")
            self._table = [self.evaluate(r) for r in range(size)]
        return self._table

    def to_json(self) -> dict:
        if self.fixed is not None:
            return {"role": "fixed", "law": self.fixed.to_json()}
        n = self.R.problem.n
        return {"role": self.role, "K": [to_hex(x, n) for x in self.K], "T": [to_hex(x, n) for x in self.T],
                "perm": list(self.perm), "p": self.p, "b_Y": self.b_Y, "b_N": self.b_N,
                "y": to_hex(self.y, n) if self.y is not None else None,
                "randomness_size": self.randomness_size, "kappa": self.kappa}


@dataclass
class SDInstance:
    C0: CircuitDescriptor
    C1: CircuitDescriptor
    alpha: Optional[float] = None
    beta: Optional[float] = None

    @property
    def laws(self) -> Tuple[FiniteDistribution, FiniteDistribution]:
        return self.C0.law(), self.C1.law()

    @property
    def distance(self) -> Fraction:
        return statistical_distance(*self.laws)

    def to_json(self) -> dict:
        L0, L1 = self.laws
        return {"C0": self.C0.to_json(), "C1": self.C1.to_json(), "law0": L0.to_json(), "law1": L1.to_json(),
                "distance": frac_json(self.distance), "alpha": self.alpha, "beta": self.beta}


def _slot_split(R: StochasticReduction, f: PermInvariantF, coll: DisguiseCollection) -> int:
    p = p_of_f(f)
    if f.m != R.m:
        raise SZKError("f and R disagree on m")
    if (coll.m0, coll.m1) != (R.m - p, p - 1):
        raise SZKError(f"collection split (m0, m1) = ({coll.m0}, {coll.m1}) does not match p = {p}")
    return p


def build_instance_circuits(R: StochasticReduction, problem: PromiseProblem, f: PermInvariantF,
                            collection: DisguiseCollection, a: int, perm: Sequence[int], y: int
                            ) -> Tuple[CircuitDescriptor, CircuitDescriptor]:
    if problem.chi(y) not in (0, 1):
        raise SZKError(f"instance {y} is outside the promise")
    if collection.b_N:
        return CircuitDescriptor(None, fixed=NEAR_PAIR[0]), CircuitDescriptor(None, fixed=NEAR_PAIR[1])
    if collection.b_Y:
        return CircuitDescriptor(None, fixed=FAR_PAIR[0]), CircuitDescriptor(None, fixed=FAR_PAIR[1])
    p = _slot_split(R, f, collection)
    if not 0 <= a < collection.s:
        raise SZKError(f"advice index {a} outside [0, {collection.s})")
    K, T = collection.pairs[a]
    C0 = CircuitDescriptor(R, K, T, tuple(perm), p)
    C1 = CircuitDescriptor(R, K, T, tuple(perm), p, y=y)
    return C0, C1


def circuit_output_distribution(C: CircuitDescriptor, enumerate_randomness: bool = False) -> FiniteDistribution:
    """Exact output law; with enumerate_randomness, counted over every randomness index."""
    if not enumerate_randomness:
        return C.law()
    counts: Dict = {}
    for w in C.table():
        counts[w] = counts.get(w, 0) + 1
    size = C.randomness_size
    alphabet = C.law().alphabet
    return FiniteDistribution(alphabet, [Fraction(counts.get(w, 0), size) for w in alphabet])


def draw_advice(collection: DisguiseCollection, m: int, seed: int) -> Tuple[int, tuple]:
    """The algorithm's single uniform advice draw (a, π)."""
    rng = np.random.default_rng(derive_seed(seed, 23))
    a = int(rng.integers(max(collection.s, 1)))
    perm = tuple(int(v) for v in rng.permutation(m))
    return a, perm


def perm_for_kinds(kinds: Sequence[str], p: int) -> tuple:
    """A permutation realising the given placement of slot kinds."""
    m = len(kinds)
    slot_of = {"K": list(range(m - p)), "y": [m - p], "T": list(range(m - p + 1, m))}
    perm = []
    for k in kinds:
        perm.append(slot_of[k].pop(0))
    return tuple(perm)


@dataclass
class GapReport:
    yes_gap_min: Optional[Fraction]
    no_gap_max: Optional[Fraction]
    fixed_yes_gap_min: Optional[Fraction]
    fixed_no_gap_max: Optional[Fraction]
    mu: Fraction
    ell: float
    delta: float
    gamma: Fraction
    theta_szk: Optional[float]
    degenerate_theta: bool
    yes_ok: bool
    no_ok: bool
    consistent: bool
    advice: Tuple[int, tuple]
    per_instance: Dict[int, dict] = field(default_factory=dict)
    violations: List[str] = field(default_factory=list)

    @property
    def alpha(self) -> float:
        return self.delta + float(self.gamma)

    @property
    def beta(self) -> Fraction:
        return 1 - 2 * self.mu

    def to_json(self, n: int) -> dict:
        fj = lambda v: frac_json(v) if v is not None else None
        return {
            "yes_gap_min": fj(self.yes_gap_min), "no_gap_max": fj(self.no_gap_max),
            "fixed_yes_gap_min": fj(self.fixed_yes_gap_min), "fixed_no_gap_max": fj(self.fixed_no_gap_max),
            "mu": frac_json(self.mu), "ell": self.ell, "delta": self.delta, "gamma": frac_json(self.gamma),
            "alpha": self.alpha, "beta": frac_json(self.beta), "theta_szk": self.theta_szk,
            "degenerate_theta": self.degenerate_theta, "yes_ok": self.yes_ok, "no_ok": self.no_ok,
            "consistent": self.consistent, "advice": {"a": self.advice[0], "perm": list(self.advice[1])},
            "per_instance": {to_hex(y, n): {"side": v["side"], "expected": frac_json(v["expected"]),
                                            "fixed": frac_json(v["fixed"])}
                             for y, v in sorted(self.per_instance.items())},
            "violations": list(self.violations),
        }


def szk_gap_report(R: StochasticReduction, problem: PromiseProblem, f: PermInvariantF,
                   collection: DisguiseCollection, ell=None, gamma=None, mu=None, seed: int = 0) -> GapReport:
    """YES/NO gaps of the circuit pair, averaged over (a, π) and at one fixed advice draw.

    `ell` is the claimed total lossiness (default: the collection's), `gamma`
    defaults to 4ε, and `mu` to the measured distinguisher error of R.
    """
    ell = collection.ell if ell is None else float(ell)
    gamma = 4 * collection.eps if gamma is None else Fraction(gamma)
    if mu is None:
        mu = distinguisher_error(R, problem, f).mu
    mu = Fraction(mu)
    delta = delta_of(ell, R.m)
    alpha = delta + float(gamma)
    beta = 1 - 2 * mu
    degenerate_theta = alpha == 0
    theta = None if degenerate_theta else float(beta) ** 2 / alpha
    advice = draw_advice(collection, R.m, seed)
    per: Dict[int, dict] = {}
    if collection.degenerate:
        C0, C1 = build_instance_circuits(R, problem, f, collection, 0, tuple(range(R.m)), problem.instances[0])
        dist = statistical_distance(C0.law(), C1.law())
        for y in problem.instances:
            per[y] = {"side": problem.chi(y), "expected": dist, "fixed": dist}
    else:
        p = _slot_split(R, f, collection)
        kinds_all = arrangements(collection.m0, collection.m1)
        perms = [perm_for_kinds(k, p) for k in kinds_all]
        fixed_kinds = CircuitDescriptor(R, *collection.pairs[advice[0]], advice[1], p,
                                         y=problem.instances[0]).kinds()
        totals = {y: Fraction(0) for y in problem.instances}
        fixed = {}
        for a, (K, T) in enumerate(collection.pairs):
            for kinds, perm in zip(kinds_all, perms):
                base = CircuitDescriptor(R, K, T, perm, p).law()
                for y in problem.instances:
                    dist = statistical_distance(base, CircuitDescriptor(R, K, T, perm, p, y=y).law())
                    totals[y] += dist
                    if a == advice[0] and kinds == fixed_kinds:
                        fixed[y] = dist
        count = collection.s * len(kinds_all)
        for y in problem.instances:
            per[y] = {"side": problem.chi(y), "expected": totals[y] / count, "fixed": fixed[y]}
    yes = [v for v in per.values() if v["side"] == 1]
    no = [v for v in per.values() if v["side"] == 0]
    pick = lambda vs, key, fn: fn(v[key] for v in vs) if vs else None
    rep = GapReport(pick(yes, "expected", min), pick(no, "expected", max), pick(yes, "fixed", min),
                    pick(no, "fixed", max), mu, ell, delta, gamma, theta, degenerate_theta,
                    True, True, True, advice, per)
    if rep.yes_gap_min is not None and rep.yes_gap_min < beta:
        rep.yes_ok = False
        rep.violations.append(f"yes_gap_min {float(rep.yes_gap_min):.6g} < 1-2mu = {float(beta):.6g}")
    if rep.no_gap_max is not None and float(rep.no_gap_max) > alpha:
        rep.no_ok = False
        rep.violations.append(f"no_gap_max {float(rep.no_gap_max):.6g} > delta+gamma = {alpha:.6g}")
    if not collection.degenerate and collection.achieved is not None:
        worst = max((v["expected"] for v in no), default=Fraction(0))
        if worst > collection.achieved:
            rep.consistent = False
            rep.violations.append("NO-side expectation exceeds the collection's achieved value")
    return rep


# -- polarization ---------------------------------------------------------------------

Pair = List[Tuple[Fraction, Fraction]]


def merge_classes(pairs) -> Pair:
    """Merge outcomes with equal likelihood ratio; distances of all derived pairs are unchanged."""
    acc: Dict[Fraction, List[Fraction]] = {}
    for p0, p1 in pairs:
        tot = p0 + p1
        if not tot:
            continue
        key = p0 / tot
        if key in acc:
            acc[key][0] += p0
            acc[key][1] += p1
        else:
            acc[key] = [p0, p1]
    return sorted(((v[0], v[1]) for v in acc.values()), key=lambda t: t[0] / (t[0] + t[1]))


def pair_from_laws(L0: FiniteDistribution, L1: FiniteDistribution) -> Pair:
    keys = list(dict.fromkeys(list(L0.support) + list(L1.support)))
    return merge_classes([(L0(k), L1(k)) for k in keys])


def pair_distance(pairs: Pair) -> Fraction:
    return sum((abs(p0 - p1) for p0, p1 in pairs), Fraction(0)) / 2


def _combine(A: Pair, B: Pair, xor: bool, cap: Optional[int]) -> Optional[Pair]:
    if cap is not None and len(A) * len(B) > cap * 64:
        return None
    out = []
    for a0, a1 in A:
        for b0, b1 in B:
            if xor:
                out.append(((a0 * b0 + a1 * b1) / 2, (a0 * b1 + a1 * b0) / 2))
            else:
                out.append((a0 * b0, a1 * b1))
    out = merge_classes(out)
    if cap is not None and len(out) > cap:
        return None
    return out


def xor_pair(pairs: Pair, j: int, cap: Optional[int] = None) -> Optional[Pair]:
    """Pair of laws of (x_1..x_j) with x_i ~ P_{b_i}, b_1 ⊕ ... ⊕ b_j = b uniform otherwise."""
    if j < 1:
        raise PolarizationError("j must be positive")
    out = pairs
    for _ in range(j - 1):
        out = _combine(out, pairs, True, cap)
        if out is None:
            return None
    return out


def product_pair(pairs: Pair, j: int, cap: Optional[int] = None) -> Optional[Pair]:
    """Pair (P_0^{⊗j}, P_1^{⊗j})."""
    if j < 1:
        raise PolarizationError("j must be positive")
    out = pairs
    for _ in range(j - 1):
        out = _combine(out, pairs, False, cap)
        if out is None:
            return None
    return out


def polarization_schedule(alpha, beta, k: int) -> Tuple[int, int, int]:
    """(l, j, k): XOR l times, take j-fold products, XOR k times.

    Near side: Δ ≤ α gives (j α^l)^k ≤ 2^-k once j α^l ≤ 1/2.
    Far side: Δ ≥ β gives (1 - 2 exp(-j β^{2l}/2))^k ≥ 1 - 2^-k once
    j β^{2l}/2 ≥ k ln 2 + ln 2k.
    """
    alpha, beta = float(alpha), float(beta)
    if not beta ** 2 > alpha:
        raise PolarizationError(f"need beta^2 > alpha, got beta={beta}, alpha={alpha}")
    if k < 1:
        raise PolarizationError("k must be positive")
    c = k * math.log(2) + math.log(2 * k)
    if alpha == 0:
        return 1, max(1, math.ceil(2 * c / beta ** 2)), k
    theta = beta ** 2 / alpha
    l = max(1, math.ceil(math.log(4 * c) / math.log(theta)))
    while True:
        j = max(1, math.ceil(2 * c / beta ** (2 * l)))
        if j * alpha ** l <= 0.5:
            return l, j, k
        l += 1


@dataclass
class PolarizationStep:
    kind: str
    j: int
    upper: float
    lower: float
    exact: Optional[Fraction]
    classes: Optional[int]

    def to_json(self) -> dict:
        return {"kind": self.kind, "j": self.j, "upper": self.upper, "lower": self.lower,
                "exact": frac_json(self.exact) if self.exact is not None else None, "classes": self.classes}


@dataclass
class PolarizedPair:
    pairs: Optional[Pair]
    input_distance: Fraction
    alpha: float
    beta: float
    k: int
    schedule: Tuple[int, int, int]
    steps: List[PolarizationStep]
    upper: float
    lower: float

    @property
    def exact(self) -> Optional[Fraction]:
        return pair_distance(self.pairs) if self.pairs is not None else None

    @property
    def regime(self) -> str:
        if self.input_distance <= self.alpha:
            return "near"
        if self.input_distance >= self.beta:
            return "far"
        return "between"

    @property
    def reached(self) -> bool:
        if self.regime == "near":
            return self.upper <= 2.0 ** -self.k
        if self.regime == "far":
            return self.lower >= 1 - 2.0 ** -self.k
        return False

    @property
    def P0(self) -> Optional[List[Fraction]]:
        return [p for p, _ in self.pairs] if self.pairs is not None else None

    @property
    def P1(self) -> Optional[List[Fraction]]:
        return [q for _, q in self.pairs] if self.pairs is not None else None

    def to_json(self) -> dict:
        return {"input_distance": frac_json(self.input_distance), "alpha": self.alpha, "beta": self.beta,
                "k": self.k, "schedule": {"xor_inner": self.schedule[0], "product": self.schedule[1],
                                          "xor_outer": self.schedule[2]},
                "steps": [s.to_json() for s in self.steps], "upper": self.upper, "lower": self.lower,
                "exact": frac_json(self.exact) if self.exact is not None else None,
                "regime": self.regime, "reached": self.reached}


def polarize(C0, C1, alpha, beta, k: int, max_classes: int = 4096) -> PolarizedPair:
    """Polarize a pair given as circuits, laws, or a ratio-class list (C1 ignored then).

    Exact class laws are carried while they stay below `max_classes`; the
    certified interval [lower, upper] on the output distance is always tracked.
    """
    if isinstance(C0, CircuitDescriptor):
        pairs = pair_from_laws(C0.law(), C1.law())
    elif isinstance(C0, FiniteDistribution):
        pairs = pair_from_laws(C0, C1)
    else:
        pairs = merge_classes(C0)
    l, j, kk = polarization_schedule(alpha, beta, k)
    D = pair_distance(pairs)
    x = float(D)
    steps = []
    cur: Optional[Pair] = pairs
    # XOR: Δ -> Δ^l exactly
    lo = hi = x ** l
    cur = xor_pair(cur, l, max_classes) if cur is not None else None
    steps.append(PolarizationStep("xor", l, hi, lo, pair_distance(cur) if cur else None, len(cur) if cur else None))
    # product: max(Δ, 1 - 2exp(-jΔ²/2)) <= Δ' <= min(1, jΔ)
    hi, lo = min(1.0, j * hi), max(lo, 1 - 2 * math.exp(-j * lo * lo / 2))
    cur = product_pair(cur, j, max_classes) if cur is not None else None
    steps.append(PolarizationStep("product", j, hi, lo, pair_distance(cur) if cur else None,
                                  len(cur) if cur else None))
    hi, lo = hi ** kk, lo ** kk
    cur = xor_pair(cur, kk, max_classes) if cur is not None else None
    steps.append(PolarizationStep("xor", kk, hi, lo, pair_distance(cur) if cur else None, len(cur) if cur else None))
    if cur is not None:
        e = float(pair_distance(cur))
        hi, lo = min(hi, e), max(lo, e)
    return PolarizedPair(cur, D, float(alpha), float(beta), k, (l, j, kk), steps, hi, lo)
