"""Stochastic reductions, permutation-invariant functions and their measurements."""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from . import kernels
from .information import (FiniteDistribution, as_fraction, decode_outcome, derive_seed, encode_outcome,
                          frac_json, lcm_of, statistical_distance)
from .lp import linprog_exact
from .problems import PromiseProblem, builtin_problem, chi, from_hex, to_hex

MAX_ROWS = 1 << 20


class ReductionError(ValueError):
    pass


# -- permutation-invariant functions ---------------------------------------

class PermInvariantF:
    """Boolean f on m bits given by its profile f_0..f_m over Hamming weights."""

    def __init__(self, profile: Sequence[int], name: str = None):
        profile = tuple(int(b) for b in profile)
        if len(profile) < 2 or set(profile) - {0, 1}:
            raise ReductionError("profile must be a bit vector of length m+1 >= 2")
        if len(set(profile)) == 1:
            raise ReductionError("f must be non-constant")
        self.profile = profile
        self.m = len(profile) - 1
        self.name = name or "f" + "".join(map(str, profile))

    @classmethod
    def named(cls, name: str, m: int) -> "PermInvariantF":
        name = name.lower()
        if name == "or":
            prof = [0] + [1] * m
        elif name == "and":
            prof = [0] * m + [1]
        elif name in ("parity", "mod2", "xor"):
            prof = [w % 2 for w in range(m + 1)]
        elif name in ("maj", "majority"):
            prof = [int(2 * w > m) for w in range(m + 1)]
        elif name.startswith("threshold"):
            k = int(name[len("threshold"):].lstrip("-_"))
            prof = [int(w >= k) for w in range(m + 1)]
        else:
            raise ReductionError(f"unknown function {name!r}")
        return cls(prof, f"{name.upper()}{m}")

    def __call__(self, bits: Sequence[int]) -> int:
        return evaluate_f(self, bits)

    def to_json(self):
        return {"profile": list(self.profile), "name": self.name}

    @classmethod
    def from_json(cls, doc):
        if "profile" in doc:
            return cls(doc["profile"], doc.get("name"))
        return cls.named(doc["name"], int(doc["m"]))


def evaluate_f(f: PermInvariantF, bits: Sequence[int]) -> int:
    if len(bits) != f.m:
        raise ReductionError(f"arity mismatch: {len(bits)} bits for m={f.m}")
    return f.profile[sum(bits)]


def p_of_f(f: PermInvariantF) -> int:
    """Smallest p with f_{p-1} = 0 and f_p = 1."""
    for p in range(1, f.m + 1):
        if f.profile[p - 1] == 0 and f.profile[p] == 1:
            return p
    raise ReductionError(f"{f.name} has no 0->1 step in its profile; use its negation")


# -- stochastic reductions ----------------------------------------------------

class StochasticReduction:
    """Map from m-tuples of promise instances to exact output laws.

    Rows are stored as integer numerators over a common denominator L,
    indexed by the mixed-radix rank of the tuple (position 0 most significant).
    """

    def __init__(self, problem: PromiseProblem, m: int, omega: Sequence, kernel: Callable,
                 name: str = "custom", runtime: str = "poly(n)"):
        self.problem = problem
        self.m = int(m)
        self.domain = problem.instances
        self.N = len(self.domain)
        if self.N == 0:
            raise ReductionError("problem has no promise instances")
        self.pos = {x: i for i, x in enumerate(self.domain)}
        self.omega = tuple(omega)
        self.opos = {w: k for k, w in enumerate(self.omega)}
        self.name = name
        self.runtime = runtime
        T = self.N ** self.m
        if T > MAX_ROWS:
            raise ReductionError(f"tuple space {T} exceeds {MAX_ROWS} explicit rows")
        fr = []
        for t in itertools.product(self.domain, repeat=self.m):
            row = kernel(t)
            vec = [Fraction(0)] * len(self.omega)
            for w, p in row.items():
                if w not in self.opos:
                    raise ReductionError(f"outcome {w!r} outside the declared alphabet")
                vec[self.opos[w]] += as_fraction(p)
            if any(p < 0 for p in vec) or sum(vec) != 1:
                raise ReductionError(f"row for {t} is not a distribution")
            fr.append(vec)
        self.L = lcm_of(p.denominator for vec in fr for p in vec)
        self.km = kernels.KernelMatrix([[p.numerator * (self.L // p.denominator) for p in vec] for vec in fr],
                                       self.N, self.m)
        self._float = None

    @property
    def T(self) -> int:
        return self.N ** self.m

    def rank(self, t: Sequence[int]) -> int:
        r = 0
        for x in t:
            r = r * self.N + self.pos[x]
        return r

    def tuples(self):
        return itertools.product(self.domain, repeat=self.m)

    def row(self, t: Sequence[int]) -> FiniteDistribution:
        ints = self.km.rows[self.rank(t)]
        return FiniteDistribution(self.omega, [Fraction(v, self.L) for v in ints], check=False)

    def float_matrix(self) -> np.ndarray:
        if self._float is None:
            self._float = np.array(self.km.rows, dtype=float) / float(self.L)
        return self._float

    def weights(self, law: FiniteDistribution) -> Tuple[List[int], int]:
        """Integer weights over the domain plus their denominator."""
        den = lcm_of(p.denominator for _, p in law.items() if p)
        w = [0] * self.N
        for x, p in law.items():
            if p:
                if x not in self.pos:
                    raise ReductionError(f"instance {x} outside the promise")
                w[self.pos[x]] = p.numerator * (den // p.denominator)
        return w, den

    def law(self, slots: Sequence[FiniteDistribution], backend=None) -> FiniteDistribution:
        """Exact output law of R(X_1..X_m) with independent slot laws."""
        if len(slots) != self.m:
            raise ReductionError("wrong number of slot laws")
        ws, den = [], self.L
        for s in slots:
            w, d = self.weights(s)
            ws.append(w)
            den *= d
        counts = kernels.mixture_counts(self.km, ws, backend)
        return FiniteDistribution(self.omega, [Fraction(c, den) for c in counts], check=False)

    def to_json(self) -> dict:
        rows = []
        for t in self.tuples():
            rows.append({"tuple": [to_hex(x, self.problem.n) for x in t],
                         "masses": [frac_json(p) for p in self.row(t).masses]})
        return {"m": self.m, "n": self.problem.n, "name": self.name,
                "omega": [encode_outcome(w) for w in self.omega], "rows": rows}


def dense_reduction(problem: PromiseProblem, doc: Mapping) -> StochasticReduction:
    if int(doc["n"]) != problem.n:
        raise ReductionError("reduction and problem disagree on n")
    omega = [decode_outcome(w) for w in doc["omega"]]
    table = {}
    for r in doc["rows"]:
        t = tuple(from_hex(h) for h in r["tuple"])
        table[t] = {w: as_fraction(p) for w, p in zip(omega, r["masses"])}

    def kernel(t):
        if t not in table:
            raise ReductionError(f"dense kernel lacks row {t}")
        return table[t]
    return StochasticReduction(problem, int(doc["m"]), omega, kernel, doc.get("name", "dense"))


def chi_pattern(problem: PromiseProblem, t: Sequence[int]) -> Tuple[int, ...]:
    return tuple(chi(problem, x) for x in t)


def chi_f_reduction(problem: PromiseProblem, f: PermInvariantF, noise=0) -> StochasticReduction:
    """Outputs f(chi(x_1..x_m)), flipped with probability `noise`."""
    noise = as_fraction(noise)

    def kernel(t):
        b = f(chi_pattern(problem, t))
        return {b: 1 - noise, 1 - b: noise}
    label = f"{f.name}-of-chi" + (f"-noise{noise}" if noise else "")
    return StochasticReduction(problem, f.m, (0, 1), kernel, label)


def identity_reduction(problem: PromiseProblem, m: int) -> StochasticReduction:
    omega = tuple(itertools.product(problem.instances, repeat=m))
    return StochasticReduction(problem, m, omega, lambda t: {tuple(t): 1}, "identity")


def constant_reduction(problem: PromiseProblem, m: int, label="c") -> StochasticReduction:
    return StochasticReduction(problem, m, (label,), lambda t: {label: 1}, "constant")


def random_lossy_reduction(problem: PromiseProblem, f: PermInvariantF, leak, seed: int,
                           omega_size: int = 3, noise=0) -> StochasticReduction:
    """(1-leak) * f-of-chi row + leak * a seeded random rational row per tuple.

    Outcomes 0/1 carry the f value; extra outcomes 2.. only appear through leakage.
    """
    leak = as_fraction(leak)
    noise = as_fraction(noise)
    rng = random.Random(seed)
    omega = tuple(range(max(2, omega_size)))
    cache = {}

    def kernel(t):
        if t not in cache:
            raw = [rng.randint(0, 4) for _ in omega]
            if not any(raw):
                raw[rng.randrange(len(raw))] = 1
            tot = sum(raw)
            b = f(chi_pattern(problem, t))
            row = {w: leak * Fraction(v, tot) for w, v in zip(omega, raw)}
            row[b] += (1 - leak) * (1 - noise)
            row[1 - b] += (1 - leak) * noise
            cache[t] = row
        return cache[t]
    return StochasticReduction(problem, f.m, omega, kernel, f"random-lossy-{seed}")


REDUCTION_BUILDERS = {
    "chi-f": lambda problem, f, p: chi_f_reduction(problem, f, p.get("noise", 0)),
    "identity": lambda problem, f, p: identity_reduction(problem, f.m),
    "constant": lambda problem, f, p: constant_reduction(problem, f.m),
    "random-lossy": lambda problem, f, p: random_lossy_reduction(
        problem, f, p.get("leak", Fraction(1, 8)), int(p.get("seed", 0)),
        int(p.get("omega_size", 3)), p.get("noise", 0)),
}


def reduction_from_json(doc: Mapping, problem: PromiseProblem, f: PermInvariantF) -> StochasticReduction:
    if "builder" in doc:
        name = doc["builder"]
        if name not in REDUCTION_BUILDERS:
            raise ReductionError(f"unknown reduction builder {name!r}")
        params = {k: (as_fraction(v) if k in ("noise", "leak") else v)
                  for k, v in doc.get("params", {}).items()}
        return REDUCTION_BUILDERS[name](problem, f, params)
    return dense_reduction(problem, doc)


# -- distinguisher error ---------------------------------------------------------

@dataclass
class DistinguisherReport:
    mu: Fraction
    vacuous: bool
    min_distance: Optional[Fraction] = None
    worst_pair: Optional[tuple] = None
    pairs: int = 0


def _f_groups(R: StochasticReduction, f: PermInvariantF):
    groups = {0: [], 1: []}
    for t in R.tuples():
        groups[f(chi_pattern(R.problem, t))].append(t)
    return groups


def distinguisher_error(R: StochasticReduction, problem: PromiseProblem, f: PermInvariantF) -> DistinguisherReport:
    """μ̂ = (1 - min Δ over tuple pairs with differing f-values) / 2."""
    if R.m != f.m:
        raise ReductionError("reduction arity differs from f's arity")
    groups = _f_groups(R, f)
    if not groups[0] or not groups[1]:
        return DistinguisherReport(Fraction(1, 2), True)
    A = np.array([R.km.rows[R.rank(t)] for t in groups[0]], dtype=object)
    best = None
    for j, t1 in enumerate(groups[1]):
        b = np.array(R.km.rows[R.rank(t1)], dtype=object)
        l1 = np.abs(A - b).sum(axis=1)
        i = int(np.argmin(l1))
        if best is None or l1[i] < best[0]:
            best = (int(l1[i]), groups[0][i], t1)
    dmin = Fraction(best[0], 2 * R.L)
    return DistinguisherReport((1 - dmin) / 2, False, dmin, (best[1], best[2]),
                               len(groups[0]) * len(groups[1]))


# -- non-adaptive Turing reductions ---------------------------------------------

class TuringReduction:
    """x̄ -> joint law over (query tuple, circuit id); circuits map answer tuples to bits."""

    def __init__(self, problem: PromiseProblem, m: int, target: PromiseProblem, k: int,
                 kernel: Callable, circuits: Mapping, name: str = "turing"):
        self.problem = problem
        self.m = m
        self.target = target
        self.k = k
        self.circuits = dict(circuits)
        self.name = name
        self.rows = {}
        for t in itertools.product(problem.instances, repeat=m):
            row = {(tuple(q), c): as_fraction(p) for (q, c), p in kernel(t).items()}
            if sum(row.values()) != 1 or any(p < 0 for p in row.values()):
                raise ReductionError(f"row for {t} is not a distribution")
            for (q, c) in row:
                if len(q) != k or c not in self.circuits:
                    raise ReductionError("malformed Turing output")
            self.rows[t] = row

    def query_law(self, t) -> FiniteDistribution:
        acc = {}
        for (q, c), p in self.rows[t].items():
            acc[q] = acc.get(q, 0) + p
        return FiniteDistribution.from_dict(acc)

    def answer_bit_law(self, t) -> FiniteDistribution:
        """Law of C(chi_Sigma(y_1..y_k)) under R_T(t)."""
        acc = {0: Fraction(0), 1: Fraction(0)}
        for (q, c), p in self.rows[t].items():
            ans = tuple(chi(self.target, y) for y in q)
            acc[int(self.circuits[c][ans])] += p
        return FiniteDistribution((0, 1), (acc[0], acc[1]), check=False)

    def as_bit_reduction(self) -> StochasticReduction:
        return StochasticReduction(self.problem, self.m, (0, 1), lambda t: self.answer_bit_law(t).as_dict(),
                                   self.name + "-bits")


def simulated_distinguisher_error(RT: TuringReduction, f: PermInvariantF) -> DistinguisherReport:
    """μ via the explicit test: answer the queries, run C, compare with f of the hinted pattern.

    For a pair (x̄, x̄') the test outputs 1 iff C(χ(y)) = f(χ(x̄)); its advantage is
    Pr[1 | R(x̄)] - Pr[1 | R(x̄')].
    """
    groups = {0: [], 1: []}
    for t in RT.rows:
        groups[f(chi_pattern(RT.problem, t))].append(t)
    if not groups[0] or not groups[1]:
        return DistinguisherReport(Fraction(1, 2), True)
    ones = {t: RT.answer_bit_law(t)(1) for t in RT.rows}
    best = None
    for t0 in groups[0]:
        for t1 in groups[1]:
            # f(t1)=1: accept iff bit = 1; from t0's side the test says bit = 0
            adv = ones[t1] - ones[t0]
            if best is None or adv < best[0]:
                best = (adv, t0, t1)
    return DistinguisherReport((1 - best[0]) / 2, False, best[0], (best[1], best[2]),
                               len(groups[0]) * len(groups[1]))


# -- s-uniform enumeration -------------------------------------------------------

def s_uniform_laws(support: Sequence, s: int) -> List[Tuple[Fraction, ...]]:
    """Distinct laws over `support` that are uniform over some multiset of size <= s."""
    k = len(support)
    seen = set()
    out = []
    for size in range(1, s + 1):
        for combo in itertools.combinations_with_replacement(range(k), size):
            counts = [0] * k
            for i in combo:
                counts[i] += 1
            g = 0
            for c in counts:
                g = math.gcd(g, c)
            key = tuple(c // g for c in counts)
            if key not in seen:
                seen.add(key)
                tot = sum(key)
                out.append(tuple(Fraction(c, tot) for c in key))
    return out


def count_s_uniform_laws(k: int, s: int) -> int:
    """Upper bound on the number of laws (multisets before de-duplication)."""
    return sum(math.comb(size + k - 1, k - 1) for size in range(1, s + 1))


def lossiness_s(m: int, n: int, gamma) -> int:
    return math.ceil(Fraction(2 ** 9 * m * n) / as_fraction(gamma) ** 3)


def _entropy_rows(M: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        lg = np.where(M > 0, np.log2(np.where(M > 0, M, 1)), 0.0)
    return -(M * lg).sum(axis=-1)


def batch_information(Wf: np.ndarray, P: np.ndarray) -> np.ndarray:
    """I(X;R(X)) for each row of P (input laws over tuples) through channel Wf."""
    h = _entropy_rows(Wf)
    Q = P @ Wf
    return np.maximum(_entropy_rows(Q) - P @ h, 0.0)


@dataclass
class LossinessReport:
    lam: float
    ell: float
    s: int
    s_paper: int
    exhaustive: bool
    evaluated: int
    argmax: Optional[list] = None


def _side_vectors(R: StochasticReduction, s: int):
    """Per-coordinate candidate laws as float vectors over R.domain, with labels."""
    vecs, labels = [], []
    for side_name, side in (("no", R.problem.no), ("yes", R.problem.yes)):
        if not side:
            continue
        for law in s_uniform_laws(side, s):
            v = np.zeros(R.N)
            lab = {}
            for x, p in zip(side, law):
                v[R.pos[x]] = float(p)
                if p:
                    lab[x] = p
            vecs.append(v)
            labels.append((side_name, lab))
    return np.array(vecs), labels


def _cartesian_rows(vecs: np.ndarray, k: int) -> np.ndarray:
    """Laws of k independent slots for every k-combination of candidate rows."""
    P = np.ones((1, 1))
    for _ in range(k):
        P = (P[:, None, :, None] * vecs[None, :, None, :]).reshape(P.shape[0] * len(vecs), -1)
    return P


def mild_lossiness_estimate(R: StochasticReduction, problem: PromiseProblem, gamma, budget: int = 2_000_000,
                            seed: int = 0, exhaustive: Optional[bool] = None, chunk: int = 4096,
                            s_cap: Optional[int] = None) -> LossinessReport:
    """Supremum of I(X;R(X))/m over independent split s-uniform coordinates.

    Each X_i is uniform over a multiset inside YES or inside NO. Exhaustive when
    the number of combinations fits `budget` (or when forced), else seeded sampling,
    which only yields a lower bound. The multiset size is capped at `s_cap`
    (default: the instance count) to keep the candidate set finite.
    """
    if as_fraction(gamma) <= 0:
        raise ReductionError("gamma must be positive")
    s_paper = lossiness_s(R.m, problem.n, gamma)
    s = min(s_paper, R.N if s_cap is None else s_cap)
    vecs, labels = _side_vectors(R, s)
    C = len(vecs)
    total = C ** R.m
    if exhaustive is None:
        exhaustive = total <= budget
    Wf = R.float_matrix()
    best, arg = -1.0, None
    evaluated = 0
    if exhaustive:
        inner = C ** (R.m - 1)
        tail = _cartesian_rows(vecs, R.m - 1)
        for i in range(C):
            # slot 0 fixed to candidate i, remaining slots enumerated
            P = (vecs[i][None, :, None] * tail[:, None, :]).reshape(inner, -1)
            for a in range(0, inner, chunk):
                I = batch_information(Wf, P[a:a + chunk])
                j = int(np.argmax(I))
                evaluated += len(I)
                if I[j] > best:
                    best = float(I[j])
                    rest = np.unravel_index(a + j, (C,) * (R.m - 1)) if R.m > 1 else ()
                    arg = [i] + [int(r) for r in rest]
    else:
        rng = np.random.default_rng(derive_seed(seed, 17))
        for a in range(0, budget, chunk):
            n_rows = min(chunk, budget - a)
            picks = rng.integers(0, C, size=(n_rows, R.m))
            I = batch_information(Wf, _rowwise_product([vecs[picks[:, i]] for i in range(R.m)]))
            j = int(np.argmax(I))
            evaluated += len(I)
            if I[j] > best:
                best = float(I[j])
                arg = [int(v) for v in picks[j]]
    ell = max(best, 0.0)
    witness = [labels[i] for i in arg] if arg is not None else None
    if witness:
        witness = [{"side": sd, "law": {to_hex(x, problem.n): frac_json(p) for x, p in lab.items()}}
                   for sd, lab in witness]
    return LossinessReport(ell / R.m, ell, s, s_paper, bool(exhaustive), evaluated, witness)


def _rowwise_product(per_slot: Sequence[np.ndarray]) -> np.ndarray:
    """Row-by-row outer products: out[r] = per_slot[0][r] ⊗ per_slot[1][r] ⊗ ..."""
    P = per_slot[0]
    for v in per_slot[1:]:
        P = (P[:, :, None] * v[:, None, :]).reshape(P.shape[0], -1)
    return P


# -- WC-DIST distance ---------------------------------------------------------------

@dataclass
class WCDistResult:
    d: Fraction
    centers: Dict
    per_group: Dict


def chebyshev_center(laws: Sequence[FiniteDistribution], alphabet: Sequence) -> Tuple[Fraction, FiniteDistribution]:
    """min over D of max_i Δ(laws[i], D), as an exact LP."""
    K = len(alphabet)
    n_law = len(laws)
    # variables: D (K), e (n_law*K), t
    nv = K + n_law * K + 1
    tcol = nv - 1
    A, b = [], []
    for i, P in enumerate(laws):
        row = [0] * nv
        for k in range(K):
            row[K + i * K + k] = 1
        row[tcol] = -2
        A.append(row)
        b.append(0)
        for k, w in enumerate(alphabet):
            p = P(w)
            r1 = [0] * nv
            r1[K + i * K + k] = -1
            r1[k] = -1
            A.append(r1)
            b.append(-p)
            r2 = [0] * nv
            r2[K + i * K + k] = -1
            r2[k] = 1
            A.append(r2)
            b.append(p)
    Aeq = [[1] * K + [0] * (nv - K)]
    c = [0] * (nv - 1) + [1]
    res = linprog_exact(c, A, b, Aeq, [1])
    D = FiniteDistribution(alphabet, res.x[:K])
    d = max(statistical_distance(P, D) for P in laws)
    return d, D


def wc_dist_distance(R: StochasticReduction, problem: PromiseProblem, center=None, split: bool = False,
                     max_rows: int = 4096) -> WCDistResult:
    """Worst-case distance of R's rows to a (per-side, if split) reference law.

    In split mode rows are grouped by their χ-pattern; with m = 1 that is
    YES versus NO. `center` may be a law or a dict keyed like the groups.
    """
    if R.T > max_rows:
        raise ReductionError(f"{R.T} rows exceed the enumeration limit {max_rows}")
    groups: Dict = {}
    for t in R.tuples():
        pat = chi_pattern(problem, t) if split else "all"
        if split and R.m == 1:
            pat = pat[0]
        groups.setdefault(pat, []).append(R.row(t))
    centers, per = {}, {}
    for g, laws in groups.items():
        if center is None:
            dg, D = chebyshev_center(laws, R.omega)
        else:
            D = center[g] if isinstance(center, Mapping) else center
            dg = max(statistical_distance(P, D) for P in laws)
        centers[g] = D
        per[g] = dg
    return WCDistResult(max(per.values()), centers, per)


# -- randomized encodings ------------------------------------------------------------

@dataclass
class RandomizedEncoding:
    encoder: StochasticReduction
    decoder: Callable
    sim: Tuple[FiniteDistribution, FiniteDistribution]

    def __post_init__(self):
        if self.encoder.m != 1:
            raise ReductionError("encoder must take a single input")
        for b in (0, 1):
            if set(self.sim[b].support) - set(self.encoder.omega):
                raise ReductionError("simulator leaves the output alphabet")


def encoding_check(RE: RandomizedEncoding, F: Mapping[int, int]) -> Tuple[Fraction, Fraction]:
    """(μ, d): worst decoding error and worst simulator distance."""
    mu = Fraction(0)
    d = Fraction(0)
    E = RE.encoder
    for x in E.domain:
        if x not in F:
            raise ReductionError(f"F undefined at {x}")
        law = E.row((x,))
        err = sum((p for w, p in law.items() if p and int(RE.decoder(w)) != F[x]), Fraction(0))
        mu = max(mu, err)
        d = max(d, statistical_distance(RE.sim[F[x]], law))
    return mu, d


def xor_problem() -> PromiseProblem:
    """Instance space {0,1}^2 labelled by F(x) = x1 xor x2."""
    return builtin_problem("parity", 2)


def xor_encoding(noise=0) -> Tuple[RandomizedEncoding, Dict[int, int]]:
    """E(x; r) = (x1^r, x2^r) with optional flip noise on the first output bit."""
    noise = as_fraction(noise)
    problem = xor_problem()
    omega = ((0, 0), (0, 1), (1, 0), (1, 1))

    def kernel(t):
        x = t[0]
        x1, x2 = (x >> 1) & 1, x & 1
        row = {}
        for r in (0, 1):
            for flip, p in ((0, 1 - noise), (1, noise)):
                if p:
                    w = (x1 ^ r ^ flip, x2 ^ r)
                    row[w] = row.get(w, 0) + Fraction(1, 2) * p
        return row
    E = StochasticReduction(problem, 1, omega, kernel, "xor-encoding")
    sim = tuple(FiniteDistribution(omega, [Fraction(1, 2) if (a ^ c) == b else 0 for a, c in omega])
                for b in (0, 1))
    F = {x: ((x >> 1) ^ x) & 1 for x in problem.instances}
    return RandomizedEncoding(E, lambda w: w[0] ^ w[1], sim), F


# -- Turing hint information ------------------------------------------------------------

@dataclass
class TuringHintReport:
    d: Fraction
    h: float
    exhaustive: bool
    evaluated: int


def turing_hint_information(RT: TuringReduction, problem: PromiseProblem, gamma, budget: int = 100_000,
                            seed: int = 0) -> TuringHintReport:
    """(d̂, ĥ): query-law distance to the pooled law, and sup I((X,Y);C)."""
    if RT.m != 1:
        raise ReductionError("hint information is defined for single-input reductions")
    xs = problem.instances
    laws = {x: RT.query_law((x,)) for x in xs}
    pooled = {}
    for x in xs:
        for q, p in laws[x].items():
            pooled[q] = pooled.get(q, 0) + p / len(xs)
    pooled = FiniteDistribution.from_dict(pooled)
    d = max(statistical_distance(laws[x], pooled) for x in xs)
    s = min(lossiness_s(1, problem.n, gamma), len(xs))
    cand = s_uniform_laws(xs, s)
    exhaustive = len(cand) <= budget
    if not exhaustive:
        rng = random.Random(derive_seed(seed, 23))
        cand = [cand[rng.randrange(len(cand))] for _ in range(budget)]
    # joint (x, y) -> C
    keys = sorted({(x, q) for x in xs for (q, c) in RT.rows[(x,)]})
    cids = sorted({c for x in xs for (q, c) in RT.rows[(x,)]}, key=repr)
    W = np.zeros((len(keys), len(cids)))
    px_of_key = np.zeros((len(keys), len(xs)))
    cpos = {c: i for i, c in enumerate(cids)}
    xpos = {x: i for i, x in enumerate(xs)}
    for i, (x, q) in enumerate(keys):
        for (qq, c), p in RT.rows[(x,)].items():
            if qq == q:
                W[i, cpos[c]] += float(p)
        px_of_key[i, xpos[x]] = 1.0
    # conditional of C given (x, y): normalise by Pr[y | x]
    qmass = W.sum(axis=1, keepdims=True)
    Wc = np.divide(W, qmass, out=np.zeros_like(W), where=qmass > 0)
    best = 0.0
    for law in cand:
        px = np.array([float(p) for p in law])
        pk = (px_of_key @ px) * qmass[:, 0]
        best = max(best, float(batch_information(Wc, pk[None, :])[0]))
    return TuringHintReport(d, best, exhaustive, len(cand))
