"""Zero-sum games, Lipton-Young sparsification and disguising collections."""
from __future__ import annotations

import itertools
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import kernels
from .information import FiniteDistribution, SUniform, as_fraction, derive_seed, frac_json
from .lp import solve_packing_lp
from .problems import from_hex, to_hex
from .reductions import StochasticReduction


class DisguiseError(ValueError):
    pass


class CertificationFailure(RuntimeError):
    pass


def delta_of(ell, m: int = 1) -> float:
    """δ(ℓ, m) = min{ sqrt(ℓ ln2 / 2m), 1 - 2^(-ℓ/m - 2) }."""
    ell = float(ell)
    if ell < 0 or m < 1:
        raise DisguiseError("need ell >= 0 and m >= 1")
    return min(math.sqrt(ell * math.log(2) / (2 * m)), 1 - 2.0 ** (-ell / m - 2))


def one_minus_delta(ell, m: int = 1) -> float:
    """1 - δ(ℓ, m) evaluated without cancellation."""
    ell = float(ell)
    return max(1 - math.sqrt(ell * math.log(2) / (2 * m)), 2.0 ** (-ell / m - 2))


# -- games ---------------------------------------------------------------------

@dataclass
class PayoffMatrix:
    entries: List[List[Fraction]]
    row_labels: Optional[list] = None
    col_labels: Optional[list] = None

    def __post_init__(self):
        if not self.entries or not self.entries[0]:
            raise DisguiseError("empty payoff matrix")
        b = len(self.entries[0])
        if any(len(r) != b for r in self.entries):
            raise DisguiseError("ragged payoff matrix")
        self.entries = [[as_fraction(v) for v in r] for r in self.entries]

    @property
    def shape(self):
        return len(self.entries), len(self.entries[0])

    @property
    def M_max(self):
        return max(max(r) for r in self.entries)

    @property
    def M_min(self):
        return min(min(r) for r in self.entries)

    def col_payoffs(self, p: Sequence[Fraction]) -> List[Fraction]:
        """Expected payoff of each column against row strategy p."""
        a, b = self.shape
        return [sum((p[i] * self.entries[i][j] for i in range(a) if p[i]), Fraction(0)) for j in range(b)]

    def row_payoffs(self, q: Sequence[Fraction]) -> List[Fraction]:
        a, b = self.shape
        return [sum((q[j] * self.entries[i][j] for j in range(b) if q[j]), Fraction(0)) for i in range(a)]


@dataclass
class MixedStrategy:
    player: int
    dist: FiniteDistribution
    witness: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        if self.witness is not None and SUniform(self.witness).distribution() != self.dist:
            raise DisguiseError("witness multiset does not induce the strategy")

    def vector(self, k: int) -> List[Fraction]:
        return [self.dist(i) for i in range(k)]


@dataclass
class GameSolution:
    value: Fraction
    P: MixedStrategy
    Q: MixedStrategy
    primal: Fraction
    dual: Fraction
    pivots: int


def _strategy(player, vec):
    idx = [i for i, v in enumerate(vec) if v]
    return MixedStrategy(player, FiniteDistribution(idx, [vec[i] for i in idx]))


def game_value(M: PayoffMatrix) -> GameSolution:
    """Exact minimax value; Player 1 (rows) minimises, Player 2 (columns) maximises.

    Both players' LPs are solved and the two values compared exactly, and the
    strategies are re-checked against every opponent pure strategy.
    """
    a, b = M.shape
    shift = 1 - M.M_min
    den = 1
    for r in M.entries:
        for v in r:
            den = den * v.denominator // math.gcd(den, v.denominator)
    # integer, strictly positive copy; identical rows are solved once
    S = [tuple(int((v + shift) * den) for v in r) for r in M.entries]
    first = {}
    for i, r in enumerate(S):
        first.setdefault(r, i)
    keep = sorted(first.values())
    res = solve_packing_lp([[S[i][j] for i in keep] for j in range(b)])
    # row player: x = p / v scaled by den; value = 1 / sum(x)
    tot = res.value
    v_primal = Fraction(1) / (tot * den) - shift
    p = [Fraction(0)] * a
    for i, xi in zip(keep, res.x):
        p[i] = xi / tot
    # the dual is the column player's LP: S y >= 1, q = y / sum y
    y = res.y
    if any(v < 0 for v in y) or any(sum(S[i][j] * y[j] for j in range(b)) < 1 for i in keep):
        raise AssertionError("dual solution is infeasible")
    tot2 = sum(y)
    v_dual = Fraction(1) / (tot2 * den) - shift
    q = [v / tot2 for v in y]
    if v_primal != v_dual:
        raise AssertionError(f"LP duality violated: {v_primal} != {v_dual}")
    if max(M.col_payoffs(p)) != v_primal or min(M.row_payoffs(q)) != v_primal:
        raise AssertionError("optimal strategies fail exact verification")
    return GameSolution(v_primal, _strategy(1, p), _strategy(2, q), v_primal, v_dual, res.pivots)


@dataclass
class SparsifyResult:
    strategy: MixedStrategy
    s: int
    guarantee: Fraction
    value: Fraction
    allowed_gap: Fraction
    method: str
    attempts: int

    @property
    def gap(self) -> Fraction:
        return abs(self.guarantee - self.value)


def ly_s(b: int, eps) -> int:
    """Smallest s with s >= ln(b) / (2 eps^2), at least 1."""
    eps = float(eps)
    return max(1, math.ceil(math.log(b) / (2 * eps * eps) - 1e-12))


def _guarantee(M: PayoffMatrix, player: int, multiset: Sequence[int]) -> Fraction:
    s = len(multiset)
    a, b = M.shape
    if player == 1:
        sums = [sum(M.entries[i][j] for i in multiset) for j in range(b)]
        return max(sums) / s
    sums = [sum(M.entries[i][j] for j in multiset) for i in range(a)]
    return min(sums) / s


def ly_sparsify(M: PayoffMatrix, player: int, eps, seed: int = 0, retries: int = 2000,
                exhaustive_limit: int = 10**6, solution: GameSolution = None,
                s: Optional[int] = None) -> SparsifyResult:
    """s-uniform strategy within eps*(M_max - M_min) of the game value, verified exactly."""
    eps = as_fraction(eps)
    if not 0 < eps <= 1:
        raise DisguiseError("eps must lie in (0, 1]")
    if player not in (1, 2):
        raise DisguiseError("player must be 1 or 2")
    sol = solution or game_value(M)
    a, b = M.shape
    own, opp = (a, b) if player == 1 else (b, a)
    s = s or ly_s(opp, eps)
    allowed = eps * (M.M_max - M.M_min)
    target = sol.value + allowed if player == 1 else sol.value - allowed

    def ok(g):
        return g <= target if player == 1 else g >= target

    strat = sol.P if player == 1 else sol.Q
    support = list(strat.dist.support)
    weights = [float(strat.dist(i)) for i in support]
    rng = random.Random(derive_seed(seed, 1, player))
    for attempt in range(1, retries + 1):
        pick = tuple(sorted(rng.choices(support, weights=weights, k=s)))
        g = _guarantee(M, player, pick)
        if ok(g):
            return SparsifyResult(MixedStrategy(player, SUniform(pick).distribution(), pick),
                                  s, g, sol.value, allowed, "sampled", attempt)
    space = math.comb(own + s - 1, s)
    if space > exhaustive_limit:
        raise CertificationFailure(f"no certified {s}-uniform strategy after {retries} draws; "
                                   f"exhaustive space {space} exceeds {exhaustive_limit}")
    for n_tried, pick in enumerate(itertools.combinations_with_replacement(range(own), s), 1):
        g = _guarantee(M, player, pick)
        if ok(g):
            return SparsifyResult(MixedStrategy(player, SUniform(pick).distribution(), pick),
                                  s, g, sol.value, allowed, "exhaustive", retries + n_tried)
    raise CertificationFailure("exhaustive search found no certified strategy")


# -- distributional stability ------------------------------------------------------

def arrangements(m0: int, m1: int):
    """Distinct placements of (m0 K-slots, the pinned slot, m1 T-slots) under uniform π.

    Each placement is a tuple of slot kinds per output position: 'K', 'y', 'T'.
    All placements are equally likely.
    """
    m = m0 + m1 + 1
    out = []
    for ypos in range(m):
        rest = [i for i in range(m) if i != ypos]
        for tpos in itertools.combinations(rest, m1):
            kinds = ["K"] * m
            kinds[ypos] = "y"
            for i in tpos:
                kinds[i] = "T"
            out.append(tuple(kinds))
    return out


def _weights_for(kinds, wK, wT, wy):
    table = {"K": wK, "T": wT, "y": wy}
    return [table[k] for k in kinds]


def _stability_l1(R, kinds_list, wK, wT, wy, replace):
    """Sum over placements of |mix(pinned) - mix(baseline)|_1 (integers)."""
    A, B = [], []
    for kinds in kinds_list:
        A.append(_weights_for(kinds, wK, wT, wy))
        base = tuple(replace if k == "y" else k for k in kinds)
        B.append(_weights_for(base, wK, wT, wy))
    return kernels.stability_l1(R.km, A, B)


def distributional_stability(R: StochasticReduction, D0: FiniteDistribution, D1: Optional[FiniteDistribution],
                             m0: int, m1: int) -> Fraction:
    """E_{y~D0, π} Δ(R(π(D0^m0, y, D1^m1)), R(π(D0^(m0+1), D1^m1)))."""
    if m0 + m1 + 1 != R.m:
        raise DisguiseError("m0 + m1 + 1 must equal the reduction's arity")
    w0, d0 = R.weights(D0)
    if m1:
        if D1 is None:
            raise DisguiseError("D1 required when m1 > 0")
        w1, d1 = R.weights(D1)
    else:
        w1, d1 = [0] * R.N, 1
    kinds = arrangements(m0, m1)
    total = Fraction(0)
    scale = 2 * len(kinds) * R.L * d0 ** (m0 + 1) * d1 ** m1
    for x, wx in enumerate(w0):
        if not wx:
            continue
        wy = [0] * R.N
        wy[x] = d0
        l1 = _stability_l1(R, kinds, w0, w1, wy, "K")
        total += Fraction(wx * l1, d0 * scale)
    return total


# -- disguising collections -----------------------------------------------------------

def multisets(elements: Sequence[int], d: int):
    return list(itertools.combinations_with_replacement(sorted(elements), d))


@dataclass
class DisguiseCollection:
    n: int
    S0: tuple
    S1: tuple
    m: int
    m0: int
    m1: int
    d: int
    eps: Fraction
    ell: float
    pairs: List[Tuple[tuple, tuple]]
    s_used: int = 0
    s_paper: int = 0
    bound: float = 0.0
    bound_m0: float = 0.0
    achieved: Optional[Fraction] = None
    per_column: Dict = field(default_factory=dict)
    game_value: Optional[Fraction] = None
    b_Y: int = 0
    b_N: int = 0
    seed: int = 0
    rows: int = 0

    @property
    def s(self) -> int:
        return len(self.pairs)

    @property
    def degenerate(self) -> bool:
        return bool(self.b_Y or self.b_N)

    def check(self):
        if self.m != self.m0 + self.m1 + 1:
            raise DisguiseError("m != m0 + m1 + 1")
        for K, T in self.pairs:
            if set(K) - set(self.S0) or set(T) - set(self.S1):
                raise DisguiseError("multiset leaves its ground set")
            if len(K) != self.d or len(T) != self.d:
                raise DisguiseError("multiset of the wrong size")

    def to_json(self) -> dict:
        hx = lambda xs: [to_hex(x, self.n) for x in xs]
        return {
            "schema_version": 1, "n": self.n, "S0": hx(self.S0), "S1": hx(self.S1),
            "m": self.m, "m0": self.m0, "m1": self.m1, "d": self.d,
            "eps": frac_json(self.eps), "ell": self.ell,
            "pairs": [{"K": hx(K), "T": hx(T)} for K, T in self.pairs],
            "s_used": self.s_used, "s_paper": self.s_paper,
            "bound": self.bound, "bound_m0": self.bound_m0,
            "achieved": frac_json(self.achieved) if self.achieved is not None else None,
            "per_column": {to_hex(y, self.n): frac_json(v) for y, v in sorted(self.per_column.items())},
            "game_value": frac_json(self.game_value) if self.game_value is not None else None,
            "b_Y": self.b_Y, "b_N": self.b_N, "seed": self.seed, "rows": self.rows,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "DisguiseCollection":
        ux = lambda xs: tuple(from_hex(h) for h in xs)
        fr = lambda v: as_fraction(v) if v is not None else None
        out = cls(int(doc["n"]), ux(doc["S0"]), ux(doc["S1"]), int(doc["m"]), int(doc["m0"]), int(doc["m1"]),
                  int(doc["d"]), as_fraction(doc["eps"]), float(doc["ell"]),
                  [(ux(p["K"]), ux(p["T"])) for p in doc["pairs"]],
                  int(doc["s_used"]), int(doc["s_paper"]), float(doc["bound"]), float(doc["bound_m0"]),
                  fr(doc["achieved"]), {from_hex(k): as_fraction(v) for k, v in doc["per_column"].items()},
                  fr(doc["game_value"]), int(doc["b_Y"]), int(doc["b_N"]), int(doc["seed"]), int(doc["rows"]))
        out.check()
        return out


def _multiset_weights(R, ms):
    w = [0] * R.N
    for x in ms:
        w[R.pos[x]] += 1
    return w


def _payoff_rows(R, row_pairs, columns, S0set, m0, m1):
    """Integer payoff numerators for each (K, T) row and column y."""
    kinds = arrangements(m0, m1)
    out = []
    for K, T in row_pairs:
        wK = _multiset_weights(R, K)
        wT = _multiset_weights(R, T) if T else [0] * R.N
        row = []
        d = len(K)
        for y in columns:
            wy = [0] * R.N
            wy[R.pos[y]] = d
            row.append(_stability_l1(R, kinds, wK, wT, wy, "K" if y in S0set else "T"))
        out.append(row)
    return out


def build_disguising_collection(R: StochasticReduction, S0: Sequence[int], S1: Sequence[int], m0: int, m1: int,
                                d: int, eps, ell, seed: int = 0, jobs: int = 1, max_rows: int = 10**5,
                                s: Optional[int] = None) -> DisguiseCollection:
    """Solve the disguising game exactly and sparsify Player 1 to s pairs (K_a, T_a).

    Row (K, T): size-d multisets of S0 and S1. Column y in S0 ∪ S1. Payoff is the
    expected distance after pinning y at the slot between the K- and T-draws,
    against the baseline where that slot is one more K-draw (y in S0) or T-draw (y in S1).
    """
    S0, S1 = tuple(sorted(S0)), tuple(sorted(S1))
    m = m0 + m1 + 1
    if m != R.m:
        raise DisguiseError("m0 + m1 + 1 must equal the reduction's arity")
    if d < 1:
        raise DisguiseError("d must be positive")
    eps = as_fraction(eps)
    n = R.problem.n
    coll = DisguiseCollection(n, S0, S1, m, m0, m1, d, eps, float(ell), [], seed=seed)
    coll.bound = delta_of(ell, m) + 2 * (m + 1) / (d + 1) + 2 * float(eps)
    coll.bound_m0 = delta_of(ell, m0 + 1) + 2 * (m + 1) / (d + 1) + 2 * float(eps)
    if not S0 or not S1:
        coll.b_N = int(not S0)
        coll.b_Y = int(not S1)
        return coll
    Ks, Ts = multisets(S0, d), multisets(S1, d)
    row_pairs = [(K, T) for K in Ks for T in Ts]
    if len(row_pairs) > max_rows:
        raise DisguiseError(f"{len(row_pairs)} strategy pairs exceed the limit {max_rows}")
    columns = S0 + S1
    S0set = set(S0)
    if jobs > 1 and len(row_pairs) > 64:
        size = math.ceil(len(row_pairs) / (4 * jobs))
        chunks = [row_pairs[i:i + size] for i in range(0, len(row_pairs), size)]
        with ProcessPoolExecutor(jobs) as pool:
            parts = pool.map(_payoff_rows, [R] * len(chunks), chunks, [columns] * len(chunks),
                             [S0set] * len(chunks), [m0] * len(chunks), [m1] * len(chunks))
            ints = [row for part in parts for row in part]
    else:
        ints = _payoff_rows(R, row_pairs, columns, S0set, m0, m1)
    scale = 2 * len(arrangements(m0, m1)) * R.L * d ** m
    # solve on the integer matrix; values rescale linearly
    Mi = PayoffMatrix([[Fraction(v) for v in r] for r in ints], row_pairs, list(columns))
    sol = game_value(Mi)
    Mi_range = Mi.M_max - Mi.M_min
    s_used = s or ly_s(len(columns), eps)
    coll.s_used = s_used
    coll.s_paper = ly_s(2 ** n, eps) if n * math.log(2) > 0 else 1
    coll.game_value = sol.value / scale
    coll.rows = len(row_pairs)
    # eps*(range) in integer units; payoffs live in [0, scale], so eps*scale is the lemma's slack
    sp = ly_sparsify(Mi, 1, eps, seed=seed, solution=sol, s=s_used) if Mi_range else None
    if sp is None:
        pick = (sol.P.dist.support[0],) * s_used
    else:
        pick = sp.strategy.witness
    coll.pairs = [row_pairs[i] for i in pick]
    cols = [sum(ints[i][j] for i in pick) for j in range(len(columns))]
    coll.per_column = {y: Fraction(c, len(pick) * scale) for y, c in zip(columns, cols)}
    coll.achieved = max(coll.per_column.values())
    coll.check()
    return coll


def collection_value(R: StochasticReduction, coll: DisguiseCollection) -> Dict[int, Fraction]:
    """Recompute max_y E_a[payoff] from the stored pairs (independent of the game solve)."""
    rows = _payoff_rows(R, coll.pairs, coll.S0 + coll.S1, set(coll.S0), coll.m0, coll.m1)
    scale = 2 * len(arrangements(coll.m0, coll.m1)) * R.L * coll.d ** coll.m
    cols = coll.S0 + coll.S1
    return {y: Fraction(sum(r[j] for r in rows), len(rows) * scale) for j, y in enumerate(cols)}


# -- sparsification check -------------------------------------------------------------

@dataclass
class SparsifiedTrial:
    lhs: Fraction
    middle: Fraction
    slack: Fraction
    side: int


def _law_from_samples(samples):
    return SUniform(list(samples)).distribution()


def sparsified_trial(R: StochasticReduction, D0: FiniteDistribution, D1: FiniteDistribution, m0: int, m1: int,
                     d: int, side: int, seed: int) -> SparsifiedTrial:
    """One draw of d+1 samples per side; averages over the held-out index exactly.

    lhs    = E_{i*} E_π Δ(R(π(D̂0^m0, y*, D̂1^m1)), R(π(baseline)))
    middle = E_{i*} E_π Δ(R(π(D̃_side-full ...)))  (the stability term of the proof)
    Returns both so lhs <= middle + (2 m_side + 1)/(d+1) can be asserted.
    """
    from .information import sample
    xs0 = [sample(D0, derive_seed(seed, 0, i)) for i in range(d + 1)]
    xs1 = [sample(D1, derive_seed(seed, 1, i)) for i in range(d + 1)]
    kinds = arrangements(m0, m1)
    lhs = Fraction(0)
    mid = Fraction(0)
    for i in range(d + 1):
        hat0 = _law_from_samples(xs0[:i] + xs0[i + 1:])
        hat1 = _law_from_samples(xs1[:i] + xs1[i + 1:])
        full0 = _law_from_samples(xs0)
        full1 = _law_from_samples(xs1)
        y = (xs0 if side == 0 else xs1)[i]
        lhs += _pinned_distance(R, kinds, hat0, hat1, y, side)
        if side == 0:
            mid += _pinned_distance(R, kinds, full0, hat1, y, side)
        else:
            mid += _pinned_distance(R, kinds, hat0, full1, y, side)
    lhs /= d + 1
    mid /= d + 1
    mside = m0 if side == 0 else m1
    return SparsifiedTrial(lhs, mid, Fraction(2 * mside + 1, d + 1), side)


def _pinned_distance(R, kinds, L0, L1, y, side):
    w0, d0 = R.weights(L0)
    w1, d1 = R.weights(L1)
    # bring both slot families to a shared denominator
    den = d0 * d1
    wK = [v * d1 for v in w0]
    wT = [v * d0 for v in w1]
    wy = [0] * R.N
    wy[R.pos[y]] = den
    l1 = _stability_l1(R, kinds, wK, wT, wy, "K" if side == 0 else "T")
    return Fraction(l1, 2 * len(kinds) * R.L * den ** R.m)
