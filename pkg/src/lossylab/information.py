"""Exact finite distributions and information quantities.

Masses are ``fractions.Fraction``. Logarithmic quantities are floats in
bits with an absolute tolerance of about 1e-9.
"""
from __future__ import annotations

import math
import random
from collections import Counter
from fractions import Fraction
from typing import Dict, Hashable, Iterable, Mapping, Sequence

import numpy as np

LOG_TOL = 1e-9


class DistributionError(ValueError):
    pass


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, dict):
        return Fraction(int(x["num"]), int(x["den"]))
    if isinstance(x, float):
        return Fraction(x).limit_denominator(10**12)
    return Fraction(x)


def frac_json(x: Fraction) -> dict:
    x = as_fraction(x)
    return {"num": x.numerator, "den": x.denominator}


def derive_seed(seed: int, *keys: int) -> int:
    """Child seed for (seed, keys); a pure function, so workers can split work."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in keys))
    a, b = ss.generate_state(2, dtype=np.uint32)
    return (int(a) << 32) | int(b)


class FiniteDistribution:
    """Exact probability vector over an ordered alphabet."""

    __slots__ = ("alphabet", "masses", "_index")

    def __init__(self, alphabet: Sequence[Hashable], masses: Sequence, check: bool = True):
        alphabet = tuple(alphabet)
        masses = tuple(as_fraction(p) for p in masses)
        if check:
            if len(alphabet) != len(masses):
                raise DistributionError("alphabet and masses differ in length")
            if len(set(alphabet)) != len(alphabet):
                raise DistributionError("alphabet entries must be unique")
            if any(p < 0 for p in masses):
                raise DistributionError("negative mass")
            if sum(masses) != 1:
                raise DistributionError(f"masses sum to {sum(masses)}, not 1")
        self.alphabet = alphabet
        self.masses = masses
        self._index = {a: i for i, a in enumerate(alphabet)}

    @classmethod
    def from_dict(cls, d: Mapping, order: Iterable = None) -> "FiniteDistribution":
        keys = list(order) if order is not None else sorted(d, key=_sort_key)
        return cls(keys, [d.get(k, 0) for k in keys])

    @classmethod
    def point(cls, a) -> "FiniteDistribution":
        return cls((a,), (Fraction(1),))

    @classmethod
    def uniform(cls, items: Iterable) -> "FiniteDistribution":
        return SUniform(list(items)).distribution()

    def __call__(self, a) -> Fraction:
        i = self._index.get(a)
        return self.masses[i] if i is not None else Fraction(0)

    prob = __call__

    def items(self):
        return zip(self.alphabet, self.masses)

    @property
    def support(self) -> tuple:
        return tuple(a for a, p in self.items() if p)

    def as_dict(self) -> Dict:
        return {a: p for a, p in self.items() if p}

    def trimmed(self) -> "FiniteDistribution":
        return FiniteDistribution(self.support, [self(a) for a in self.support], check=False)

    def __eq__(self, other):
        if not isinstance(other, FiniteDistribution):
            return NotImplemented
        return self.as_dict() == other.as_dict()

    def __hash__(self):
        return hash(frozenset(self.as_dict().items()))

    def __repr__(self):
        body = ", ".join(f"{a!r}: {p}" for a, p in self.items() if p)
        return f"FiniteDistribution({{{body}}})"

    def to_json(self) -> list:
        return [{"outcome": encode_outcome(a), "numerator": p.numerator,
                 "denominator": p.denominator} for a, p in self.items()]

    @classmethod
    def from_json(cls, doc: list) -> "FiniteDistribution":
        return cls([decode_outcome(e["outcome"]) for e in doc],
                   [Fraction(int(e["numerator"]), int(e["denominator"])) for e in doc])


def _sort_key(a):
    return (type(a).__name__, a) if not isinstance(a, tuple) else ("tuple", a)


def encode_outcome(a):
    if isinstance(a, tuple):
        return [encode_outcome(b) for b in a]
    return a


def decode_outcome(a):
    if isinstance(a, list):
        return tuple(decode_outcome(b) for b in a)
    return a


class SUniform:
    """Uniform law over a multiset (mass k/s for multiplicity k)."""

    def __init__(self, multiset: Sequence):
        if not multiset:
            raise DistributionError("empty multiset")
        self.multiset = tuple(sorted(multiset, key=_sort_key))

    @property
    def s(self) -> int:
        return len(self.multiset)

    def distribution(self) -> FiniteDistribution:
        counts = Counter(self.multiset)
        keys = sorted(counts, key=_sort_key)
        return FiniteDistribution(keys, [Fraction(counts[k], self.s) for k in keys], check=False)


class JointDistribution:
    """Exact joint law of (X, Y) as a dense matrix."""

    def __init__(self, left: Sequence, right: Sequence, matrix: Sequence[Sequence]):
        self.left = tuple(left)
        self.right = tuple(right)
        self.matrix = tuple(tuple(as_fraction(p) for p in row) for row in matrix)
        if len(self.matrix) != len(self.left) or any(len(r) != len(self.right) for r in self.matrix):
            raise DistributionError("matrix shape does not match alphabets")
        if any(p < 0 for r in self.matrix for p in r):
            raise DistributionError("negative mass")
        if sum(sum(r) for r in self.matrix) != 1:
            raise DistributionError("joint masses do not sum to 1")

    @classmethod
    def from_channel(cls, px: FiniteDistribution, channel) -> "JointDistribution":
        """Joint law of (X, W(X)) where channel maps x to a FiniteDistribution."""
        rows = {x: channel(x) for x in px.support}
        right = sorted({y for r in rows.values() for y in r.support}, key=_sort_key)
        left = px.support
        return cls(left, right, [[px(x) * rows[x](y) for y in right] for x in left])

    def marginal_left(self) -> FiniteDistribution:
        return FiniteDistribution(self.left, [sum(r) for r in self.matrix], check=False)

    def marginal_right(self) -> FiniteDistribution:
        cols = [sum(r[j] for r in self.matrix) for j in range(len(self.right))]
        return FiniteDistribution(self.right, cols, check=False)

    def conditional_left(self, y) -> FiniteDistribution:
        j = self.right.index(y)
        col = [r[j] for r in self.matrix]
        tot = sum(col)
        if tot == 0:
            raise DistributionError(f"conditioning on zero-probability outcome {y!r}")
        return FiniteDistribution(self.left, [p / tot for p in col], check=False)


def statistical_distance(P: FiniteDistribution, Q: FiniteDistribution) -> Fraction:
    keys = set(P.support) | set(Q.support)
    return sum((abs(P(a) - Q(a)) for a in keys), Fraction(0)) / 2


def _log2_ratio(p: Fraction, q: Fraction) -> float:
    r = p / q
    # log2 of a big rational without float overflow
    return math.log2(r.numerator) - math.log2(r.denominator)


def kl_divergence(P: FiniteDistribution, Q: FiniteDistribution) -> float:
    """D_KL(P || Q) in bits; +inf when supp(P) is not inside supp(Q)."""
    terms = []
    for a, p in P.items():
        if not p:
            continue
        q = Q(a)
        if not q:
            return math.inf
        terms.append(float(p) * _log2_ratio(p, q))
    return max(0.0, math.fsum(terms))


def entropy(P: FiniteDistribution) -> float:
    return math.fsum(float(p) * _log2_ratio(Fraction(1), p) for _, p in P.items() if p)


def mutual_information(J: JointDistribution) -> float:
    """I(X;Y) = sum_y P(y) D_KL(X|Y=y || X), exact up to the final logs."""
    px = J.marginal_left()
    py = J.marginal_right()
    terms = []
    for y, q in py.items():
        if not q:
            continue
        terms.append(float(q) * kl_divergence(J.conditional_left(y), px))
    return max(0.0, math.fsum(terms))


def mutual_information_entropy_form(J: JointDistribution) -> float:
    """H(X) + H(Y) - H(X,Y); an independent formula for cross-checks."""
    flat = [p for r in J.matrix for p in r if p]
    hxy = math.fsum(float(p) * _log2_ratio(Fraction(1), p) for p in flat)
    return entropy(J.marginal_left()) + entropy(J.marginal_right()) - hxy


class UndefinedBound(DistributionError):
    pass


def reverse_pinsker_bound(P: FiniteDistribution, Q: FiniteDistribution, alphabet: Iterable = None) -> float:
    """log2(1 + 2 Δ(P,Q)^2 / α) with α the smallest mass of the reference Q.

    The working alphabet defaults to the union of both supports.
    """
    keys = list(alphabet) if alphabet is not None else sorted(set(P.support) | set(Q.support), key=_sort_key)
    alpha = min(Q(a) for a in keys)
    if alpha == 0:
        raise UndefinedBound("reference distribution lacks full support")
    d = statistical_distance(P, Q)
    return math.log2(1 + float(2 * d * d / alpha))


def sample(P: FiniteDistribution, seed: int):
    """Draw one outcome exactly using an integer draw over the common denominator."""
    den = 1
    for p in P.masses:
        den = den * p.denominator // math.gcd(den, p.denominator)
    u = random.Random(int(seed)).randrange(den)
    acc = 0
    for a, p in P.items():
        acc += p.numerator * (den // p.denominator)
        if u < acc:
            return a
    raise AssertionError("unreachable: masses sum to 1")


def lcm_of(values: Iterable[int]) -> int:
    out = 1
    for v in values:
        out = out * v // math.gcd(out, v)
    return out
