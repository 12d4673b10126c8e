"""Finite promise problems and exhaustive solvers."""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, Iterable, Optional

MAX_N = 24
STAR = "*"


class ProblemError(ValueError):
    pass


def bits_of(x: int, n: int) -> tuple:
    """Bits of x, most significant first."""
    return tuple((x >> (n - 1 - i)) & 1 for i in range(n))


def to_hex(x: int, n: int) -> str:
    width = max(1, (n + 3) // 4)
    return format(x, f"0{width}x")


def from_hex(s: str) -> int:
    return int(s, 16)


def parse_bitstring(x, n: int) -> int:
    """Accept an int or a '0101' style string of length n."""
    if isinstance(x, str):
        if len(x) != n or set(x) - {"0", "1"}:
            raise ProblemError(f"expected a {n}-bit string, got {x!r}")
        return int(x, 2)
    x = int(x)
    if x < 0 or x >= (1 << n):
        raise ProblemError(f"{x} does not fit in {n} bits")
    return x


@dataclass(frozen=True)
class PromiseProblem:
    n: int
    yes: tuple
    no: tuple
    name: str = "custom"

    def __post_init__(self):
        if not 0 < self.n <= MAX_N:
            raise ProblemError(f"n={self.n} outside 1..{MAX_N}")
        yes = tuple(sorted(set(self.yes)))
        no = tuple(sorted(set(self.no)))
        for x in yes + no:
            if not 0 <= x < (1 << self.n):
                raise ProblemError(f"instance {x} is not an {self.n}-bit string")
        if set(yes) & set(no):
            raise ProblemError("YES and NO sets intersect")
        object.__setattr__(self, "yes", yes)
        object.__setattr__(self, "no", no)
        object.__setattr__(self, "_yes_fs", frozenset(yes))
        object.__setattr__(self, "_no_fs", frozenset(no))

    @property
    def instances(self) -> tuple:
        """All promise instances in canonical (sorted) order."""
        return tuple(sorted(self.yes + self.no))

    def chi(self, x: int):
        return chi(self, x)

    def fmt(self, x: int) -> str:
        return format(x, f"0{self.n}b")

    def to_json(self) -> dict:
        return {"name": self.name, "n": self.n,
                "yes": [to_hex(x, self.n) for x in self.yes],
                "no": [to_hex(x, self.n) for x in self.no]}

    @classmethod
    def from_json(cls, doc: dict) -> "PromiseProblem":
        if "builtin" in doc:
            return builtin_problem(doc["builtin"], int(doc["n"]))
        try:
            n = int(doc["n"])
            yes = [from_hex(h) for h in doc.get("yes", [])]
            no = [from_hex(h) for h in doc.get("no", [])]
        except (KeyError, TypeError, ValueError) as exc:
            raise ProblemError(f"bad problem document: {exc}") from exc
        return cls(n, tuple(yes), tuple(no), doc.get("name", "custom"))


def chi(problem: PromiseProblem, x) -> object:
    """χ_Π(x): 1 on YES, 0 on NO, STAR outside the promise."""
    if isinstance(x, str):
        if len(x) != problem.n:
            raise ProblemError(f"length {len(x)} != n={problem.n}")
        x = int(x, 2)
    elif not 0 <= x < (1 << problem.n):
        raise ProblemError(f"instance {x} is not an {problem.n}-bit string")
    if x in problem._yes_fs:
        return 1
    if x in problem._no_fs:
        return 0
    return STAR


def _parity(n):
    xs = range(1 << n)
    yes = [x for x in xs if bin(x).count("1") % 2 == 1]
    no = [x for x in xs if bin(x).count("1") % 2 == 0]
    return yes, no


def _const_yes(n):
    return list(range(1 << n)), []


def _const_no(n):
    return [], list(range(1 << n))


def _majority(n):
    yes = [x for x in range(1 << n) if 2 * bin(x).count("1") > n]
    no = [x for x in range(1 << n) if 2 * bin(x).count("1") < n]
    return yes, no


def _ksat_slice(n, k=2, clauses=None):
    """Truth-table slice of kSAT: each instance bit toggles one fixed clause.

    The clause list is a deterministic enumeration over the first variables.
    An instance is YES iff the conjunction of its enabled clauses is satisfiable.
    """
    nvars = max(k, 3)
    if clauses is None:
        clauses = []
        for vs in itertools.combinations(range(nvars), k):
            for signs in itertools.product((1, -1), repeat=k):
                clauses.append(tuple(s * (v + 1) for s, v in zip(signs, vs)))
                if len(clauses) == n:
                    break
            if len(clauses) == n:
                break
    if len(clauses) < n:
        raise ProblemError(f"only {len(clauses)} distinct clauses for n={n}")
    assignments = list(itertools.product((False, True), repeat=nvars))

    def sat(mask):
        active = [c for i, c in enumerate(clauses) if bits_of(mask, n)[i]]
        return any(all(any(a[abs(l) - 1] == (l > 0) for l in c) for c in active)
                   for a in assignments)

    yes, no = [], []
    for x in range(1 << n):
        (yes if sat(x) else no).append(x)
    return yes, no


BUILDERS: Dict[str, Callable] = {
    "parity": _parity,
    "const-yes": _const_yes,
    "const-no": _const_no,
    "majority": _majority,
    "ksat": _ksat_slice,
}


def builtin_problem(name: str, n: int) -> PromiseProblem:
    if name not in BUILDERS:
        raise ProblemError(f"unknown problem builder {name!r}; known: {sorted(BUILDERS)}")
    if not 0 < n <= MAX_N:
        raise ProblemError(f"n={n} outside 1..{MAX_N}")
    yes, no = BUILDERS[name](n)
    return PromiseProblem(n, tuple(yes), tuple(no), f"{name}{n}")


def restrict(problem: PromiseProblem, yes: Iterable[int], no: Iterable[int]) -> PromiseProblem:
    """Sub-promise of a problem keeping only the listed instances."""
    yes, no = tuple(yes), tuple(no)
    if set(yes) - set(problem.yes) or set(no) - set(problem.no):
        raise ProblemError("restriction must keep instance labels")
    return PromiseProblem(problem.n, yes, no, problem.name + "-restricted")


@dataclass
class DecisionTable:
    problem: PromiseProblem
    table: Dict[int, int] = field(default_factory=dict)
    work: int = 0

    def __getitem__(self, x):
        return self.table[x]

    def __len__(self):
        return len(self.table)


def brute_force_solve(problem: PromiseProblem, predicate: Optional[Callable[[int], int]] = None) -> DecisionTable:
    """Decide every promise instance, counting evaluations as work.

    Without a predicate the membership lists themselves are the oracle.
    """
    out = DecisionTable(problem)
    for x in problem.instances:
        out.table[x] = int(predicate(x)) if predicate else chi(problem, x)
        out.work += 1
    return out


def load_problem(path) -> PromiseProblem:
    return PromiseProblem.from_json(json.loads(Path(path).read_text()))
