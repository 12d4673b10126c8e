"""Exact two-phase simplex over Fractions with Bland's rule."""
from __future__ import annotations


import numpy as np
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence


class Unbounded(OverflowError):
    pass


class Infeasible(ArithmeticError):
    pass


@dataclass
class LPResult:
    x: List[Fraction]
    value: Fraction
    pivots: int
    dual_ub: List[Fraction] = None


def _pivot(T, obj, r, c):
    row = T[r]
    a = row[c]
    if a != 1:
        row[:] = [v / a for v in row]
    nz = [j for j, v in enumerate(row) if v]
    for i, other in enumerate(T):
        if i != r:
            f = other[c]
            if f:
                for j in nz:
                    other[j] -= f * row[j]
    f = obj[c]
    if f:
        for j in nz:
            obj[j] -= f * row[j]


def _run(T, obj, basis, allowed, budget=10**6):
    pivots = 0
    while True:
        enter = next((j for j in allowed if obj[j] < 0), None)
        if enter is None:
            return pivots
        best = None
        for i, row in enumerate(T):
            a = row[enter]
            if a > 0:
                ratio = row[-1] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            raise Unbounded("linear program is unbounded")
        _pivot(T, obj, best[1], enter)
        basis[best[1]] = enter
        pivots += 1
        if pivots > budget:
            raise RuntimeError("pivot budget exhausted")


def linprog_exact(c: Sequence, A_ub: Sequence[Sequence] = (), b_ub: Sequence = (),
                  A_eq: Sequence[Sequence] = (), b_eq: Sequence = ()) -> LPResult:
    """Minimise c.x subject to A_ub x <= b_ub, A_eq x = b_eq, x >= 0."""
    F = Fraction
    n = len(c)
    n_ub = len(A_ub)
    rows = []
    for i, (a, b) in enumerate(zip(A_ub, b_ub)):
        slack = [F(0)] * n_ub
        slack[i] = F(1)
        rows.append(([F(v) for v in a] + slack, F(b)))
    for a, b in zip(A_eq, b_eq):
        rows.append(([F(v) for v in a] + [F(0)] * n_ub, F(b)))
    nv = n + n_ub
    # flip rows with negative right-hand side
    signs = [1 if b >= 0 else -1 for _, b in rows]
    rows = [(a, b) if b >= 0 else ([-v for v in a], -b) for a, b in rows]
    basis = [None] * len(rows)
    for i in range(n_ub):
        if rows[i][0][n + i] == 1:
            basis[i] = n + i
    need = [i for i, b in enumerate(basis) if b is None]
    n_art = len(need)
    T = []
    for i, (a, b) in enumerate(rows):
        art = [F(0)] * n_art
        if basis[i] is None:
            k = need.index(i)
            art[k] = F(1)
            basis[i] = nv + k
        T.append(a + art + [b])
    total = nv + n_art
    pivots = 0
    if n_art:
        obj = [F(0)] * (total + 1)
        for i in need:
            for j in range(total + 1):
                obj[j] -= T[i][j]
        for k in range(n_art):
            obj[nv + k] = F(0)
        pivots += _run(T, obj, basis, range(total))
        if obj[-1] != 0:
            raise Infeasible("linear program is infeasible")
        # drive zero-valued artificials out of the basis
        for i in range(len(T) - 1, -1, -1):
            if basis[i] >= nv:
                col = next((j for j in range(nv) if T[i][j] != 0), None)
                if col is None:
                    del T[i]
                    del basis[i]
                else:
                    _pivot(T, [F(0)] * (total + 1), i, col)
                    basis[i] = col
        T = [row[:nv] + [row[-1]] for row in T]
    obj = [F(v) for v in c] + [F(0)] * n_ub + [F(0)]
    for i, bj in enumerate(basis):
        f = obj[bj]
        if f:
            for j in range(nv + 1):
                obj[j] -= f * T[i][j]
    pivots += _run(T, obj, basis, range(nv))
    x = [F(0)] * nv
    for i, bj in enumerate(basis):
        x[bj] = T[i][-1]
    xs = x[:n]
    # simplex multipliers of the <= rows: y_i = -(reduced cost of slack i)
    duals = [-obj[n + i] * signs[i] for i in range(n_ub)]
    return LPResult(xs, sum((F(ci) * xi for ci, xi in zip(c, xs)), F(0)), pivots, duals)


@dataclass
class PackingResult:
    x: List[Fraction]
    y: List[Fraction]
    value: Fraction
    pivots: int


def solve_packing_lp(A: Sequence[Sequence[int]], budget: int = 10**6) -> PackingResult:
    """max 1.x  s.t.  A x <= 1, x >= 0, for a positive integer matrix A (b x a).

    Revised simplex with Bland's rule: the basis inverse is b x b and exact,
    columns are priced with integer dot products, so the cost per pivot is
    linear in the number of columns. Returns the primal x and the dual y
    (min 1.y s.t. A^T y >= 1).
    """
    F = Fraction
    b = len(A)
    a = len(A[0])
    cols = [tuple(int(A[i][j]) for i in range(b)) for j in range(a)]
    # variables 0..a-1 are structural, a..a+b-1 are slacks
    basis = [a + i for i in range(b)]
    Af = np.array(cols, dtype=float)
    absAf = np.abs(Af)
    Binv = [[F(int(i == k)) for k in range(b)] for i in range(b)]
    xB = [F(1)] * b
    pivots = 0

    def column(j):
        if j < a:
            return cols[j]
        return tuple(int(i == j - a) for i in range(b))

    while True:
        # multipliers pi = c_B Binv with c = -1 on structural variables
        pi = [F(0)] * b
        for r, bj in enumerate(basis):
            if bj < a:
                for k in range(b):
                    pi[k] -= Binv[r][k]
        # float pricing filters columns; the sign is then decided exactly, in index order
        pif = np.array([float(v) for v in pi])
        red = -1.0 - Af @ pif
        tol = 1e-9 * (1.0 + absAf @ np.abs(pif))
        enter = None
        for j in np.flatnonzero(red < tol):
            j = int(j)
            if -1 - sum(pi[k] * cols[j][k] for k in range(b) if cols[j][k]) < 0:
                enter = j
                break
        if enter is None:
            enter = next((a + k for k in range(b) if pi[k] > 0), None)
        if enter is None:
            break
        col = column(enter)
        d = [sum(Binv[i][k] * col[k] for k in range(b) if col[k]) for i in range(b)]
        best = None
        for i in range(b):
            if d[i] > 0:
                ratio = xB[i] / d[i]
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            raise Unbounded("packing LP is unbounded")
        r = best[1]
        piv = d[r]
        Binv[r] = [v / piv for v in Binv[r]]
        xB[r] = xB[r] / piv
        for i in range(b):
            if i != r and d[i]:
                f = d[i]
                Binv[i] = [u - f * v for u, v in zip(Binv[i], Binv[r])]
                xB[i] -= f * xB[r]
        basis[r] = enter
        pivots += 1
        if pivots > budget:
            raise RuntimeError("pivot budget exhausted")
    x = [F(0)] * a
    for r, bj in enumerate(basis):
        if bj < a:
            x[bj] = xB[r]
    y = [-v for v in pi]
    return PackingResult(x, y, sum(x, F(0)), pivots)
