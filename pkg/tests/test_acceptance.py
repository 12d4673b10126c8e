"""The twelve acceptance criteria, one test each.

Every test records a PASS/FAIL line that is printed in the terminal summary
(and immediately with ``pytest -s``).
"""
import functools
import itertools
import math
import random
import time
from fractions import Fraction

import numpy as np
import pytest

from conftest import ACCEPTANCE, GAMMA
from lossylab.crypto import (InverterOracle, build_instance_circuits, efi_decide, efi_pair,
                             owf_dichotomy, restricted_supports)
from lossylab.disguise import (PayoffMatrix, build_disguising_collection, collection_value, delta_of, game_value,
                               ly_s, ly_sparsify, sparsified_trial)
from lossylab.information import (FiniteDistribution, JointDistribution, kl_divergence, mutual_information,
                                  reverse_pinsker_bound)
from lossylab.params import (gap_dichotomy_expression, ksat_params, lossiness_bound_wcdist, regime_check,
                             theta_report)
from lossylab.problems import PromiseProblem, builtin_problem
from lossylab.reductions import (PermInvariantF, StochasticReduction, distinguisher_error, encoding_check,
                                 identity_reduction, mild_lossiness_estimate, p_of_f, random_lossy_reduction,
                                 wc_dist_distance, xor_encoding)
from lossylab.scenario import bundled_scenarios, dumps, normalize, run_scenario
from lossylab.szk import FAR_PAIR, NEAR_PAIR, pair_distance, pair_from_laws, polarize, szk_gap_report, xor_pair


def criterion(num, title):
    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            try:
                note = fn(*args, **kwargs) or ""
            except BaseException as exc:
                ACCEPTANCE[num] = (False, f"{title}: {type(exc).__name__}: {exc}"[:200])
                print(f"criterion {num}: FAIL  {title}")
                raise
            ACCEPTANCE[num] = (True, f"{title}{': ' + note if note else ''}")
            print(f"criterion {num}: PASS  {title}  {note}")
        return run
    return wrap


def rand_law(rng, k, den=12, full=False):
    w = [rng.randint(1 if full else 0, den) for _ in range(k)]
    if not any(w):
        w[rng.randrange(k)] = 1
    tot = sum(w)
    return [Fraction(v, tot) for v in w]


# -- 1: game oracle -------------------------------------------------------------

def _solve(A, b):
    """Exact Gaussian elimination; None when singular."""
    n = len(A)
    M = [list(r) + [v] for r, v in zip(A, b)]
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c] != 0), None)
        if piv is None:
            return None
        M[c], M[piv] = M[piv], M[c]
        for r in range(n):
            if r != c and M[r][c] != 0:
                k = M[r][c] / M[c][c]
                M[r] = [x - k * y for x, y in zip(M[r], M[c])]
    return [M[i][n] / M[i][i] for i in range(n)]


def shapley_snow_value(E):
    """Value via square kernels: equalising strategies on a k×k block, checked globally."""
    a, b = len(E), len(E[0])
    for k in range(1, min(a, b) + 1):
        for I in itertools.combinations(range(a), k):
            for J in itertools.combinations(range(b), k):
                # p over I equalises columns J, q over J equalises rows I
                P = _solve([[E[i][j] for i in I] + [Fraction(-1)] for j in J] + [[Fraction(1)] * k + [Fraction(0)]],
                           [Fraction(0)] * k + [Fraction(1)])
                Q = _solve([[E[i][j] for j in J] + [Fraction(-1)] for i in I] + [[Fraction(1)] * k + [Fraction(0)]],
                           [Fraction(0)] * k + [Fraction(1)])
                if P is None or Q is None or P[-1] != Q[-1]:
                    continue
                v, p, q = P[-1], P[:-1], Q[:-1]
                if min(p) < 0 or min(q) < 0:
                    continue
                if all(sum(pi * E[i][j] for pi, i in zip(p, I)) <= v for j in range(b)) and \
                        all(sum(qj * E[i][j] for qj, j in zip(q, J)) >= v for i in range(a)):
                    return v
    raise AssertionError("no Shapley-Snow kernel found")


def simplex_grid(k, steps=1000):
    if k == 1:
        return np.ones((1, 1))
    if k == 2:
        x = np.arange(steps + 1) / steps
        return np.stack([x, 1 - x], axis=1)
    i, j = np.triu_indices(steps + 1)
    # (i, j) with i <= j splits [0, steps] into three parts
    return np.stack([i, j - i, steps - j], axis=1) / steps


def grid_value(E):
    """Minimax on a 1e-3 grid over the player with at most three strategies."""
    A = np.array([[float(v) for v in r] for r in E])
    a, b = A.shape
    if a <= 3:
        return float((simplex_grid(a) @ A).max(axis=1).min())
    return float((simplex_grid(b) @ A.T).min(axis=1).max())


@criterion(1, "game oracle: exact duality and brute-force minimax")
def test_acceptance_01_game_oracle():
    t0 = time.perf_counter()
    gridded = kernels = 0
    for seed in range(200):
        rng = random.Random(seed)
        a, b = rng.randint(1, 6), rng.randint(1, 6)
        E = [[Fraction(rng.randint(0, 12), rng.randint(1, 12)) for _ in range(b)] for _ in range(a)]
        E = [[min(v, Fraction(1)) for v in r] for r in E]
        sol = game_value(PayoffMatrix(E))
        assert sol.primal == sol.dual == sol.value
        p, q = sol.P.vector(a), sol.Q.vector(b)
        M = PayoffMatrix(E)
        assert max(M.col_payoffs(p)) == sol.value == min(M.row_payoffs(q))
        if min(a, b) <= 3:
            assert abs(grid_value(E) - float(sol.value)) <= 1e-3
            gridded += 1
        else:
            assert shapley_snow_value(E) == sol.value
            kernels += 1
    dt = time.perf_counter() - t0
    assert dt < 60
    return f"{gridded} grid-checked, {kernels} kernel-checked, {dt:.1f}s"


# -- 2: Lipton-Young ----------------------------------------------------------------

@criterion(2, "Lipton-Young sparsification certified")
def test_acceptance_02_lipton_young():
    checked = 0
    for seed in range(100):
        rng = random.Random(1000 + seed)
        a, b = rng.randint(1, 7), rng.randint(1, 7)
        E = [[Fraction(rng.randint(-6, 6), rng.randint(1, 6)) for _ in range(b)] for _ in range(a)]
        M = PayoffMatrix(E)
        sol = game_value(M)
        for eps in (Fraction(1, 4), Fraction(1, 2)):
            for player in (1, 2):
                sp = ly_sparsify(M, player, eps, seed=seed, solution=sol)
                opp = b if player == 1 else a
                assert sp.s == ly_s(opp, eps) and sp.s >= math.log(opp) / (2 * float(eps) ** 2)
                w = sp.strategy.witness
                assert len(w) == sp.s
                if player == 1:
                    g = max(sum(E[i][j] for i in w) / len(w) for j in range(b))
                    gap = g - sol.value
                else:
                    g = min(sum(E[i][j] for j in w) / len(w) for i in range(a))
                    gap = sol.value - g
                assert g == sp.guarantee
                assert 0 <= gap <= eps * (M.M_max - M.M_min)
                checked += 1
    return f"{checked} strategies, zero failures"


# -- 3: extended disguising lemma ------------------------------------------------------

def random_disguise_fixture(seed):
    rng = random.Random(seed)
    m, d = rng.randint(1, 3), rng.randint(1, 3)
    cap = 5 if m < 3 else 3
    k0, k1 = rng.randint(1, cap), rng.randint(1, cap)
    xs = rng.sample(range(16), k0 + k1)
    problem = PromiseProblem(4, tuple(xs[:k1]), tuple(xs[k1:]), f"rand{seed}")
    f = PermInvariantF([0] + [rng.randint(0, 1) for _ in range(m - 1)] + [1])
    R = random_lossy_reduction(problem, f, Fraction(rng.randint(1, 4), 8), seed)
    return problem, f, R, d


@criterion(3, "extended disguising lemma bound")
def test_acceptance_03_disguising(parity_or):
    t0 = time.perf_counter()
    cases = [(parity_or.problem, parity_or.f, parity_or.R, parity_or.d)]
    cases += [random_disguise_fixture(s) for s in range(20)]
    worst = 0.0
    for i, (problem, f, R, d) in enumerate(cases):
        eps = GAMMA / 4
        lr = mild_lossiness_estimate(R, problem, GAMMA, exhaustive=True, s_cap=max(R.N, d + 1))
        assert lr.exhaustive
        p = p_of_f(f)
        coll = build_disguising_collection(R, problem.no, problem.yes, f.m - p, p - 1, d, eps, lr.ell, seed=i)
        bound = delta_of(lr.ell, f.m) + 2 * (f.m + 1) / (d + 1) + 2 * float(eps)
        assert set(coll.per_column) == set(problem.no) | set(problem.yes)
        assert collection_value(R, coll) == coll.per_column
        for y, v in coll.per_column.items():
            assert float(v) <= bound, (i, y, v, bound)
        worst = max(worst, float(coll.achieved) / bound)
    dt = time.perf_counter() - t0
    assert dt < 300
    return f"{len(cases)} fixtures, worst achieved/bound {worst:.3f}, {dt:.1f}s"


# -- 4: sparsified bound --------------------------------------------------------------

def _sparsified_fixtures(parity_or, parity_or_noisy):
    yield "parity-or", parity_or.R, parity_or.problem, parity_or.f
    yield "parity-or-noisy", parity_or_noisy.R, parity_or_noisy.problem, parity_or_noisy.f
    P2 = builtin_problem("parity", 2)
    f_and = PermInvariantF.named("and", 2)
    yield "parity-and-lossy", random_lossy_reduction(P2, f_and, Fraction(1, 4), 3), P2, f_and
    f_maj = PermInvariantF.named("maj", 3)
    yield "parity-maj3-lossy", random_lossy_reduction(P2, f_maj, Fraction(1, 8), 4), P2, f_maj


@criterion(4, "sparsified stability bound")
def test_acceptance_04_sparsified(parity_or, parity_or_noisy):
    d = 4
    count = 0
    for name, R, problem, f in _sparsified_fixtures(parity_or, parity_or_noisy):
        p = p_of_f(f)
        m0, m1 = f.m - p, p - 1
        D0, D1 = FiniteDistribution.uniform(problem.no), FiniteDistribution.uniform(problem.yes)
        for t in range(50):
            side = t % 2
            tr = sparsified_trial(R, D0, D1, m0, m1, d, side, seed=t)
            mside = m0 if side == 0 else m1
            assert tr.slack == Fraction(2 * mside + 1, d + 1)
            assert tr.lhs <= tr.middle + tr.slack, (name, t, tr)
            count += 1
    return f"{count} exact trials"


# -- 5: SZK gap -------------------------------------------------------------------------

@criterion(5, "SZK gap on the fixtures, negative control flagged")
def test_acceptance_05_szk(parity_or, parity_or_noisy):
    g = szk_gap_report(parity_or.R, parity_or.problem, parity_or.f, parity_or.collection,
                       ell=parity_or.ell, gamma=GAMMA)
    assert g.yes_gap_min == 1 and g.no_gap_max == 0
    gn = szk_gap_report(parity_or_noisy.R, parity_or_noisy.problem, parity_or_noisy.f,
                        parity_or_noisy.collection, ell=parity_or_noisy.ell, gamma=GAMMA)
    assert gn.yes_gap_min >= Fraction(4, 5)
    assert float(gn.no_gap_max) <= gn.delta + float(GAMMA)
    # identity reduction under a claimed ℓ = 0
    problem, f = parity_or.problem, parity_or.f
    R = identity_reduction(problem, f.m)
    coll = build_disguising_collection(R, problem.no, problem.yes, 1, 0, parity_or.d, GAMMA / 4, 0.0, seed=1)
    gi = szk_gap_report(R, problem, f, coll, ell=0.0, gamma=GAMMA)
    assert not gi.no_ok and gi.violations
    return f"noisy yes >= {gn.yes_gap_min}, identity no-gap {gi.no_gap_max} flagged"


# -- 6: polarization ----------------------------------------------------------------------

@criterion(6, "polarization exactness and end-to-end reach")
def test_acceptance_06_polarization():
    for seed in range(20):
        rng = random.Random(600 + seed)
        k = rng.randint(2, 4)
        L0 = FiniteDistribution(range(k), rand_law(rng, k))
        L1 = FiniteDistribution(range(k), rand_law(rng, k))
        pairs = pair_from_laws(L0, L1)
        D = pair_distance(pairs)
        for j in (2, 3, 4):
            assert pair_distance(xor_pair(pairs, j)) == D ** j
    third = FiniteDistribution((0, 1, 2), [Fraction(1, 4), Fraction(3, 4), 0])
    far2 = FiniteDistribution((0, 1, 2), [Fraction(1), 0, 0])
    near = polarize(*NEAR_PAIR, Fraction(1, 4), Fraction(3, 4), 8)
    assert near.input_distance == Fraction(1, 4) and near.regime == "near"
    assert near.reached and near.upper <= 2 ** -8
    for P0, P1 in (FAR_PAIR, (far2, third)):
        far = polarize(P0, P1, Fraction(1, 4), Fraction(3, 4), 8)
        assert far.regime == "far" and far.reached and far.lower >= 1 - 2 ** -8
    return f"schedule {near.schedule}, near upper {near.upper:.3g}"


# -- 7: reverse Pinsker and the WC-DIST lossiness bound ----------------------------------------

def wcdist_split_reduction(seed, n=3):
    """m = 1 reduction whose rows sit near one law per side."""
    rng = random.Random(seed)
    problem = builtin_problem("parity", n)
    K = rng.randint(2, 4)
    centers = {s: rand_law(rng, K, full=True) for s in (0, 1)}
    spread = Fraction(rng.randint(0, 4), 32)
    rows = {}
    for x in problem.instances:
        noise = rand_law(rng, K)
        c = centers[problem.chi(x)]
        rows[x] = {w: (1 - spread) * c[w] + spread * noise[w] for w in range(K)}
    return problem, StochasticReduction(problem, 1, range(K), lambda t: rows[t[0]], f"wc{seed}")


@criterion(7, "reverse Pinsker and WC-DIST lossiness bound")
def test_acceptance_07_reverse_pinsker():
    t0 = time.perf_counter()
    rng = random.Random(7)
    worst = -math.inf
    for _ in range(10_000):
        k = rng.randint(2, 8)
        P = FiniteDistribution(range(k), rand_law(rng, k))
        Q = FiniteDistribution(range(k), rand_law(rng, k, full=True))
        gap = kl_divergence(P, Q) - reverse_pinsker_bound(P, Q, range(k))
        assert gap <= 1e-12
        worst = max(worst, gap)
    checks = 0
    for seed in range(20):
        problem, R = wcdist_split_reduction(700 + seed)
        d = wc_dist_distance(R, problem, split=True).d
        bound = lossiness_bound_wcdist(1, problem.n, float(d), float(GAMMA))
        lr = mild_lossiness_estimate(R, problem, GAMMA, exhaustive=True)
        assert lr.ell <= bound + 1e-9
        srng = random.Random(seed)
        for _ in range(25):
            side = problem.yes if srng.random() < 0.5 else problem.no
            px = FiniteDistribution(side, rand_law(srng, len(side)))
            I = mutual_information(JointDistribution.from_channel(px, lambda x: R.row((x,))))
            assert I <= bound + 1e-9
            checks += 1
    dt = time.perf_counter() - t0
    assert dt < 120
    return f"max KL - bound {worst:.3g}, {checks} split laws, {dt:.1f}s"


# -- 8: randomized encoding ------------------------------------------------------------------

@criterion(8, "randomized encoding is a zero-distance WC-DIST reduction")
def test_acceptance_08_randomized_encoding():
    RE, F = xor_encoding()
    assert encoding_check(RE, F) == (0, 0)
    res = wc_dist_distance(RE.encoder, RE.encoder.problem, split=True)
    assert res.d == 0
    for side in (0, 1):
        assert res.centers[side] == RE.sim[side]


# -- 9: OWF dichotomy ---------------------------------------------------------------------------

@criterion(9, "OWF dichotomy with the brute-force inverter")
def test_acceptance_09_owf(parity_or):
    fx = parity_or
    mu = distinguisher_error(fx.R, fx.problem, fx.f).mu
    k_seen = set()
    for seed in range(100):
        inv = InverterOracle("brute-force")
        rep = owf_dichotomy(fx.problem, fx.R, fx.f, fx.collection, inv, seed=seed, ell=fx.ell, gamma=GAMMA)
        assert rep.k == math.ceil(64 / rep.theta ** 2)
        k_seen.add(rep.k)
        assert rep.all_correct
        for y, row in rep.per_instance.items():
            assert row["X_exact"] == fx.problem.chi(y)
        a, perm = rep.advice
        for y in fx.problem.instances:
            C0, C1 = build_instance_circuits(fx.R, fx.problem, fx.f, fx.collection, a, perm, y)
            rp = restricted_supports(C0, C1, mu)
            if rp.law0 is not None and rp.law1 is not None:
                assert not set(rp.law0.support) & set(rp.law1.support)
            if fx.problem.chi(y) == 1:
                assert rp.retained0 >= 1 - 2 * mu and rp.retained1 >= 1 - 2 * mu
    return f"100 runs, k = {sorted(k_seen)}"


# -- 10: EFI ------------------------------------------------------------------------------------

@criterion(10, "EFI pair distance and decision correctness")
def test_acceptance_10_efi(parity_or, parity_or_noisy):
    worst = 1.0
    for fx in (parity_or, parity_or_noisy):
        mu = distinguisher_error(fx.R, fx.problem, fx.f).mu
        for seed in range(5):
            assert efi_pair(fx.problem, fx.R, fx.f, fx.collection, seed=seed).D >= 1 - 2 * mu
        nu = 1 - 2 * mu
        delta = delta_of(fx.ell, fx.f.m)
        for z in fx.problem.instances:
            dec = efi_decide(fx.problem, fx.R, fx.f, fx.collection, nu, z, seed=3, trials=10_000,
                             ell=fx.ell, gamma=GAMMA)
            assert dec.tau == pytest.approx(float(nu) / 4 - 3 * (delta + float(GAMMA)) / 4, abs=1e-15)
            assert dec.k == math.ceil(1 / dec.tau ** 2)
            assert dec.correct_rate >= 2 / 3
            worst = min(worst, dec.correct_rate)
    return f"worst per-instance rate {worst:.4f}"


# -- 11: parameter calculus ------------------------------------------------------------------------

@criterion(11, "parameter calculus reproduces the closed forms")
def test_acceptance_11_params():
    assert delta_of(13) == 1 - 2 ** -15
    rep = theta_report(0, 13, 0)
    assert rep.delta == 1 - 2 ** -15 and rep.one_minus_delta == 2 ** -15
    expr = gap_dichotomy_expression(1e-5, 1e-5, 13)
    exact = 2 ** -15 - 1e-4 - 1e-5
    assert abs(expr - exact) <= 1e-12 * abs(exact)
    for lam in range(1, 21):
        flags = regime_check(1, 1, 2.0 ** (-lam - 8), 2.0 ** (-lam - 4), lam, n=16)
        assert flags["generic-lossy-owf"].satisfied
        assert flags["generic-lossy-owf"].values["theta_owf"] >= 2.0 ** (-lam - 3)
    for k in (3, 4, 5):
        kp = ksat_params(k, 0.5, 1024, s_k=0.4)
        assert 0 < kp.s_star <= 2 * k * 0.4
    with pytest.raises(ValueError):
        ksat_params(3, 3.0, 1024, s_k=0.2)
    return f"gap-dichotomy expression {expr:.10e}"


# -- 12: replay determinism -------------------------------------------------------------------------

@criterion(12, "replay determinism of bundled scenarios")
def test_acceptance_12_determinism(tmp_path):
    names = bundled_scenarios()
    assert names
    for name, path in names.items():
        outs = []
        for run, jobs in enumerate((1, 1, 8)):
            rep = run_scenario(path, jobs=jobs, out=tmp_path / f"{name}-{run}.json")
            outs.append(dumps(normalize(rep.to_json())).encode())
        assert outs[0] == outs[1] == outs[2], name
    return f"{len(names)} scenarios"
