import math
from fractions import Fraction as F

import pytest

from lossylab.crypto import (CryptoError, InverterOracle, ParameterError, build_instance_circuits, efi_decide,
                             efi_laws, efi_pair, efi_tau, exact_X, owf_dichotomy, owf_eval, owf_repetitions,
                             restricted_supports, run_B, single_branch_candidate, two_branch_candidate)
from lossylab.disguise import build_disguising_collection
from lossylab.information import FiniteDistribution
from lossylab.problems import PromiseProblem, builtin_problem
from lossylab.reductions import PermInvariantF, chi_f_reduction
from lossylab.szk import draw_advice

P2 = builtin_problem("parity", 2)
OR2 = PermInvariantF.named("or", 2)


@pytest.fixture(scope="module")
def clean():
    R = chi_f_reduction(P2, OR2)
    return R, build_disguising_collection(R, P2.no, P2.yes, 1, 0, 4, F(1, 16), 0.0, seed=2)


@pytest.fixture(scope="module")
def noisy():
    R = chi_f_reduction(P2, OR2, F(1, 10))
    return R, build_disguising_collection(R, P2.no, P2.yes, 1, 0, 4, F(1, 16), 0.0, seed=2)


def test_constants_frozen():
    assert owf_repetitions(0.75) == 114
    assert efi_tau(1, 0, F(1, 4)) == 0.0625


def test_candidates(clean):
    R, coll = clean
    single = single_branch_candidate(R, P2, OR2, coll, seed=1)
    two = two_branch_candidate(R, P2, OR2, coll, seed=1)
    assert single.variant == "single-branch" and two.variant == "two-branch"
    assert two.y_star in coll.pairs[draw_advice(coll, 2, 1)[0]][0]
    assert owf_eval(two, 0, 5) == owf_eval(single, 0, 5)
    assert single.kappa == math.ceil(math.log2(single.randomness_size))
    with pytest.raises(CryptoError):
        owf_eval(single, 0, single.randomness_size)


def test_exact_X_by_side(clean):
    R, coll = clean
    a, perm = draw_advice(coll, 2, 0)
    inv = InverterOracle("brute-force")
    for y in P2.instances:
        C0, C1 = build_instance_circuits(R, P2, OR2, coll, a, perm, y)
        p0, p1 = exact_X(C0, C1, inv)
        assert p0 == 1 and abs(p0 - p1) == P2.chi(y)
    s0, n0, s1, n1 = run_B(C0, C1, InverterOracle("always-fail"), 50, seed=3)
    assert s0 == s1 == 0 and n0 + n1 == 50


def test_planted_inverter(clean):
    R, coll = clean
    a, perm = draw_advice(coll, 2, 0)
    C0, C1 = build_instance_circuits(R, P2, OR2, coll, a, perm, 1)
    inv = InverterOracle("planted", planted=[0])
    assert inv.would_invert(C0, 0) and not inv.would_invert(C0, 1)
    r = inv.invert(C0, 0)
    assert C0.evaluate(r) == 0 and inv.queries == 1 and inv.successes == 1
    with pytest.raises(CryptoError):
        InverterOracle("psychic")


def test_restricted_supports_noisy(noisy):
    R, coll = noisy
    a, perm = draw_advice(coll, 2, 0)
    C0, C1 = build_instance_circuits(R, P2, OR2, coll, a, perm, 1)
    rp = restricted_supports(C0, C1, F(1, 10))
    assert rp.retained0 == rp.retained1 == F(9, 10)
    assert rp.premise_ok and rp.case_split_ok
    assert not set(rp.law0.support) & set(rp.law1.support)


def test_dichotomy_clean(clean):
    R, coll = clean
    rep = owf_dichotomy(P2, R, OR2, coll, InverterOracle(), seed=4, ell=0.0, gamma=F(1, 4))
    assert rep.theta == 0.75 and rep.k == 114 and rep.all_correct and not rep.flags
    rep = owf_dichotomy(P2, R, OR2, coll, InverterOracle("always-fail"), seed=4, ell=0.0, gamma=F(1, 4))
    assert any("not exhaustive" in f for f in rep.flags)


def test_dichotomy_refuses_nonpositive_theta(noisy):
    R, coll = noisy
    with pytest.raises(ParameterError):
        owf_dichotomy(P2, R, OR2, coll, InverterOracle(), ell=0.0, gamma=F(1, 4))


def test_efi_noisy(noisy):
    R, coll = noisy
    ep = efi_pair(P2, R, OR2, coll, seed=0)
    assert ep.D == F(4, 5)
    E0, E1 = efi_laws(R, P2, OR2, coll, ep.advice)
    assert isinstance(E1, FiniteDistribution) and sum(E1.masses) == 1
    d = efi_decide(P2, R, OR2, coll, F(4, 5), 1, seed=0, trials=200, ell=0.0, gamma=F(1, 4))
    assert d.tau == pytest.approx(1 / 80) and d.k == 6400
    assert d.correct_rate >= 2 / 3
    with pytest.raises(ParameterError):
        efi_decide(P2, R, OR2, coll, F(1, 2), 1, ell=0.0, gamma=F(1, 4))


def test_efi_undefined_without_both_sides():
    P = PromiseProblem(2, (1, 2), ())
    R = chi_f_reduction(P, OR2)
    coll = build_disguising_collection(R, P.no, P.yes, 1, 0, 2, F(1, 4), 0.0)
    with pytest.raises(CryptoError):
        efi_pair(P, R, OR2, coll)
