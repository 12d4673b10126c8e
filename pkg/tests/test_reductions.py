from fractions import Fraction as F

import pytest

from lossylab.information import FiniteDistribution
from lossylab.problems import builtin_problem
from lossylab.reductions import (PermInvariantF, ReductionError, StochasticReduction, TuringReduction,
                                 chi_f_reduction, constant_reduction, count_s_uniform_laws, distinguisher_error,
                                 identity_reduction, lossiness_s, mild_lossiness_estimate, p_of_f,
                                 random_lossy_reduction, reduction_from_json, s_uniform_laws,
                                 simulated_distinguisher_error, turing_hint_information, wc_dist_distance)

P2 = builtin_problem("parity", 2)
OR2 = PermInvariantF.named("or", 2)


def test_named_profiles():
    assert PermInvariantF.named("threshold2", 4).profile == (0, 0, 1, 1, 1)
    assert PermInvariantF.named("parity", 3).profile == (0, 1, 0, 1)
    assert p_of_f(OR2) == 1 and p_of_f(PermInvariantF.named("maj", 3)) == 2
    with pytest.raises(ReductionError):
        p_of_f(PermInvariantF([1, 0]))
    with pytest.raises(ReductionError):
        PermInvariantF([1, 1])


def test_chi_f_rows():
    R = chi_f_reduction(P2, OR2, F(1, 10))
    assert R.row((0, 3))(0) == F(9, 10)
    assert R.row((0, 1))(1) == F(9, 10)
    law = R.law([FiniteDistribution.uniform(P2.no), FiniteDistribution.uniform(P2.yes)])
    assert law(1) == F(9, 10)


def test_rows_must_be_distributions():
    with pytest.raises(ReductionError):
        StochasticReduction(P2, 1, (0, 1), lambda t: {0: F(1, 2)})
    with pytest.raises(ReductionError):
        StochasticReduction(P2, 1, (0,), lambda t: {1: 1})


def test_distinguisher_error():
    rep = distinguisher_error(chi_f_reduction(P2, OR2, F(1, 10)), P2, OR2)
    assert rep.mu == F(1, 10) and rep.min_distance == F(4, 5) and rep.pairs == 48
    assert distinguisher_error(constant_reduction(P2, 2), P2, OR2).mu == F(1, 2)


def test_s_uniform_enumeration():
    laws = s_uniform_laws([0, 1], 4)
    assert len(laws) == 7 and count_s_uniform_laws(2, 4) == 14
    assert (F(1, 4), F(3, 4)) in laws
    assert lossiness_s(2, 2, F(1, 4)) == 131072


def test_lossiness_values():
    assert mild_lossiness_estimate(identity_reduction(P2, 1), P2, F(1, 4)).ell == pytest.approx(1.0)
    lr = mild_lossiness_estimate(chi_f_reduction(P2, OR2), P2, F(1, 4))
    assert lr.exhaustive and lr.ell == pytest.approx(0, abs=1e-12)
    assert mild_lossiness_estimate(constant_reduction(P2, 2), P2, F(1, 4)).ell == 0


def test_sampled_lossiness_is_a_lower_bound():
    R = random_lossy_reduction(P2, OR2, F(1, 2), seed=3)
    full = mild_lossiness_estimate(R, P2, F(1, 4), exhaustive=True)
    part = mild_lossiness_estimate(R, P2, F(1, 4), exhaustive=False, budget=500, seed=1)
    assert not part.exhaustive and part.ell <= full.ell + 1e-12


def test_builders_from_json():
    R = reduction_from_json({"builder": "chi-f", "params": {"noise": {"num": 1, "den": 10}}}, P2, OR2)
    assert R.row((0, 0))(1) == F(1, 10)
    dense = reduction_from_json(R.to_json(), P2, OR2)
    assert all(dense.row(t) == R.row(t) for t in R.tuples())
    with pytest.raises(ReductionError):
        reduction_from_json({"builder": "nope"}, P2, OR2)


def test_wc_dist_split_and_pooled():
    R = chi_f_reduction(P2, PermInvariantF.named("or", 1), F(1, 10))
    assert wc_dist_distance(R, P2, split=True).d == 0
    # one law for both sides sits halfway between (9/10, 1/10) and (1/10, 9/10)
    assert wc_dist_distance(R, P2).d == F(2, 5)


def _hint_reduction(leak):
    # query y = x with probability `leak`, else a fixed YES instance; C is the identity circuit
    P = P2

    def kernel(t):
        x = t[0]
        out = {((1,), "id"): 1 - leak}
        out[((x,), "id")] = out.get(((x,), "id"), 0) + leak
        return out
    return TuringReduction(P, 1, P, 1, kernel, {"id": {(0,): 0, (1,): 1}})


def test_turing_reduction_bits():
    RT = _hint_reduction(F(1, 4))
    assert RT.answer_bit_law((0,))(0) == F(1, 4)
    rep = simulated_distinguisher_error(RT, PermInvariantF.named("or", 1))
    assert rep.mu == F(3, 8)
    assert distinguisher_error(RT.as_bit_reduction(), P2, PermInvariantF.named("or", 1)).mu == F(3, 8)
    hint = turing_hint_information(_hint_reduction(0), P2, F(1, 4))
    assert hint.d == 0 and hint.h == 0
