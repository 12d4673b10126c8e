import math
from fractions import Fraction

import pytest

from lossylab.disguise import build_disguising_collection
from lossylab.problems import builtin_problem
from lossylab.reductions import PermInvariantF, chi_f_reduction, mild_lossiness_estimate, p_of_f

GAMMA = Fraction(1, 4)

# filled by tests/test_acceptance.py, printed after the run
ACCEPTANCE = {}


class Fixture:
    """A problem, f, reduction and its disguising collection at γ = 1/4."""

    def __init__(self, noise=0, d=None, seed=5):
        self.problem = builtin_problem("parity", 2)
        self.f = PermInvariantF.named("or", 2)
        self.R = chi_f_reduction(self.problem, self.f, noise)
        self.gamma = GAMMA
        self.eps = GAMMA / 4
        self.d = d or math.ceil((self.f.m + 1) / self.eps)
        self.lossiness = mild_lossiness_estimate(self.R, self.problem, GAMMA, exhaustive=True,
                                                 s_cap=max(self.R.N, self.d + 1))
        self.ell = self.lossiness.ell
        p = p_of_f(self.f)
        self.collection = build_disguising_collection(self.R, self.problem.no, self.problem.yes,
                                                      self.f.m - p, p - 1, self.d, self.eps, self.ell, seed=seed)


@pytest.fixture(scope="session")
def parity_or():
    return Fixture()


@pytest.fixture(scope="session")
def parity_or_noisy():
    return Fixture(noise=Fraction(1, 10))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        ok, note = ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key:>2}: {'PASS' if ok else 'FAIL'}  {note}")
