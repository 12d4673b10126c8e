import math

import pytest

from lossylab.params import (AUX2_QUOTE, ParamError, gap_dichotomy_expression, ksat_params,
                             lossiness_bound_wcdist, regime_check, theta_report, turing_lossiness_bound)


def test_theta_report_frozen():
    rep = theta_report(0.01, 1, 0.05)
    assert rep.delta == pytest.approx(0.5887050112577373, rel=1e-15)
    assert rep.theta_szk == pytest.approx(1.5036675508601085, rel=1e-12)
    assert rep.theta_efi == pytest.approx(-0.9361150337732123, rel=1e-12)
    assert rep.theta_owf == pytest.approx(0.2612949887422627, rel=1e-12)
    assert rep.theta_ows == pytest.approx(-0.20439043620697533, rel=1e-12)
    assert rep.tau_ows == pytest.approx(0.34129498874226266, rel=1e-12)
    assert rep.flags == {"szk": True, "efi": False, "owf": True, "ows": False, "szk_degenerate": False}


def test_theta_degenerate_and_errors():
    rep = theta_report(0, 0, 0)
    assert rep.theta_szk is None and rep.flags["szk_degenerate"] and rep.notes
    with pytest.raises(ParamError):
        theta_report(0.5, 1, 0.1)
    with pytest.raises(ParamError):
        theta_report(0.1, -1, 0.1)
    assert "theta_owf" in rep.table()


def test_lossiness_bounds():
    assert lossiness_bound_wcdist(2, 16, 0.001, 0.1) == pytest.approx(8.034215715337913, rel=1e-12)
    assert lossiness_bound_wcdist(1, 4, 0, 0.5) == 1.0
    assert turing_lossiness_bound(2, 16, 0.001, 0.1, 3) == pytest.approx(10.034215715337913, rel=1e-12)
    with pytest.raises(ParamError):
        lossiness_bound_wcdist(1, 4, 0.1, 0)


def test_gap_dichotomy_is_negative():
    expr = gap_dichotomy_expression()
    assert expr == pytest.approx(2 ** -15 - 1e-4 - 1e-5, rel=1e-12)
    assert expr < 0
    flags = regime_check(1, 1, 1e-5, 1e-5, 13, 16, d=(1e-15 / 32) ** 0.5)
    assert flags["gap-dichotomy"].satisfied
    assert flags["gap-dichotomy"].values["sign"] == -1


def test_aux2_refusal():
    flags = regime_check(0.5, 3, 0.1, 0.01, 2, 16)
    assert not flags["aux-2"].satisfied
    assert AUX2_QUOTE in flags["aux-2"].binding[0]
    assert not any(f.satisfied for f in flags.values())


def test_large_mu_fails_the_owf_regimes():
    flags = regime_check(1, 1, 0.4, 0.01, 2, 16)
    assert flags["aux-2"].satisfied
    assert not flags["generic-lossy-owf"].satisfied and not flags["lossy-to-owf"].satisfied


def test_fine_grained_regimes():
    flags = regime_check(10, 10, 1e-6, 1e-6, 5, 1024, d=1e-9, eta=0.5, tau=30, tau_pi=400)
    assert flags["gap-to-fgowf"].values["exponent"] == pytest.approx(20)
    assert flags["no-owf-lossy"].values["tau"] == pytest.approx(400 / math.log2(10) - 10)
    with pytest.raises(ParamError):
        regime_check(10, 10, 1e-6, 1e-6, 5, 1024, d=1e-9, eta=0, tau=30)


def test_ksat_params():
    kp = ksat_params(3, 0.5, 1024)
    assert kp.tau == pytest.approx(51.2) and kp.distance_ceiling is None
    assert ksat_params(3, 0.5, 1024, m=4).log2_distance_ceiling == pytest.approx(5 + 10 - 76.8)
    with pytest.raises(ParamError):
        ksat_params(3, 0, 1024)
    with pytest.raises(ParamError):
        ksat_params(3, 7, 1024)
