"""Threshold calculus: δ and θ values, WC-DIST lossiness bounds, regime checks, kSAT instantiation.

Pure arithmetic on floats. Differences of the form 1 - δ are formed without
cancellation so that tiny thresholds keep full relative precision.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional

from .disguise import delta_of, one_minus_delta


class ParamError(ValueError):
    pass


AUX2_QUOTE = "must have runtime Ω(m)"


def _check_common(mu, gamma, lam):
    if not 0 <= mu < 0.5:
        raise ParamError(f"mu = {mu} outside [0, 1/2)")
    if gamma < 0:
        raise ParamError(f"gamma = {gamma} must be nonnegative")
    if lam < 0:
        raise ParamError(f"lambda = {lam} must be nonnegative")


@dataclass
class ParameterReport:
    inputs: Dict
    delta: float
    one_minus_delta: float
    theta_szk: Optional[float]
    theta_efi: float
    theta_owf: float
    theta_ows: float
    tau_ows: float
    flags: Dict[str, bool] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return asdict(self)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2, ensure_ascii=False)

    def table(self) -> str:
        rows = [("input " + k, v) for k, v in sorted(self.inputs.items())]
        rows += [("delta", self.delta), ("1 - delta", self.one_minus_delta),
                 ("theta_szk", "degenerate" if self.theta_szk is None else self.theta_szk),
                 ("theta_efi", self.theta_efi), ("theta_owf", self.theta_owf),
                 ("theta_ows", self.theta_ows), ("tau_ows", self.tau_ows)]
        rows += [("flag " + k, v) for k, v in sorted(self.flags.items())]
        width = max(len(k) for k, _ in rows)
        lines = [f"{k.ljust(width)}  {_fmt(v)}" for k, v in rows]
        lines += ["note: " + n for n in self.notes]
        return "\n".join(lines)


def _fmt(v) -> str:
    if isinstance(v, bool) or v is None:
        return str(v)
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def theta_report(mu, lam, gamma, m: int = 1, n: Optional[int] = None, T: str = "T", eta=None) -> ParameterReport:
    """All five thresholds for (μ, λ, γ); λ is the per-coordinate lossiness."""
    mu, lam, gamma = float(mu), float(lam), float(gamma)
    _check_common(mu, gamma, lam)
    d = delta_of(lam, 1)
    omd = one_minus_delta(lam, 1)
    alpha = d + gamma
    theta_szk = None if alpha == 0 else (1 - 2 * mu) ** 2 / alpha
    theta_efi = (1 - 2 * mu) - 3 * alpha
    theta_owf = (omd - 10 * mu) - gamma
    theta_ows = (omd - gamma) - 4 * math.sqrt(2 * mu)
    tau_ows = (omd - 2 * mu) - gamma
    rep = ParameterReport({"mu": mu, "lambda": lam, "gamma": gamma, "m": m, "n": n, "T": T, "eta": eta},
                          d, omd, theta_szk, theta_efi, theta_owf, theta_ows, tau_ows)
    rep.flags = {"szk": theta_szk is not None and theta_szk > 1, "efi": theta_efi > 0, "owf": theta_owf > 0,
                 "ows": theta_ows > 0 and tau_ows > 0, "szk_degenerate": theta_szk is None}
    if theta_szk is None:
        rep.notes.append("delta + gamma = 0: theta_szk is unbounded")
    return rep


def lossiness_bound_wcdist(m, n, d, gamma) -> float:
    """λ = max{1, 13 + log2(m n d² / γ³)}; d = 0 gives 1."""
    if gamma <= 0:
        raise ParamError("gamma must be positive")
    if d < 0:
        raise ParamError("d must be nonnegative")
    if d == 0:
        return 1.0
    return max(1.0, 13 + math.log2(m * n * d * d / gamma ** 3))


def turing_lossiness_bound(m, n, d, gamma, h) -> float:
    """λ = max{1 + h, 13 + h + log2(n d² / γ³)}; m only enters through the hint length h."""
    if gamma <= 0:
        raise ParamError("gamma must be positive")
    if h < 0 or d < 0:
        raise ParamError("h and d must be nonnegative")
    if d == 0:
        return 1.0 + h
    return max(1.0 + h, 13 + h + math.log2(n * d * d / gamma ** 3))


@dataclass
class RegimeFlag:
    satisfied: bool
    binding: List[str]
    values: Dict

    def to_json(self) -> dict:
        return asdict(self)


def _le(name, lhs, rhs, out):
    ok = lhs <= rhs * (1 + 1e-12) if rhs > 0 else lhs <= rhs
    out.append(f"{name}: {lhs:.6g} <= {rhs:.6g} [{'ok' if ok else 'violated'}]")
    return ok


def regime_check(T_exponent, m_exponent, mu, gamma, lam, n, d=None, eta=None, tau=None, tau_pi=None,
                 constant: float = 1.0) -> Dict[str, RegimeFlag]:
    """Hypothesis checks per theorem. Runtimes are given as log2 exponents (T = 2^T_exponent).

    `constant` instantiates the hidden constant in 2^{O(·)} bounds; `tau` is the
    hardness exponent for the fine-grained statements and `tau_pi` the exact
    hardness for the impossibility statement. No hardness is asserted.
    """
    mu, gamma, lam = float(mu), float(gamma), float(lam)
    out: Dict[str, RegimeFlag] = {}
    logn = math.log2(n)
    m = 2.0 ** m_exponent
    # aux-2: constant-bounded error forces runtime linear in m
    if mu < 0.5 and T_exponent < m_exponent:
        msg = f"runtime 2^{T_exponent} is sublinear in m = 2^{m_exponent}: an f-reduction with error bounded away from 1/2 {AUX2_QUOTE}"
        refused = RegimeFlag(False, [msg], {"T_exponent": T_exponent, "m_exponent": m_exponent})
        for key in ("generic-lossy-owf", "lossy-to-owf", "gap-dichotomy", "gap-to-fgowf", "no-owf-lossy"):
            out[key] = refused
        out["aux-2"] = RegimeFlag(False, [msg], {"refused": True})
        return out
    out["aux-2"] = RegimeFlag(True, ["runtime at least linear in m"], {"refused": False})

    # generic-lossy-owf: T, m = 2^{O(λ + log n)}, μ ≤ 2^{-λ-8}, γ = 2^{-λ-4}
    b: List[str] = []
    budget = constant * (lam + logn)
    ok = _le("T exponent", T_exponent, budget, b) & _le("m exponent", m_exponent, budget, b)
    ok &= _le("mu", mu, 2.0 ** (-lam - 8), b)
    ok &= _le("gamma", gamma, 2.0 ** (-lam - 4), b)
    th = theta_report(min(mu, 0.4999), lam, gamma).theta_owf
    ok &= th >= 2.0 ** (-lam - 3) * (1 - 1e-12)
    b.append(f"theta_owf = {th:.6g} >= 2^(-lambda-3) = {2.0 ** (-lam - 3):.6g}")
    out["generic-lossy-owf"] = RegimeFlag(bool(ok), b, {"theta_owf": th})

    # lossy-to-owf: same with γ fixed to 2^{-λ-4}
    b = []
    ok = _le("T exponent", T_exponent, budget, b) & _le("m exponent", m_exponent, budget, b)
    ok &= _le("mu", mu, 2.0 ** (-lam - 8), b)
    th2 = theta_report(min(mu, 0.4999), lam, 2.0 ** (-lam - 4)).theta_owf
    b.append("assumed: no 2^{O(lambda + log n)}-time solver for the problem")
    out["lossy-to-owf"] = RegimeFlag(bool(ok and th2 > 0), b, {"theta_owf": th2, "gamma": 2.0 ** (-lam - 4)})

    # gap-dichotomy: d² ≤ γ³/(mn), μ, γ ≤ 1e-5; θ_owf is evaluated as written, sign included
    b = []
    if d is None:
        out["gap-dichotomy"] = RegimeFlag(False, ["distance d not supplied"], {})
    else:
        ok = _le("d^2", float(d) ** 2, gamma ** 3 / (m * n), b)
        ok &= _le("mu", mu, 1e-5, b) & _le("gamma", gamma, 1e-5, b)
        lam_wc = lossiness_bound_wcdist(m, n, float(d), gamma) if gamma > 0 else float("inf")
        lam_cap = min(lam_wc, 13.0) if ok else lam_wc
        expr = (one_minus_delta(lam_cap, 1) - 10 * mu) - gamma
        b.append(f"theta_owf >= (1-10mu) - (delta(lambda) + gamma) = {expr:.12g} ({'positive' if expr > 0 else 'NOT positive'})")
        out["gap-dichotomy"] = RegimeFlag(bool(ok), b, {"lambda": lam_cap, "theta_owf_expression": expr,
                                                        "sign": 1 if expr > 0 else -1 if expr < 0 else 0})

    # gap-to-fgowf: μ ≤ 1e-5, d ≤ m^2.5 n / 2^{1.5τ/(1+η)}, T, m = O(2^{τ/(1+η)})
    b = []
    if tau is None or eta is None or d is None:
        out["gap-to-fgowf"] = RegimeFlag(False, ["tau, eta and d required"], {})
    else:
        if eta <= 0:
            raise ParamError("eta must be positive")
        e = tau / (1 + eta)
        ok = _le("mu", mu, 1e-5, b)
        log_dmax = 2.5 * m_exponent + logn - 1.5 * e
        ok &= _le("log2 d", math.log2(d) if d > 0 else -math.inf, log_dmax, b)
        ok &= _le("T exponent", T_exponent, e + math.log2(constant), b)
        ok &= _le("m exponent", m_exponent, e + math.log2(constant), b)
        out["gap-to-fgowf"] = RegimeFlag(bool(ok), b, {"log2_d_ceiling": log_dmax, "exponent": e})

    # no-owf-lossy: lossiness ≤ m(τ_Π/log log n − log n), μ ≤ 2^{-τ_Π-8}
    b = []
    if tau_pi is None:
        out["no-owf-lossy"] = RegimeFlag(False, ["tau_pi not supplied"], {})
    else:
        loglog = math.log2(logn) if logn > 1 else float("nan")
        tau_sub = tau_pi / loglog - logn
        ok = _le("lambda", lam, tau_sub, b) & _le("mu", mu, 2.0 ** (-tau_pi - 8), b)
        b.append(f"substitution tau = tau_pi/loglog n - log n = {tau_sub:.6g}; conclusion T = 2^Omega({tau_pi / loglog:.6g})")
        out["no-owf-lossy"] = RegimeFlag(bool(ok), b, {"tau": tau_sub, "runtime_exponent": tau_pi / loglog})
    return out


def gap_dichotomy_expression(mu=1e-5, gamma=1e-5, lam=13.0) -> float:
    """(1 - 10μ) - (δ(λ) + γ) without cancellation; 2^-15 - 1e-4 - 1e-5 at the defaults."""
    return (one_minus_delta(lam, 1) - 10 * mu) - gamma


@dataclass
class KsatParams:
    k: int
    s_star: float
    n: int
    eta: float
    tau: float
    runtime_exponent: float
    log2_distance_ceiling: Optional[float]
    distance_ceiling: Optional[float]
    expression: str

    def to_json(self) -> dict:
        return asdict(self)


def ksat_params(k: int, s_star, n: int, eta=0.0, s_k=None, m=None) -> KsatParams:
    """τ = s* n / log2 n and the ceilings d ≤ m^2.5 n / 2^{1.5τ/(1+η)}, T, m = O(2^{τ/(1+η)})."""
    s_star = float(s_star)
    if not 0 < s_star <= 2 * k:
        raise ParamError(f"s_star = {s_star} outside (0, 2k]")
    if s_k is not None and not s_star <= 2 * k * float(s_k):
        raise ParamError(f"s_star = {s_star} exceeds 2k s_k = {2 * k * float(s_k)}")
    if n < 2 or eta < 0:
        raise ParamError("need n >= 2 and eta >= 0")
    tau = s_star * n / math.log2(n)
    e = tau / (1 + eta)
    if m is not None:
        log_d = 2.5 * math.log2(m) + math.log2(n) - 1.5 * e
        dmax = 2.0 ** log_d if log_d > -1000 else 0.0
    else:
        log_d = dmax = None
    expr = f"d <= m^2.5 * {n} / 2^({1.5 * e:.6g}),  T, m = O(2^{e:.6g})"
    return KsatParams(k, s_star, n, float(eta), tau, e, log_d, dmax, expr)
