"""Asymptotic parameter choices of the LHY lower bound and their slack exponents.

All scales are tied to the dilute small parameter s (ρa³ in 3D, δ in 2D).
A relation A ≪ B is read as A <= C s^ζ B with C = 1 by default; its slack
exponent is ζ = log(C·B/A)/log(1/s), positive when the relation holds.
Every quantity is carried as a natural logarithm so that s down to 10⁻⁸⁰
and the resulting huge boxes stay representable.
"""
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import AccuracyError, DomainError, SizingError
from .scattering import EULER_GAMMA

RELATION_IDS = (
    "momentum_scale_chain",
    "excitation_cap_vs_v_norm",
    "excitation_cap_vs_lhy",
    "excitation_cap_vs_particles",
    "excitation_cap_vs_high_shell",
    "eps_K_lower_bound",
    "high_excitation_control",
    "gap_fraction_high_momentum",
    "gap_fraction_errors",
    "gap_fraction_low_shell",
    "box_admissibility",
)


def _exp(x):
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def _logsumexp(*xs):
    m = max(xs)
    if m == -math.inf:
        return m
    return m + math.log(math.fsum(math.exp(x - m) for x in xs))


def log_density_from_delta(delta):
    """log(ρa²) = L solving δ = 1/(-L + log(-L)) on the branch L < -1."""
    if not 0 < delta < 1:
        raise DomainError("δ must lie in (0, 1)")
    target = 1.0 / delta
    y = max(1.0 + 1e-12, target - math.log(target))
    for _ in range(100):
        f = y + math.log(y) - target
        step = f / (1.0 + 1.0 / y)
        y = max(1.0 + 1e-15, y - step)
        if abs(step) <= 1e-15 * y:
            break
    return -y


@dataclass(frozen=True)
class PotentialData:
    """Scattering length a, support radius R and ‖v‖₁ of the interaction."""
    a: float
    R: float
    v_l1: float
    potential: object = None

    @classmethod
    def from_potential(cls, v):
        from .scattering import solve_scattering
        # a does not depend on the matching radius used for 2D solves
        sol = solve_scattering(v, R_tilde=None if v.d == 3 else 10 * v.support_radius)
        return cls(sol.a, v.support_radius, v.l1_norm(), v)


@dataclass(frozen=True)
class ParameterSet:
    """Derived parameters and physical auxiliaries, stored as natural logs."""
    d: int
    small_param: float
    K_ell: float
    eps: float
    logs: dict = field(default_factory=dict)
    potential: PotentialData = None

    def value(self, name):
        return _exp(self.logs[name])

    @property
    def K_L(self):
        return self.value("K_L")

    @property
    def K_H(self):
        return self.value("K_H")

    @property
    def M_over_N(self):
        return self.value("M_over_N")

    @property
    def eps_gap(self):
        return self.value("eps_gap")

    @property
    def eps_K(self):
        return self.value("eps_K")

    @property
    def eps_plus(self):
        return self.value("eps_plus")

    @property
    def admissibility_slack(self):
        """Slack exponent of K_ℓ ≪ s^{-1/28} (3D) or s^{-1/26} (2D)."""
        exponent = 1 / 28 if self.d == 3 else 1 / 26
        return exponent - math.log(self.K_ell) / -math.log(self.small_param)

    @property
    def admissible(self):
        return self.admissibility_slack > 0

    def to_dict(self):
        out = {"d": self.d, "small_param": self.small_param, "K_ell": self.K_ell,
               "eps": self.eps}
        for name, lg in self.logs.items():
            out[name] = _exp(lg)
            out["log10_" + name] = lg / math.log(10)
        out["admissibility_slack"] = self.admissibility_slack
        return out


def choice_logs(d, K_ell, eps):
    """Logs of K_L, K_H, 𝓜/N, ε_gap, ε_K fixed by (K_ℓ, ε, d)."""
    lk = math.log(K_ell)
    return {
        "K_L": (4 + 2 * eps) * lk,
        "K_H": (4 + 3 * eps) * lk,
        "M_over_N": (-12 - 10 * eps) * lk,
        "eps_gap": -2 * lk,
        "eps_K": (-18 + 2 * d + (d - 16) * eps) * lk,
    }


def derive_parameters(d, small_param, K_ell, eps, potential):
    """Parameter set for a box of scale K_ℓ at small parameter s.

    ``potential`` is a PotentialData or a RadialPotential; in 2D the density
    follows from inverting the δ(ρa²) relation.
    """
    if d not in (2, 3):
        raise DomainError(f"dimension must be 2 or 3, got {d}")
    if not K_ell > 1:
        raise DomainError("K_ℓ must exceed 1")
    if not 0 < eps < 1:
        raise DomainError("ε must lie in (0, 1)")
    if not 0 < small_param < 1:
        raise DomainError("the small parameter must lie in (0, 1)")
    if not isinstance(potential, PotentialData):
        potential = PotentialData.from_potential(potential)
    if not potential.a > 0:
        raise DomainError("the scattering length must be positive")
    logs = choice_logs(d, K_ell, eps)
    ls = math.log(small_param)
    la = math.log(potential.a)
    if d == 3:
        logs["rho"] = ls - 3 * la
        logs["g0"] = math.log(8 * math.pi) + la
        logs["lambda_lhy"] = 0.5 * ls
    else:
        y = -log_density_from_delta(small_param)
        logs["rho"] = -y - 2 * la
        logs["g0"] = math.log(8 * math.pi) + ls
        logs["lambda_lhy"] = ls
        # log(ℓ_δ/ℓ) in closed form; the two logs are each of order 1/δ
        logs["ell_delta_over_ell"] = 0.5 * math.log(y) + EULER_GAMMA - math.log(2) - 0.5 * (
            2 * math.log(K_ell) - logs["g0"])
    # ℓ²ρ = K_ℓ²/ĝ(0) is kept separately so that no two large logs are subtracted
    logs["ell2_rho"] = 2 * math.log(K_ell) - logs["g0"]
    logs["ell"] = 0.5 * (logs["ell2_rho"] - logs["rho"])
    logs["volume"] = d * logs["ell"]
    logs["N"] = 0.5 * d * logs["ell2_rho"] + (1 - 0.5 * d) * logs["rho"]
    logs["M"] = logs["M_over_N"] + logs["N"]
    logs["eps_plus"] = max(2 * math.log(K_ell) - logs["K_L"], 0.5 * logs["lambda_lhy"])
    logs["R"] = math.log(potential.R)
    logs["v_l1"] = math.log(potential.v_l1) if potential.v_l1 > 0 else -math.inf
    return ParameterSet(d, small_param, K_ell, eps, logs, potential)


@dataclass(frozen=True)
class RelationReport:
    id: str
    log_lhs: float
    log_rhs: float
    slack_exponent: float
    satisfied: bool
    detail: dict = field(default_factory=dict)

    @property
    def lhs(self):
        return _exp(self.log_lhs)

    @property
    def rhs(self):
        return _exp(self.log_rhs)

    def to_dict(self):
        out = asdict(self)
        out.update(lhs=self.lhs, rhs=self.rhs, log10_lhs=self.log_lhs / math.log(10),
                   log10_rhs=self.log_rhs / math.log(10))
        return out


def _report(rid, log_lhs, log_rhs, log_inv_s, C=1.0, detail=None):
    zeta = (math.log(C) + log_rhs - log_lhs) / log_inv_s
    return RelationReport(rid, log_lhs, log_rhs, zeta, zeta > 0, detail or {})


def _chain(rid, links, log_inv_s, C):
    """A chain A ≪ B ≪ ... reported through its tightest link."""
    reports = [_report(rid, lo, hi, log_inv_s, C) for lo, hi in links]
    worst = min(reports, key=lambda r: r.slack_exponent)
    detail = {"link_slacks": [r.slack_exponent for r in reports]}
    return RelationReport(rid, worst.log_lhs, worst.log_rhs, worst.slack_exponent,
                          worst.satisfied, detail)


def error_term_log(p, method="auto", budget=4e8):
    """log of the sum-to-integral error ℰ_d and the method used.

    ``auto`` measures |ĝω(0) - lattice tail sum| when the box is small enough
    to enumerate, and otherwise uses the leading bound shape with unit
    constant: ĝ(0)²K_H/ℓ (3D) or ĝ(0)²(R²/ℓ_δ² + |log(K_Hℓ_δ/ℓ)|) (2D).
    """
    L = p.logs
    d = p.d
    R = p.potential.R
    if method in ("auto", "measured") and p.potential.potential is not None:
        try:
            return _measured_error_log(p, budget), "measured"
        except (SizingError, AccuracyError, OverflowError, ValueError):
            if method == "measured":
                raise
    if d == 3:
        return 2 * L["g0"] + L["K_H"] - L["ell"], "bound_shape"
    # ℓ_δ = R̃e^Γ/2 with log R̃ = log a + 1/(2δ)
    log_ell_delta = math.log(p.potential.a) + 1 / (2 * p.small_param) + EULER_GAMMA - math.log(2)
    log_term = abs(L["K_H"] + L["ell_delta_over_ell"])
    return _logsumexp(2 * L["g0"] + 2 * math.log(R) - 2 * log_ell_delta,
                      2 * L["g0"] + (math.log(log_term) if log_term > 0 else -math.inf)), "bound_shape"


def _measured_error_log(p, budget):
    from .lhy import BoxSpec, tail_sum_vs_gomega
    from .scattering import g_hat_profile, solve_for_density, solve_scattering
    ell = _exp(p.logs["ell"])
    rho = _exp(p.logs["rho"])
    if not (math.isfinite(ell) and rho > 0) or ell > 1e150:
        raise OverflowError("box outside floating-point range")
    v = p.potential.potential
    if p.d == 3:
        sol = solve_scattering(v)
        ell_delta = None
    else:
        sol = solve_for_density(v, rho)
        ell_delta = sol.ell_delta
    box = BoxSpec.from_length(p.d, ell, rho)
    cmp = tail_sum_vs_gomega(g_hat_profile(sol), p.d, box, p.K_H, ell_delta, budget=budget)
    return math.log(cmp.abs_difference + cmp.abs_error_estimate)


def check_relations(p, C=1.0, error_method="auto", extras=False):
    """Slack exponents of the eleven parameter relations (and optional extra checks)."""
    missing = [k for k in ("rho", "ell", "g0", "R", "v_l1", "N", "M") if k not in p.logs]
    if missing:
        raise DomainError("missing auxiliary quantities: " + ", ".join(missing))
    L = p.logs
    d = p.d
    lis = -math.log(p.small_param)
    lk = math.log(p.K_ell)
    out = []
    out.append(_chain("momentum_scale_chain",
                      [(lk, 4 * lk), (4 * lk, L["K_L"]), (L["K_L"], L["K_H"])], lis, C))
    out.append(_report("excitation_cap_vs_v_norm",
                       0.5 * L["ell2_rho"] + 0.5 * L["K_H"] + 0.5 * L["v_l1"], L["M"], lis, C))
    out.append(_report("excitation_cap_vs_lhy",
                       L["ell2_rho"] + L["N"] + L["g0"] + L["lambda_lhy"],
                       L["M"], lis, C))
    out.append(_chain("excitation_cap_vs_particles",
                      [(L["M_over_N"], 4 * (lk - L["K_L"])), (4 * (lk - L["K_L"]), 0.0)], lis, C))
    out.append(_report("excitation_cap_vs_high_shell", L["M_over_N"] + d * L["K_H"], 0.0, lis, C))
    out.append(_report("eps_K_lower_bound",
                       3 * L["ell2_rho"] + (2 - d) * L["ell"] + 4 * L["g0"] - 8 * L["K_H"]
                       + d * L["K_L"] + L["M"], 2 * L["eps_K"], lis, C))
    out.append(_report("high_excitation_control",
                       L["ell2_rho"] + (2 - d) * L["ell"] + 2 * L["g0"] - 2 * L["K_H"]
                       + d * L["K_L"] + L["M"], 2 * lk, lis, C))
    out.append(_report("gap_fraction_high_momentum",
                       3 * L["ell2_rho"] + (2 - d) * L["ell"] + 4 * L["g0"] + (d - 6) * L["K_H"],
                       L["eps_gap"], lis, C))
    log_E, method = error_term_log(p, error_method)
    terms = (L["eps_K"] + L["ell2_rho"] + L["g0"],
             log_E + L["ell2_rho"],
             2 * lk - L["K_H"])
    out.append(_report("gap_fraction_errors", _logsumexp(*terms), L["eps_gap"], lis, C,
                       {"error_term_method": method, "log_error_term": log_E,
                        "log_terms": list(terms)}))
    out.append(_report("gap_fraction_low_shell",
                       L["R"] - L["ell"] + L["K_L"] + L["ell2_rho"] + L["g0"],
                       L["eps_gap"], lis, C))
    exponent = 1 / 28 if d == 3 else 1 / 26
    out.append(_report("box_admissibility", lk, exponent * lis, lis, C))
    if extras:
        out.extend(extra_checks(p, C))
    return out


def extra_checks(p, C=1.0):
    """Side conditions: ε small enough, and the two potential conditions."""
    L = p.logs
    lis = -math.log(p.small_param)
    lk = math.log(p.K_ell)
    ls = math.log(p.small_param)
    power = (-28 - 16 * p.eps) if p.d == 3 else (-26 - 19 * p.eps)
    checks = [_report("epsilon_admissibility", ls, power * lk, lis, C)]
    checks.append(RelationReport("potential_l1_norm", L["v_l1"], math.log(C),
                                 math.nan, L["v_l1"] <= math.log(C)))
    lhs = L["rho"] + L["g0"] + 2 * L["R"]
    checks.append(RelationReport("potential_range", lhs, -9 * lk, math.nan, lhs <= -9 * lk))
    return checks


def all_satisfied(reports):
    return all(r.satisfied for r in reports)


def admissibility_boundary(d, small_param, tol=1e-6):
    """K_ℓ where the box admissibility slack crosses zero, located by bisection in log K_ℓ."""
    lis = -math.log(small_param)
    exponent = 1 / 28 if d == 3 else 1 / 26

    def slack(lk):
        return (exponent * lis - lk) / lis

    lo, hi = 0.0, 2 * exponent * lis
    while hi - lo > tol * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if slack(mid) > 0:
            lo = mid
        else:
            hi = mid
    return math.exp(0.5 * (lo + hi))


def relation_table(reports):
    return [r.to_dict() for r in reports]
