"""The time map T and the scalar invariants that pin down the curve ends.

For an admissible amplitude alpha, T(alpha) is the singular integral

    T(alpha) = (1/sqrt(2)) * integral_0^alpha (F(alpha) - F(u))^(-1/2) du,

whose square is the load lambda of the positive solution with sup-norm
alpha.  Its derivative is computed from the analytic form

    T'(alpha) = (1/(2 sqrt(2) alpha)) *
                integral_0^alpha (theta(alpha) - theta(u)) / B^(3/2) du,

with B = F(alpha) - F(u); the numerator vanishes at u = alpha like
theta'(alpha) * (alpha - u), which keeps the integrand integrable.  All
integrands here receive exact endpoint offsets from the quadrature and
switch to a local Taylor form inside a relative distance of 1e-6 from the
singular endpoint, avoiding both catastrophic cancellation in F(alpha) -
F(u) and denominator underflow.

The curve-end invariants:

* ``lambda_hat``   -- squared limit of T at the left end of its domain;
* ``big_G``        -- the signed improper integral whose sign separates
                      dipping curves from monotone increasing ones;
* ``kappa``        -- squared limit of T at the right end.

Branch selection for lambda_hat and kappa follows numeric limit probes of
g = f/u (and endpoint ratios of f), with explicit user overrides taking
precedence, since slowly varying limits can defeat any fixed cutoff.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .analysis import Landmarks, Nonlinearity
from .calculus import (estimate_limit_at_infinity, estimate_limit_at_zero,
                       integrate)
from .errors import BranchUnresolvedError, QuadratureError, TimeMapDomainError

__all__ = ["TimeMapPoint", "GResult", "KappaResult", "CurveEndpoints",
           "time_map", "time_map_derivative", "time_map_second_derivative",
           "lambda_hat", "big_G", "kappa", "compute_endpoints"]

_SQRT2 = math.sqrt(2.0)

# kappa extrapolation ladder per the grid rule: 2^-k fractions (finite end)
# or powers of two (infinite end), k = 4..14
_KAPPA_KS = range(4, 15)

LOG_PROBE_WARNING = (
    "finite-kappa branch selected from the log-weighted endpoint probe "
    "lim f(u)/((beta2-u)(-ln(beta2-u))^tau) in (0, inf]; note that an "
    "alternative statement of this finiteness rule requires the same limit "
    "to be 0, which would conflict with the linear-ratio rule used for the "
    "infinite-kappa branch; this implementation keeps the (0, inf] form")


@dataclass
class TimeMapPoint:
    """One sample of the curve: amplitude, T, optional T', and lambda = T^2."""

    alpha: float
    T: float
    T_prime: float | None
    lam: float


# --------------------------------------------------------------------------
# integrand builders (offset-aware; see module docstring)

def _rel_switch(alpha: float) -> float:
    return 1e-6 * alpha


def _time_integrand(nl: Nonlinearity, alpha: float, at_eta: bool):
    """1/sqrt(B) with B = F(alpha)-F(u), or -F(u) when alpha is the
    zero-energy level (exact zero of F up to root tolerance)."""
    Falpha = 0.0 if at_eta else float(nl.F(alpha))
    fa = float(nl.f(alpha))
    fpa = float(nl.fp(alpha))
    fppa = float(nl.fpp(alpha))
    d_switch = _rel_switch(alpha)

    def integrand(u, da, db):
        out = np.empty_like(u)
        direct = db > d_switch
        ud = u[direct]
        with np.errstate(all="ignore"):
            B = Falpha - np.asarray(nl.F(ud))
            out[direct] = 1.0 / np.sqrt(B)
            d = db[~direct]
            B_per_d = fa - d * (0.5 * fpa - d * fppa / 6.0)
            out[~direct] = 1.0 / (np.sqrt(B_per_d) * np.sqrt(d))
        return out

    return integrand


def _slope_integrand(nl: Nonlinearity, alpha: float, at_eta: bool):
    """(theta(alpha) - theta(u)) / B^(3/2) with the same endpoint handling."""
    Falpha = 0.0 if at_eta else float(nl.F(alpha))
    fa = float(nl.f(alpha))
    fpa = float(nl.fp(alpha))
    fppa = float(nl.fpp(alpha))
    th_a = float(nl.theta(alpha))
    tp_a = float(nl.theta_prime(alpha))
    tpp_a = float(nl.theta_pp(alpha))
    d_switch = _rel_switch(alpha)

    def integrand(u, da, db):
        out = np.empty_like(u)
        direct = db > d_switch
        ud = u[direct]
        with np.errstate(all="ignore"):
            B = Falpha - np.asarray(nl.F(ud))
            num = th_a - nl.theta(ud)
            out[direct] = num / B ** 1.5
            d = db[~direct]
            B_per_d = fa - d * (0.5 * fpa - d * fppa / 6.0)
            num_per_d = tp_a - 0.5 * d * tpp_a
            out[~direct] = num_per_d / (B_per_d ** 1.5 * np.sqrt(d))
        return out

    return integrand


# --------------------------------------------------------------------------

def _check_domain(nl: Nonlinearity, lm: Landmarks, alpha: float) -> None:
    if lm.eta is None:
        raise TimeMapDomainError(
            f"T({alpha:g}) is not well-defined: F has no zero, so there is "
            f"no admissible amplitude range ({lm.curve_missing_reason})")
    if not (lm.eta < alpha < lm.beta2):
        raise TimeMapDomainError(
            f"T({alpha:g}) may not be well-defined outside the admissible "
            f"range ({lm.eta:.12g}, {lm.beta2:.12g})")
    us = alpha * np.linspace(1.0 / 64.0, 1.0 - 1.0 / 64.0, 31)
    B = float(nl.F(alpha)) - np.asarray(nl.F(us))
    if np.any(B <= 0.0):
        bad = float(us[np.argmin(B)])
        raise TimeMapDomainError(
            f"T({alpha:g}) is not well-defined: F(alpha) - F(u) <= 0 at "
            f"u = {bad:.6g}")


def time_map(nl: Nonlinearity, lm: Landmarks, alpha: float,
             tol: float = 1e-10) -> TimeMapPoint:
    """Evaluate T(alpha) for alpha strictly inside the admissible range."""
    alpha = float(alpha)
    _check_domain(nl, lm, alpha)
    r = integrate(_time_integrand(nl, alpha, at_eta=False), 0.0, alpha,
                  tol=tol, endpoint_singular="both")
    if r.diverged_to is not None:
        raise QuadratureError(
            f"time-map integral unexpectedly divergent at alpha={alpha:g}",
            r.partial_sums)
    # near a finite right end the integral is huge and its absolute error
    # estimate plateaus on rounding noise; accept on relative accuracy too
    if not r.converged and r.abs_error_estimate > max(
            1e3 * tol, 3e-8 * (1.0 + abs(r.value))):
        raise QuadratureError(
            f"time-map integral did not converge at alpha={alpha:g} "
            f"(error estimate {r.abs_error_estimate:.3g})", r.partial_sums)
    T = r.value / _SQRT2
    return TimeMapPoint(alpha=alpha, T=T, T_prime=None, lam=T * T)


def time_map_derivative(nl: Nonlinearity, lm: Landmarks, alpha: float,
                        tol: float = 1e-9) -> float:
    """Evaluate T'(alpha) from the analytic derivative integral."""
    alpha = float(alpha)
    _check_domain(nl, lm, alpha)
    r = integrate(_slope_integrand(nl, alpha, at_eta=False), 0.0, alpha,
                  tol=tol, endpoint_singular="both")
    if r.diverged_to is not None:
        raise QuadratureError(
            f"derivative integral divergent at alpha={alpha:g}",
            r.partial_sums)
    if not r.converged and r.abs_error_estimate > max(
            1e3 * tol, 3e-8 * (1.0 + abs(r.value))):
        raise QuadratureError(
            f"derivative integral did not converge at alpha={alpha:g}",
            r.partial_sums)
    return r.value / (2.0 * _SQRT2 * alpha)


def time_map_second_derivative(nl: Nonlinearity, lm: Landmarks, alpha: float,
                               tol: float = 1e-8) -> float:
    """Diagnostic-grade T''(alpha) from its analytic integral.

    The integrand is (3A^2 - 4AB - 2BC)/B^(5/2) with A = alpha f(alpha) -
    u f(u), B = F(alpha) - F(u), C = alpha^2 f'(alpha) - u^2 f'(u); the
    numerator vanishes to second order at u = alpha.  Inside the endpoint
    window the leading coefficient of that double zero is used directly.
    Intended as a diagnostic; derived quantities in this package use finite
    differences of T' instead.
    """
    alpha = float(alpha)
    _check_domain(nl, lm, alpha)
    Falpha = float(nl.F(alpha))
    fa = float(nl.f(alpha))
    fpa = float(nl.fp(alpha))
    fppa = float(nl.fpp(alpha))
    afa = alpha * fa
    a2fpa = alpha * alpha * fpa
    a1 = fa + alpha * fpa                       # d(u f)/du at alpha
    c1 = 2.0 * alpha * fpa + alpha * alpha * fppa
    lead = 3.0 * a1 * a1 - 4.0 * a1 * fa - 2.0 * fa * c1
    d_switch = _rel_switch(alpha)

    def integrand(u, da, db):
        out = np.empty_like(u)
        direct = db > d_switch
        ud = u[direct]
        with np.errstate(all="ignore"):
            A = afa - ud * nl.f.many(np.ascontiguousarray(ud))
            B = Falpha - np.asarray(nl.F(ud))
            C = a2fpa - ud * ud * nl.fp.many(np.ascontiguousarray(ud))
            out[direct] = (3.0 * A * A - 4.0 * A * B - 2.0 * B * C) / B ** 2.5
            d = db[~direct]
            out[~direct] = lead / (fa ** 2.5 * np.sqrt(d))
        return out

    r = integrate(integrand, 0.0, alpha, tol=tol, endpoint_singular="both")
    if r.diverged_to is not None:
        raise QuadratureError(
            f"second-derivative integral divergent at alpha={alpha:g}",
            r.partial_sums)
    return r.value / (4.0 * _SQRT2 * alpha * alpha)


# --------------------------------------------------------------------------
# lambda_hat

def lambda_hat(nl: Nonlinearity, lm: Landmarks, tol: float = 1e-10,
               overrides: dict[str, str] | None = None):
    """Squared limit of T at the left end: a finite value or infinity.

    Branch rules: a limit of u^p g(u) in [-inf, 0) for some p in (0, 1)
    gives a finite value, computed as half the square of the integral of
    (-F)^(-1/2) over (0, eta); a limit of g(u) in (-inf, 0] gives infinity.

    Returns (value, abs_error, branch_tag).
    """
    overrides = overrides or {}
    if lm.eta is None:
        raise TimeMapDomainError("lambda_hat undefined: no zero of F")

    finite_branch = False
    tag = ""
    ov_upg = overrides.get("upg0")
    ov_g0 = overrides.get("g0")
    if ov_upg in ("neg-inf", "neg-divergent", "finite-neg"):
        finite_branch = True
        tag = f"override upg0={ov_upg}"
    elif ov_g0 in ("neg-inf", "neg-divergent"):
        # a negatively divergent g forces u^p g into [-inf, 0) as well
        finite_branch = True
        tag = f"override g0={ov_g0}"
    elif ov_upg is None and ov_g0 is None:
        for p in (0.9, 0.5, 0.1):
            est = estimate_limit_at_zero(lambda u, p=p: u ** p * float(nl.g(u)))
            if est.negative_bounded_away():
                finite_branch = True
                tag = f"lim u^{p:g} g(u) in [-inf, 0)"
                break

    if not finite_branch:
        if ov_g0 in ("zero", "finite-neg", "neg-finite"):
            return math.inf, None, f"override g0={ov_g0}"
        if ov_g0 is not None or ov_upg is not None:
            raise BranchUnresolvedError(
                "the supplied limit overrides do not select a lambda_hat "
                "branch")
        est0 = estimate_limit_at_zero(lambda u: float(nl.g(u)))
        if est0.kind == "zero" or (est0.kind == "finite"
                                   and est0.value is not None
                                   and est0.value <= 1e-8):
            return math.inf, None, "lim g(u) in (-inf, 0]"
        raise BranchUnresolvedError(
            "cannot classify the lambda_hat branch: limit probes of u^p g "
            "and g at 0+ were inconclusive (use --assert-limit to override)")

    r = integrate(_time_integrand(nl, lm.eta, at_eta=True), 0.0, lm.eta,
                  tol=tol, endpoint_singular="both")
    if r.diverged_to is not None or (not r.converged
                                     and r.abs_error_estimate > 1e-6):
        raise QuadratureError("lambda_hat integral did not converge",
                              r.partial_sums)
    value = 0.5 * r.value * r.value
    return value, r.value * r.abs_error_estimate, tag


# --------------------------------------------------------------------------
# big G

@dataclass
class GResult:
    """Signed improper integral controlling the initial slope of the curve.

    ``certified_by`` names the sufficient condition that already forces a
    negative sign, when one applies; the numeric value (possibly -inf when
    the integral diverges) is still reported.
    """

    value: float
    abs_error: float
    certified_by: str | None
    converged: bool

    @property
    def negative(self) -> bool:
        if self.certified_by is not None:
            return True
        if math.isinf(self.value):
            return self.value < 0
        return self.value < -max(self.abs_error, 0.0)

    @property
    def nonnegative(self) -> bool:
        return not self.negative


def big_G(nl: Nonlinearity, lm: Landmarks, tol: float = 1e-9,
          overrides: dict[str, str] | None = None) -> GResult:
    """Compute G, first trying the sufficient conditions for G < 0.

    The shortcuts: (a) f(eta) - eta f'(eta) <= 0; (b) lim u^(1/3) f(u)
    bounded below; (c) f bounded at 0.  Any hit certifies the sign.

    The boundedness probe in (b)/(c) also decides the value: when
    u^(1/3) f(u) stays bounded below, -F(u) vanishes at least like u^(2/3)
    while the numerator tends to the negative constant theta(eta), so the
    integral provably diverges to -inf; in that case -inf is returned
    outright rather than relying on the quadrature to blow up through the
    rounding noise of F near 0.
    """
    overrides = overrides or {}
    if lm.eta is None:
        raise TimeMapDomainError("G undefined: no zero of F")
    eta = lm.eta

    certified = None
    tp_eta = float(nl.theta_prime(eta))
    if tp_eta <= 1e-9 * (1.0 + abs(float(nl.f(eta)))):
        certified = "slope-at-eta (theta'(eta) <= 0)"

    # left-end behaviour: bounded u^(1/3) f forces divergence to -inf
    ov_f0 = overrides.get("f0")
    ov_u13 = overrides.get("u13f0")
    if ov_f0 in ("finite", "zero", "finite-neg", "neg-finite"):
        left_divergent = True
        left_reason = "f bounded at 0 (override)"
    elif ov_u13 in ("finite", "zero", "pos-inf"):
        left_divergent = True
        left_reason = "u^(1/3) f bounded below (override)"
    elif ov_f0 is not None or ov_u13 is not None:
        left_divergent = False
        left_reason = None
    else:
        est_f0 = estimate_limit_at_zero(lambda u: float(nl.f(u)))
        if est_f0.kind in ("finite", "zero"):
            left_divergent = True
            left_reason = "f bounded at 0"
        else:
            est_13 = estimate_limit_at_zero(
                lambda u: u ** (1.0 / 3.0) * float(nl.f(u)))
            left_divergent = est_13.kind in ("finite", "zero", "pos_infinite")
            left_reason = ("u^(1/3) f bounded below"
                           if left_divergent else None)

    if left_divergent:
        return GResult(value=-math.inf, abs_error=0.0,
                       certified_by=certified or left_reason, converged=True)

    r = integrate(_slope_integrand(nl, eta, at_eta=True), 0.0, eta,
                  tol=tol, endpoint_singular="both")
    if r.diverged_to is not None:
        return GResult(value=math.copysign(math.inf, r.diverged_to),
                       abs_error=0.0, certified_by=certified, converged=True)
    if not r.converged and r.abs_error_estimate > 1e-6:
        if certified is not None:
            return GResult(value=r.value, abs_error=r.abs_error_estimate,
                           certified_by=certified, converged=False)
        raise QuadratureError(
            "G integral inconclusive: neither converged nor certified "
            "negative by a shortcut rule", r.partial_sums)
    return GResult(value=r.value, abs_error=r.abs_error_estimate,
                   certified_by=certified, converged=r.converged)


# --------------------------------------------------------------------------
# kappa

@dataclass
class KappaResult:
    """Squared limit of T at the right end of its domain.

    kind is one of zero / finite / infinite; for the finite kind the value
    is obtained by extrapolating T toward the endpoint and carries the last
    extrapolation increment as its error bar.
    """

    kind: str
    value: float
    error_bar: float | None
    branch: str
    log_probe_fired: bool = False


def _extrapolate_T(nl: Nonlinearity, lm: Landmarks, alphas: list[float],
                   tol: float) -> tuple[float, float]:
    values = [time_map(nl, lm, a, tol=tol).T for a in alphas]
    extrapolated = values[-1]
    for i in range(len(values) - 3, -1, -1):
        a, b, c = values[i], values[i + 1], values[i + 2]
        d2 = c - 2.0 * b + a
        if d2 != 0.0:
            extrapolated = c - (c - b) ** 2 / d2
            break
    increment = abs(values[-1] - values[-2]) if len(values) >= 2 else math.inf
    return extrapolated, increment


def kappa(nl: Nonlinearity, lm: Landmarks, tau: float = 3.0,
          overrides: dict[str, str] | None = None,
          tol: float = 1e-10) -> KappaResult:
    """Classify and (when finite) extrapolate the right-end limit of T^2."""
    overrides = overrides or {}
    if lm.eta is None:
        raise TimeMapDomainError("kappa undefined: no zero of F")
    beta2 = lm.beta2

    if math.isfinite(beta2):
        ov = overrides.get("fb2")
        if ov in ("finite", "zero", "finite-pos"):
            linear_vanishing = True
        elif ov in ("pos-inf", "pos-divergent"):
            linear_vanishing = False
        else:
            delta0 = min(1e-2, (beta2 - lm.beta1) / 100.0)
            est = estimate_limit_at_zero(
                lambda d: float(nl.f(beta2 - d)) / d, start=delta0)
            linear_vanishing = est.kind in ("finite", "zero")
        if linear_vanishing:
            return KappaResult("infinite", math.inf, None,
                               "lim f/(beta2-u) in [0, inf)")
        ov2 = overrides.get("fb2log")
        if ov2 in ("pos-inf", "pos-divergent", "finite", "finite-pos"):
            log_branch = True
        elif ov2 is not None:
            log_branch = False
        else:
            delta0 = min(1e-2, (beta2 - lm.beta1) / 100.0)
            est2 = estimate_limit_at_zero(
                lambda d: float(nl.f(beta2 - d)) / (d * (-math.log(d)) ** tau),
                start=delta0)
            log_branch = est2.positive_unbounded_trend() or (
                est2.kind == "finite" and est2.value is not None
                and est2.value > 0)
        if log_branch:
            alphas = [beta2 - beta2 * 2.0 ** (-k) for k in _KAPPA_KS
                      if beta2 - beta2 * 2.0 ** (-k) > lm.eta * (1 + 1e-9)]
            if len(alphas) < 4:
                raise BranchUnresolvedError(
                    "kappa extrapolation ladder does not fit between eta "
                    "and beta2")
            Tinf, inc = _extrapolate_T(nl, lm, alphas, tol)
            return KappaResult("finite", Tinf * Tinf,
                               2.0 * abs(Tinf) * inc,
                               f"log-weighted endpoint ratio (tau={tau:g})",
                               log_probe_fired=True)
        raise BranchUnresolvedError(
            "kappa branch unresolved at finite beta2 (use --assert-limit "
            "fb2=... or fb2log=... to override)")

    # beta2 infinite: classify by the limit of g
    ov = overrides.get("ginf")
    if ov is not None:
        if ov == "zero":
            return KappaResult("infinite", math.inf, None, "override ginf=zero")
        if ov in ("pos-inf", "pos-divergent"):
            return KappaResult("zero", 0.0, None, "override ginf=pos-inf")
        if ov in ("finite", "finite-pos"):
            est = None
        else:
            raise BranchUnresolvedError(f"override ginf={ov} not usable")
    else:
        est = estimate_limit_at_infinity(lambda u: float(nl.g(u)))
        if est.kind == "zero":
            return KappaResult("infinite", math.inf, None, "lim g = 0")
        if est.kind == "pos_infinite" or (est.kind == "inconclusive"
                                          and est.positive_unbounded_trend()
                                          and est.samples[-1][1] > 1e3):
            return KappaResult("zero", 0.0, None, "lim g = inf")
        if not (est.kind == "finite" and est.value is not None
                and est.value > 0):
            raise BranchUnresolvedError(
                "kappa branch unresolved at infinite beta2 (use "
                "--assert-limit ginf=... to override)")
    alphas = [float(2 ** k) for k in _KAPPA_KS
              if 2 ** k > lm.eta * (1 + 1e-9)]
    Tinf, inc = _extrapolate_T(nl, lm, alphas, tol)
    return KappaResult("finite", Tinf * Tinf, 2.0 * abs(Tinf) * inc,
                       "lim g in (0, inf)")


# --------------------------------------------------------------------------

@dataclass
class CurveEndpoints:
    """lambda coordinates of the two curve ends plus the sign integral G."""

    lambda_hat: float
    lambda_hat_err: float | None
    lambda_hat_branch: str
    kappa_kind: str
    kappa: float
    kappa_err: float | None
    kappa_branch: str
    G: GResult
    warnings: list[str] = field(default_factory=list)


def compute_endpoints(nl: Nonlinearity, lm: Landmarks, tau: float = 3.0,
                      overrides: dict[str, str] | None = None,
                      tol: float = 1e-10) -> CurveEndpoints:
    """Assemble lambda_hat, kappa, and G for an existing curve."""
    lam, lam_err, lam_branch = lambda_hat(nl, lm, tol=tol, overrides=overrides)
    kap = kappa(nl, lm, tau=tau, overrides=overrides, tol=tol)
    g = big_G(nl, lm, overrides=overrides)
    warnings = []
    if kap.log_probe_fired:
        warnings.append(LOG_PROBE_WARNING)
    if lm.beta2_capped and not math.isfinite(lm.beta2):
        warnings.append(f"beta2 treated as infinite: verified only up to "
                        f"the scan bound {lm.u_scan_max:g}")
    return CurveEndpoints(lambda_hat=lam, lambda_hat_err=lam_err,
                          lambda_hat_branch=lam_branch,
                          kappa_kind=kap.kind, kappa=kap.value,
                          kappa_err=kap.error_bar, kappa_branch=kap.branch,
                          G=g, warnings=warnings)
