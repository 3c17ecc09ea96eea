"""Problem analysis: derived functions, landmark location, and structural
condition checks for the nonlinearity f of -u'' = lambda f(u).

From a parsed f this module assembles the antiderivative F (closed form or
numeric), the ratio g = f/u, the combination theta = 2F - u f and its
derivatives, and the logarithmic ratio q = -u theta'/theta.  It then scans
for the landmark points

  beta1, beta2 : the zeros of f bounding its positivity interval,
  eta          : the zero of F (left edge of admissible amplitudes),
  sigma        : the critical point of g,
  rho          : the zero of theta,
  gamma        : the critical point of theta,
  xi           : rho when theta stays positive at beta2, else beta2,

and classifies which structural conditions hold (monotone g, single-peak g,
geometric concavity of f past sigma, concavity of f).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .antiderivative import NumericAntiderivative
from .backend import TapeFunction
from .calculus import LimitEstimate, estimate_limit_at_zero, find_root
from .errors import ProblemStructureError
from .expr import Binary, ExprAst, Unary, Var, bind, differentiate, to_string

__all__ = ["Nonlinearity", "Landmarks", "ConditionReport",
           "build_nonlinearity", "locate_landmarks", "check_conditions"]

SCAN_POINTS = 2048
SCAN_EPS = 1e-12
DEFAULT_U_MAX = 50.0


# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Nonlinearity:
    """Callable bundle around f: derivatives, antiderivative, and the
    derived combinations used throughout the analysis.

    All callables accept scalars or float64 arrays and are pure.
    F_mode records whether F came from a user-supplied closed form or from
    numeric integration.
    """

    expression: str
    params: dict[str, float]
    f: TapeFunction
    fp: TapeFunction
    fpp: TapeFunction
    g: TapeFunction
    gp: TapeFunction
    theta_prime: TapeFunction       # f(u) - u f'(u)
    theta_pp: TapeFunction          # -u f''(u)
    ratio_prime: TapeFunction       # d/du [u f'(u) / f(u)]
    F: object                       # vectorized callable, F(0) = 0
    F_mode: str                     # "closed_form" | "numeric"
    u_max: float
    f_ast: ExprAst = field(repr=False, default=None)
    F_ast: ExprAst | None = field(repr=False, default=None)

    def theta(self, u):
        return 2.0 * self.F(u) - u * self.f(u)

    def q(self, u):
        th = self.theta(u)
        return -u * self.theta_prime(u) / th


def build_nonlinearity(ast: ExprAst, bindings: dict[str, float] | None = None,
                       closed_form_F: ExprAst | None = None,
                       u_max: float = DEFAULT_U_MAX) -> Nonlinearity:
    """Assemble the callable bundle for f, validating the antiderivative.

    With a closed-form F the symbolic derivative of F is checked against f
    at sample points; a numeric F is built by panelized integration from 0
    and cross-checked by finite differences.  A divergent integral at 0
    (f as singular as -1/u or worse) is rejected: the problem requires the
    antiderivative to exist.
    """
    bindings = dict(bindings or {})
    declared = set(ast.params)
    if closed_form_F is not None:
        declared |= set(closed_form_F.params)
    unused = sorted(set(bindings) - declared)
    if unused:
        raise ProblemStructureError(
            f"unused parameter values: {', '.join(unused)} (the expression "
            f"mentions: {', '.join(sorted(declared)) or 'no parameters'})")
    f_ast = bind(ast, bindings)
    fp_ast = differentiate(f_ast, 1)
    fpp_ast = differentiate(f_ast, 2)
    g_ast = ExprAst.of(Binary("div", f_ast.root, Var()))
    gp_ast = differentiate(g_ast, 1)
    theta_prime_ast = ExprAst.of(
        Binary("sub", f_ast.root, Binary("mul", Var(), fp_ast.root)))
    theta_pp_ast = ExprAst.of(
        Unary("neg", Binary("mul", Var(), fpp_ast.root)))
    ratio_ast = ExprAst.of(
        Binary("div", Binary("mul", Var(), fp_ast.root), f_ast.root))
    ratio_prime_ast = differentiate(ratio_ast, 1)

    f = TapeFunction(f_ast)
    fp = TapeFunction(fp_ast)
    fpp = TapeFunction(fpp_ast)

    sample = np.concatenate([np.geomspace(1e-6, 1.0, 16),
                             np.linspace(1.0, u_max, 16)])
    if closed_form_F is not None:
        F_ast = bind(closed_form_F, bindings)
        dF = TapeFunction(differentiate(F_ast, 1))
        F = TapeFunction(F_ast)
        got, want = dF.many(sample), f.many(sample)
        ok = np.isfinite(got) & np.isfinite(want)
        if not np.all(np.abs(got[ok] - want[ok])
                      <= 1e-6 * (1.0 + np.abs(want[ok]))) or not np.any(ok):
            raise ProblemStructureError(
                "the supplied antiderivative does not differentiate to f")
        # F must vanish at 0, not merely be small at one probe point: a
        # power-law tail like u^0.1 is still O(1) at u = 1e-12, while a
        # wrongly shifted antiderivative plateaus at its offset
        est0 = estimate_limit_at_zero(lambda u: float(F(np.array([u]))[0]))
        f1 = abs(float(F(np.array([1.0]))[0]))
        if not (est0.kind == "zero"
                or (est0.kind == "finite" and est0.value is not None
                    and abs(est0.value) <= 1e-9 * (1.0 + f1))):
            raise ProblemStructureError(
                "the supplied antiderivative does not vanish at 0")
        F_mode = "closed_form"
    else:
        F_ast = None
        F = NumericAntiderivative(f.many, u_max)
        pts = sample
        h = 1e-6 * pts  # relative step keeps truncation error bounded
        fd = (F(pts + h) - F(pts - h)) / (2.0 * h)
        want = f.many(pts)
        ok = np.isfinite(fd) & np.isfinite(want)
        bad = np.abs(fd[ok] - want[ok]) > 1e-5 * (1.0 + np.abs(want[ok]))
        if np.any(bad):
            raise ProblemStructureError(
                "numeric antiderivative failed its derivative cross-check")
        F_mode = "numeric"

    return Nonlinearity(
        expression=to_string(ast), params=bindings,
        f=f, fp=fp, fpp=fpp,
        g=TapeFunction(g_ast), gp=TapeFunction(gp_ast),
        theta_prime=TapeFunction(theta_prime_ast),
        theta_pp=TapeFunction(theta_pp_ast),
        ratio_prime=TapeFunction(ratio_prime_ast),
        F=F, F_mode=F_mode, u_max=float(u_max),
        f_ast=f_ast, F_ast=F_ast)


# --------------------------------------------------------------------------
# landmark location

@dataclass
class Landmarks:
    """Landmark points of the nonlinearity, with existence encoded as None
    (or infinity for beta2)."""

    beta1: float
    beta2: float
    beta2_capped: bool
    eta: float | None
    sigma: float | None
    rho: float | None
    gamma: float | None
    xi: float | None
    theta_at_beta2: float
    gprime_pattern: str   # all_positive | single_peak | other
    curve_missing_reason: str | None
    u_scan_max: float
    notes: list[str] = field(default_factory=list)

    @property
    def curve_exists(self) -> bool:
        return self.eta is not None

    @property
    def beta2_effective(self) -> float:
        return self.beta2 if math.isfinite(self.beta2) else self.u_scan_max


def _scan_grid(u_max: float, n: int = SCAN_POINTS) -> np.ndarray:
    if u_max <= 1.0:
        return np.geomspace(SCAN_EPS, u_max, n)
    half = n // 2
    geo = np.geomspace(SCAN_EPS, 1.0, half, endpoint=False)
    lin = np.linspace(1.0, u_max, n - half)
    return np.concatenate([geo, lin])


def _sign_changes(xs: np.ndarray, vs: np.ndarray):
    """(lo, hi, direction) brackets over consecutive nonzero-sign samples;
    direction +1 for - to +, -1 for + to -."""
    idx = np.nonzero(np.isfinite(vs) & (vs != 0.0))[0]
    out = []
    for a, b in zip(idx[:-1], idx[1:]):
        neg_a, neg_b = vs[a] < 0, vs[b] < 0
        if neg_a != neg_b:
            out.append((float(xs[a]), float(xs[b]), +1 if neg_a else -1))
    return out


def _polish(root: float, fn, dfn, steps: int = 2) -> float:
    """Newton-polish a simple bracketed root to machine accuracy."""
    x = root
    for _ in range(steps):
        d = float(dfn(x))
        if d == 0.0 or not math.isfinite(d):
            return x
        step = float(fn(x)) / d
        if not math.isfinite(step) or abs(step) > 1e-3 * (1.0 + abs(x)):
            return x
        x -= step
    return x


def locate_landmarks(nl: Nonlinearity, root_tol: float = 1e-12) -> Landmarks:
    """Scan-and-refine location of all landmark points.

    The scan grid is geometric on (1e-12, 1] and linear on [1, u_max], 2048
    points total.  beta2 is declared infinite when f stays positive past
    beta1 all the way to the scan bound; that bound is recorded so reports
    can say "infinite up to u_max" honestly.
    """
    grid = _scan_grid(nl.u_max)
    fv = nl.f.many(grid)
    notes: list[str] = []

    crossings = _sign_changes(grid, fv)
    if not crossings:
        raise ProblemStructureError(
            "f has no sign change on the scan grid; the required sign "
            "pattern (negative near 0, then positive) cannot be verified")
    if crossings[0][2] != +1:
        raise ProblemStructureError(
            "f is not negative near u = 0; the problem is not of the "
            "expected sign pattern")
    b1 = find_root(nl.f, crossings[0][0], crossings[0][1], tol=root_tol)
    beta1 = _polish(b1.root, nl.f, nl.fp)

    beta2 = math.inf
    beta2_capped = True
    if len(crossings) >= 2:
        if crossings[1][2] != -1:
            raise ProblemStructureError("unexpected extra sign change of f")
        if len(crossings) > 2:
            raise ProblemStructureError(
                "f has more than two sign changes on the scan grid; outside "
                "the supported sign pattern")
        b2 = find_root(nl.f, crossings[1][0], crossings[1][1], tol=root_tol)
        beta2 = _polish(b2.root, nl.f, nl.fp)
        beta2_capped = False
    else:
        notes.append(f"beta2 declared infinite: f > 0 up to the scan bound "
                     f"{nl.u_max:g}")

    beta2_eff = beta2 if math.isfinite(beta2) else nl.u_max

    # eta: zero of F past beta1
    inner = grid[(grid > beta1) & (grid < beta2_eff)]
    eta = None
    curve_missing_reason = None
    Fv = np.asarray(nl.F(inner))
    fcross = _sign_changes(inner, Fv)
    up = [c for c in fcross if c[2] == +1]
    if up:
        eta = _polish(find_root(lambda u: float(nl.F(u)), up[0][0],
                                up[0][1], tol=root_tol).root,
                      lambda u: float(nl.F(u)), nl.f)
    else:
        if math.isfinite(beta2):
            curve_missing_reason = ("F stays negative on (beta1, beta2): no "
                                    "zero-energy level eta exists, so the "
                                    "bifurcation curve does not exist")
        else:
            curve_missing_reason = (f"F stays negative up to the scan bound "
                                    f"{nl.u_max:g}: no zero-energy level eta "
                                    "was found")

    # sigma: single critical point of g (scan g' strictly inside (0, beta2)).
    # g', theta, theta' are differences of terms that can agree to machine
    # precision in flat tails (e.g. exponentially decaying parts), where the
    # computed sign is pure rounding noise; samples below the cancellation
    # floor of their defining difference are treated as exact zeros, which
    # the sign-change scan skips.
    inner2 = grid[grid < beta2_eff * (1.0 - 1e-9)]
    eps = float(np.finfo(float).eps)
    fv2 = nl.f.many(inner2)
    fpv2 = nl.fp.many(inner2)
    Fv2 = np.asarray(nl.F(inner2))

    def denoised(vals, floor):
        return np.where(np.abs(vals) <= floor, 0.0, vals)

    gpv = denoised(nl.gp.many(inner2),
                   8.0 * eps * (np.abs(inner2 * fpv2) + np.abs(fv2))
                   / inner2 ** 2)
    finite = np.isfinite(gpv)
    valid = finite & (gpv != 0.0)
    gcross = _sign_changes(inner2[finite], gpv[finite])
    sigma = None
    if not gcross and np.all(gpv[valid] > 0) and np.any(valid):
        pattern = "all_positive"
    elif (len(gcross) == 1 and gcross[0][2] == -1):
        pattern = "single_peak"
        sigma = find_root(nl.gp, gcross[0][0], gcross[0][1], tol=root_tol).root
    else:
        pattern = "other"
        notes.append("g' does not match either supported sign pattern "
                     "(monotone, or single peak)")

    # theta at beta2 (2 F(beta2) when beta2 is a zero of f)
    if math.isfinite(beta2):
        theta_at_beta2 = float(nl.theta(beta2))
    else:
        theta_at_beta2 = float(nl.theta(beta2_eff))
        notes.append("theta(beta2-) evaluated at the scan bound")

    # rho: zero of theta; gamma: zero of theta'
    rho = None
    gamma = None
    tv = denoised(nl.theta(inner2),
                  8.0 * eps * (2.0 * np.abs(Fv2) + np.abs(inner2 * fv2)))
    tcross = [c for c in _sign_changes(inner2, tv) if c[2] == +1]
    if tcross:
        rho = _polish(find_root(lambda u: float(nl.theta(u)), tcross[0][0],
                                tcross[0][1], tol=root_tol).root,
                      lambda u: float(nl.theta(u)), nl.theta_prime)
    tpv = denoised(nl.theta_prime.many(inner2),
                   8.0 * eps * (np.abs(fv2) + np.abs(inner2 * fpv2)))
    tpcross = [c for c in _sign_changes(inner2, tpv) if c[2] == +1]
    if tpcross:
        gamma = _polish(find_root(nl.theta_prime, tpcross[0][0],
                                  tpcross[0][1], tol=root_tol).root,
                        nl.theta_prime, nl.theta_pp)

    if theta_at_beta2 > 0:
        xi = rho  # may be None if the zero lies beyond the scan bound
        if rho is None:
            notes.append("theta is positive at beta2 but its zero was not "
                         "bracketed within the scan bound")
    else:
        xi = beta2

    return Landmarks(beta1=beta1, beta2=beta2, beta2_capped=beta2_capped,
                     eta=eta, sigma=sigma, rho=rho, gamma=gamma, xi=xi,
                     theta_at_beta2=theta_at_beta2, gprime_pattern=pattern,
                     curve_missing_reason=curve_missing_reason,
                     u_scan_max=nl.u_max, notes=notes)


# --------------------------------------------------------------------------
# condition report

@dataclass
class ConditionReport:
    """Which structural conditions hold, with witness samples.

    H3 (geometric concavity past sigma) is only evaluated when the
    single-peak pattern holds, so H3 true implies H2 true.  H1 and H2 are
    mutually exclusive by construction.
    """

    P1: bool
    P2: bool
    H1: bool
    H2: bool
    H3: bool | None
    H4: bool
    fpp_positive: bool
    f0_limit: LimitEstimate
    diagnostics: dict[str, object] = field(default_factory=dict)


def check_conditions(nl: Nonlinearity, lm: Landmarks) -> ConditionReport:
    """Decide H1-H4 (and convexity) by dense sign sampling, with the scan
    grid points retained as witnesses."""
    beta2_eff = lm.beta2_effective
    diagnostics: dict[str, object] = {}

    H1 = lm.gprime_pattern == "all_positive"
    H2 = lm.gprime_pattern == "single_peak"
    diagnostics["gprime_pattern"] = lm.gprime_pattern

    H3: bool | None = None
    if H2 and lm.sigma is not None:
        lo = lm.sigma * (1.0 + 1e-6)
        hi = beta2_eff * (1.0 - 1e-6)
        if hi > lo:
            us = np.linspace(lo, hi, 512)
            fv = nl.f.many(us)
            rv = nl.ratio_prime.many(us)
            ok = np.isfinite(rv) & (np.abs(fv) > 1e-12 * (1.0 + np.abs(fv).max()))
            if np.count_nonzero(ok) < 16:
                H3 = None
                diagnostics["H3"] = "undetermined: too few valid samples"
            else:
                slack = 1e-9 * (1.0 + float(np.max(np.abs(rv[ok]))))
                bad = rv[ok] > slack
                H3 = not bool(np.any(bad))
                if np.any(bad):
                    diagnostics["H3_witness"] = float(us[ok][bad][0])

    us4 = np.concatenate([np.geomspace(SCAN_EPS, min(1.0, beta2_eff * 0.5), 256),
                          np.linspace(min(1.0, beta2_eff * 0.5),
                                      beta2_eff * (1.0 - 1e-6), 256)])
    fppv = nl.fpp.many(us4)
    okm = np.isfinite(fppv)
    slack4 = 1e-9 * (1.0 + float(np.max(np.abs(fppv[okm]))) if np.any(okm) else 1.0)
    H4 = bool(np.any(okm)) and not bool(np.any(fppv[okm] > slack4))
    if not H4 and np.any(okm) and np.any(fppv[okm] > slack4):
        diagnostics["H4_witness"] = float(us4[okm][fppv[okm] > slack4][0])

    # convexity over the whole scanned range (for the convex classification)
    usc = np.concatenate([np.geomspace(SCAN_EPS, 1.0, 128),
                          np.linspace(1.0, nl.u_max, 128)])
    fppc = nl.fpp.many(usc)
    okc = np.isfinite(fppc)
    fpp_positive = bool(np.any(okc)) and bool(np.all(fppc[okc] > 0.0))

    f0 = estimate_limit_at_zero(lambda u: nl.f(u))

    # dichotomy witness: the limit of f - u f' toward beta2
    tp_end = float(nl.theta_prime(beta2_eff * (1.0 - 1e-7))) \
        if math.isfinite(lm.beta2) else float(nl.theta_prime(beta2_eff))
    diagnostics["theta_prime_near_beta2"] = tp_end

    return ConditionReport(P1=True, P2=lm.curve_exists, H1=H1, H2=H2, H3=H3,
                           H4=H4, fpp_positive=fpp_positive, f0_limit=f0,
                           diagnostics=diagnostics)
