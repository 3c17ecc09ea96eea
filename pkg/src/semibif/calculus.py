"""Reusable numerical engine: singularity-tolerant quadrature, bracketed
root finding, and numeric limit estimation at 0+ and infinity.

The quadrature is a double-exponential (tanh-sinh) transform with level
doubling.  One scheme serves both regular integrands and integrable
endpoint singularities of type (x-a)^(-s) with s < 1.

Integrand protocol
------------------
``integrate`` accepts either ``fn(u)`` or ``fn(u, dist_a, dist_b)``, where
the extra arguments are the exact distances of each node from the interval
endpoints as produced by the transform (never by subtraction).  Integrands
with a removable cancellation near an endpoint -- for instance
``1/sqrt(F(b) - F(u))`` near ``u = b`` -- should accept the three-argument
form and switch to a local expansion in the distance; that is what keeps
full double-precision accuracy through the singular region.  One-argument
integrands are supported but bottom out near ``sqrt(eps)``-scale error for
inverse-square-root singularities, because ``b - u`` is not representable
below machine epsilon.
"""

from __future__ import annotations

import inspect
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (LimitProbeError, MaxIterationsError, NoSignChangeError,
                     QuadratureError)

__all__ = [
    "QuadratureResult", "integrate",
    "BracketedRoot", "find_root",
    "LimitEstimate", "estimate_limit_at_zero", "estimate_limit_at_infinity",
]

# --------------------------------------------------------------------------
# tanh-sinh quadrature

_T_MAX = 6.11  # transform cutoff; offsets reach the subnormal range
_MAX_LEVEL = 11

_node_cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _nodes(level: int) -> tuple[np.ndarray, np.ndarray]:
    """New abscissas introduced at this level, as (1 - x, weight) pairs.

    Level 0 contributes all multiples of h0 = 1; level m > 0 contributes the
    odd multiples of 2^-m.  ``1 - x`` equals ``2 exp(-2z)/(1 + exp(-2z))``
    with ``z = (pi/2) sinh t``, evaluated without cancellation.
    """
    cached = _node_cache.get(level)
    if cached is not None:
        return cached
    h = 2.0 ** (-level)
    if level == 0:
        t = np.arange(1, int(_T_MAX / h) + 1) * h
    else:
        t = np.arange(1, int(_T_MAX / h) + 1, 2) * h
    z = 0.5 * np.pi * np.sinh(t)
    ez = np.exp(-2.0 * z)
    one_minus_x = 2.0 * ez / (1.0 + ez)
    w = 2.0 * np.pi * np.cosh(t) * ez / (1.0 + ez) ** 2
    _node_cache[level] = (one_minus_x, w)
    return one_minus_x, w


@dataclass
class QuadratureResult:
    """Integral value with an error estimate and convergence flags.

    ``converged`` implies ``abs_error_estimate <= tol``; a set
    ``diverged_to`` (+1 or -1) implies ``converged`` is False.
    """

    value: float
    abs_error_estimate: float
    converged: bool
    diverged_to: int | None = None
    levels_used: int = 0
    evaluations: int = 0
    partial_sums: list[float] = field(default_factory=list)


def _wants_offsets(fn) -> bool:
    try:
        params = inspect.signature(fn).parameters
    except (TypeError, ValueError):
        return False
    required = [p for p in params.values()
                if p.default is inspect.Parameter.empty
                and p.kind in (p.POSITIONAL_ONLY, p.POSITIONAL_OR_KEYWORD)]
    return len(required) >= 3


def integrate(fn, a: float, b: float, tol: float = 1e-10,
              endpoint_singular: str = "none",
              max_level: int = _MAX_LEVEL) -> QuadratureResult:
    """Tanh-sinh quadrature of fn over (a, b) with interval transform.

    ``endpoint_singular`` is one of ``none``, ``at_a``, ``at_b``, ``both``;
    it controls where divergence detection looks.  Non-finite integrand
    values are dropped (they only occur in the far transform tail, where a
    convergent integrand contributes nothing).  A sustained same-signed blow
    up of the tail instead marks the integral as divergent.
    """
    if not (a < b):
        raise ValueError(f"integration bounds must satisfy a < b, got {a}, {b}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if endpoint_singular not in ("none", "at_a", "at_b", "both"):
        raise ValueError(f"bad endpoint_singular: {endpoint_singular!r}")

    three_arg = _wants_offsets(fn)
    c = 0.5 * (b - a)
    mid = a + c

    def values(us, da, db):
        with np.errstate(all="ignore"):
            v = fn(us, da, db) if three_arg else fn(us)
        return np.asarray(v, dtype=np.float64)

    sums: list[float] = []
    running = 0.0        # sum of w*v over all retained nodes so far
    running_abs = 0.0
    evaluations = 0
    best = (math.inf, math.nan, 0)  # (err, value, level)

    # per-side tail bookkeeping for divergence detection: contributions of
    # the transform windows t in (tmax-1-j, tmax-j], j = 0, 1, 2.  Isolated
    # non-finite integrand values are dropped: they arise from rounding at
    # the last representable offsets, where a convergent integrand's true
    # contribution is negligible; a divergent integrand instead shows
    # same-signed geometric growth of these windows.
    tail_a = np.zeros(3)
    tail_b = np.zeros(3)

    for level in range(0, max_level + 1):
        h = 2.0 ** (-level)
        omx, w = _nodes(level)
        da = c * omx                      # distance from the near endpoint
        u_right = b - da                  # t > 0 side
        u_left = a + da                   # t < 0 side
        far = 2.0 * c - da                # distance from the far endpoint
        vr = values(u_right, far, da)
        vl = values(u_left, da, far)
        evaluations += 2 * len(da)
        if level == 0:
            vm = values(np.array([mid]), np.array([c]), np.array([c]))
            evaluations += 1
            v0 = vm[0] if np.isfinite(vm[0]) else 0.0
            running += (np.pi / 2.0) * v0
            running_abs += abs((np.pi / 2.0) * v0)

        tr = w * vr
        tl = w * vl
        tr = np.where(np.isfinite(tr), tr, 0.0)
        tl = np.where(np.isfinite(tl), tl, 0.0)
        running += float(np.sum(tr) + np.sum(tl))
        running_abs += float(np.sum(np.abs(tr)) + np.sum(np.abs(tl)))

        # window sums near each endpoint, t measured on the level-0 scale
        t_here = (np.arange(1, len(omx) + 1) if level == 0
                  else np.arange(1, 2 * len(omx) + 1, 2)) * h
        for j in range(3):
            in_window = (t_here > _T_MAX - 1 - j) & (t_here <= _T_MAX - j)
            tail_b[j] += float(np.sum(tr[in_window]))
            tail_a[j] += float(np.sum(tl[in_window]))

        value = c * h * running
        sums.append(value)

        if level >= 2:
            d1 = abs(sums[-1] - sums[-2])
            d2 = abs(sums[-1] - sums[-3])
            floor = 8.0 * np.finfo(float).eps * c * h * running_abs
            if d1 == 0.0:
                err = floor
            elif d2 == 0.0:
                err = d1
            else:
                e1, e2 = math.log10(d1), math.log10(d2)
                err = 10.0 ** min(0.0, max(e1 * e1 / e2, 2 * e1))
                err = max(err, floor)
            if err < best[0]:
                best = (err, value, level)
            if err <= max(tol, floor):
                diverged = _tail_divergence(endpoint_singular, tail_a,
                                            tail_b, c, h, tol, value)
                if diverged is not None:
                    return QuadratureResult(math.copysign(math.inf, diverged),
                                            math.inf, False, diverged,
                                            level, evaluations, sums)
                return QuadratureResult(value, err, err <= tol,
                                        None, level, evaluations, sums)

    # not converged: check for same-signed growth of the endpoint tails
    err, value, level = best
    diverged = _tail_divergence(endpoint_singular, tail_a, tail_b,
                                c, 2.0 ** (-max_level), tol, value)
    if diverged is not None:
        return QuadratureResult(math.copysign(math.inf, diverged),
                                math.inf, False, diverged,
                                max_level, evaluations, sums)
    return QuadratureResult(value, err, False, None, level, evaluations, sums)


def _tail_divergence(endpoint_singular: str, tail_a: np.ndarray,
                     tail_b: np.ndarray, c: float, h: float, tol: float,
                     value: float) -> int | None:
    """Same-signed geometric growth of the endpoint windows means the
    improper integral diverges; returns the sign or None."""
    for side, tail in (("at_a", tail_a), ("at_b", tail_b)):
        if endpoint_singular not in (side, "both"):
            continue
        scaled = tail * c * h
        if (abs(scaled[0]) > max(100.0 * tol, 1e-9 * abs(value))
                and abs(scaled[0]) >= 1.8 * abs(scaled[1])
                and abs(scaled[1]) >= 1.8 * abs(scaled[2])
                and scaled[2] != 0.0
                and np.sign(scaled[0]) == np.sign(scaled[1])
                == np.sign(scaled[2])):
            return int(np.sign(scaled[0]))
    return None


# --------------------------------------------------------------------------
# bracketed root finding (Brent)

@dataclass
class BracketedRoot:
    """A refined root with its final bracket and function residual."""

    root: float
    bracket: tuple[float, float]
    residual: float
    iterations: int = 0


def find_root(fn, lo: float, hi: float, tol: float = 1e-12,
              max_iter: int = 200) -> BracketedRoot:
    """Brent-style bracketing iteration.

    Requires a sign change over [lo, hi]; returns a root with final bracket
    width at most ``tol * (1 + |root|)`` plus machine slack.
    """
    a, b = float(lo), float(hi)
    fa, fb = float(fn(a)), float(fn(b))
    if fa == 0.0:
        return BracketedRoot(a, (a, a), 0.0)
    if fb == 0.0:
        return BracketedRoot(b, (b, b), 0.0)
    if (fa > 0) == (fb > 0):
        raise NoSignChangeError(
            f"no sign change on [{lo}, {hi}]: f(lo)={fa!r}, f(hi)={fb!r}")

    eps = np.finfo(float).eps
    c, fc = a, fa
    d = e = b - a
    for iteration in range(max_iter):
        if abs(fc) < abs(fb):
            a, b, c = b, c, b
            fa, fb, fc = fb, fc, fb
        xtol = 2.0 * eps * abs(b) + 0.5 * tol * (1.0 + abs(b))
        m = 0.5 * (c - b)
        if abs(m) <= xtol or fb == 0.0:
            lo_f, hi_f = (b, c) if b <= c else (c, b)
            return BracketedRoot(b, (lo_f, hi_f), fb, iteration)
        if abs(e) < xtol or abs(fa) <= abs(fb):
            d = e = m
        else:
            s = fb / fa
            if a == c:
                p = 2.0 * m * s
                q = 1.0 - s
            else:
                q = fa / fc
                r = fb / fc
                p = s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0))
                q = (q - 1.0) * (r - 1.0) * (s - 1.0)
            if p > 0:
                q = -q
            else:
                p = -p
            s, e = e, d
            if 2.0 * p < 3.0 * m * q - abs(xtol * q) and p < abs(0.5 * s * q):
                d = p / q
            else:
                d = e = m
        a, fa = b, fb
        if abs(d) > xtol:
            b += d
        else:
            b += xtol if m > 0 else -xtol
        fb = float(fn(b))
        if (fb > 0) == (fc > 0):
            c, fc = a, fa
            d = e = b - a
    raise MaxIterationsError(
        f"root not located within {max_iter} iterations",
        bracket=(min(b, c), max(b, c)))


# --------------------------------------------------------------------------
# numeric limits

_INF_THRESHOLD = 1e8
_FINITE_DIFF_RATIO = 1e-3
_GROWTH_FACTOR = 16.0


@dataclass
class LimitEstimate:
    """Outcome of probing fn along a geometric sequence of points.

    ``kind`` is one of finite, zero, pos_infinite, neg_infinite,
    inconclusive.  ``samples`` holds the (point, value) pairs actually used,
    so callers can apply weaker, one-sided evidence when the hard
    classification is inconclusive (slowly divergent limits cannot trip the
    fixed thresholds).
    """

    kind: str
    value: float | None
    samples: list[tuple[float, float]]

    def negative_bounded_away(self, floor: float = 1e-8) -> bool:
        """Evidence that the limit lies in [-inf, 0): the tail is negative
        and not shrinking toward zero."""
        if self.kind == "neg_infinite":
            return True
        if self.kind == "finite" and self.value is not None and self.value < -floor:
            return True
        if self.kind in ("zero", "pos_infinite"):
            return False
        tail = [v for _, v in self.samples[-8:]]
        if len(tail) < 4 or any(v >= 0 for v in tail):
            return False
        mags = [abs(v) for v in tail]
        return mags[-1] >= mags[0] * 0.999 and mags[-1] > floor

    def positive_unbounded_trend(self, floor: float = 1e-8) -> bool:
        """Evidence that the limit lies in (0, inf]: positive, growing, and
        not converging."""
        if self.kind == "pos_infinite":
            return True
        if self.kind in ("zero", "neg_infinite"):
            return False
        if self.kind == "finite":
            return self.value is not None and self.value > floor
        tail = [v for _, v in self.samples[-8:]]
        if len(tail) < 4 or any(v <= 0 for v in tail):
            return False
        return tail[-1] >= tail[0] and tail[-1] > floor


def _classify(samples: list[tuple[float, float]]) -> LimitEstimate:
    vals = [v for _, v in samples]
    if len(vals) < 4:
        return LimitEstimate("inconclusive", None, samples)
    tail = vals[-10:]
    mags = [abs(v) for v in tail]
    signs = {math.copysign(1.0, v) for v in tail[-5:] if v != 0.0}
    monotone_growth = all(mags[i + 1] >= mags[i] for i in range(len(mags) - 1))

    # divergence: fixed magnitude threshold, or sustained geometric growth
    if monotone_growth and len(signs) == 1:
        big = mags[-1] > _INF_THRESHOLD
        sustained = (len(mags) >= 8 and mags[0] > 0
                     and mags[-1] / mags[0] >= _GROWTH_FACTOR
                     and mags[-1] > 1e3)
        if big or sustained:
            kind = "pos_infinite" if signs == {1.0} else "neg_infinite"
            return LimitEstimate(kind, None, samples)

    # convergence: relative successive differences small over the last 5
    last = tail[-5:]
    scale = max(abs(v) for v in last)
    if scale == 0.0:
        return LimitEstimate("zero", 0.0, samples)
    diffs = [abs(last[i + 1] - last[i]) for i in range(len(last) - 1)]
    if len(last) == 5 and all(d <= _FINITE_DIFF_RATIO * scale for d in diffs):
        value = last[-1]
        peak = max(abs(v) for v in vals)
        if abs(value) <= 1e-9 * (1.0 + peak):
            return LimitEstimate("zero", 0.0, samples)
        return LimitEstimate("finite", value, samples)

    # slow decay to zero: magnitudes non-increasing and already tiny
    mags_all = [abs(v) for v in vals[-8:]]
    peak = max(abs(v) for v in vals)
    if (len(mags_all) >= 8
            and all(mags_all[i + 1] <= mags_all[i] * 1.001 for i in range(7))
            and mags_all[-1] <= 1e-4 * (1.0 + peak)):
        return LimitEstimate("zero", 0.0, samples)

    # sustained geometric decay over the whole probe range (e.g. u^0.1):
    # monotone shrink by at least 4x is taken as decay to zero
    full = [abs(v) for v in vals]
    if (len(full) >= 12 and full[0] > 0
            and all(full[i + 1] <= full[i] * 1.001 for i in range(len(full) - 1))
            and full[-1] <= 0.25 * full[0]):
        return LimitEstimate("zero", 0.0, samples)

    return LimitEstimate("inconclusive", None, samples)


def _probe(fn, points) -> LimitEstimate:
    samples: list[tuple[float, float]] = []
    for x in points:
        try:
            v = float(fn(x))
        except Exception:
            continue
        if math.isnan(v):
            continue
        if math.isinf(v):
            v = math.copysign(1e300, v)
        samples.append((x, v))
    if len(samples) < 4:
        raise LimitProbeError(
            "limit probe failed: fewer than 4 probe points evaluated")
    return _classify(samples)


def estimate_limit_at_zero(fn, start: float = 1e-2, ratio: float = 0.5,
                           count: int = 30) -> LimitEstimate:
    """Probe fn(u) as u -> 0+ along u = start * ratio^k, k = 0..count."""
    return _probe(fn, (start * ratio ** k for k in range(count + 1)))


def estimate_limit_at_infinity(fn, start: float = 10.0, ratio: float = 2.0,
                               count: int = 30) -> LimitEstimate:
    """Probe fn(u) as u -> infinity along u = start * ratio^k."""
    return _probe(fn, (start * ratio ** k for k in range(count + 1)))
