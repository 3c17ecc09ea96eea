"""Numeric antiderivative F(u) = integral of f from 0 to u.

Built once per nonlinearity as a piecewise Chebyshev interpolant on panels
that double geometrically from a tiny base point up to the working range,
so an integrable singularity of f at u = 0 always sits a fixed relative
distance outside every panel.  Below the base point and for the base value
itself, singularity-tolerant quadrature is used directly.

Construction fails (ProblemStructureError) when the integral diverges at 0,
which is exactly the case excluded by the integrability requirement on F.
"""

from __future__ import annotations

import threading

import numpy as np

from .calculus import integrate
from .errors import ProblemStructureError, QuadratureError

__all__ = ["NumericAntiderivative"]

_N_CHEB = 48
_BASE = 1e-14
_MAX_SPLIT = 6
# panels double geometrically near 0 but never exceed this width, so that
# rapidly growing f (e.g. exponentials) cannot span a huge dynamic range
# inside a single panel, which would wreck pointwise relative accuracy
_WIDTH_CAP = 4.0


def _cheb_nodes(a: float, b: float) -> np.ndarray:
    k = np.arange(_N_CHEB + 1)
    x = np.cos(np.pi * k / _N_CHEB)  # 1 .. -1
    return 0.5 * (a + b) + 0.5 * (b - a) * x


def _cheb_coeffs(values: np.ndarray) -> np.ndarray:
    """Chebyshev coefficients from values at x_j = cos(j pi / n), j = 0..n
    (the order produced by _cheb_nodes).

    Returns plain multipliers: f(x) = sum_k c_k T_k(x).
    """
    n = _N_CHEB
    k = np.arange(n + 1)
    theta = np.pi * np.outer(k, k) / n
    weights = np.ones(n + 1)
    weights[0] = weights[-1] = 0.5
    coeffs = (2.0 / n) * (np.cos(theta) @ (values * weights))
    coeffs[0] *= 0.5
    coeffs[-1] *= 0.5
    return coeffs


def _cheb_antiderivative(coeffs: np.ndarray, half_width: float) -> np.ndarray:
    """Coefficients of the antiderivative, zero at the left edge (x = -1)."""
    a = coeffs
    n = len(a) - 1

    def at(k: int) -> float:
        return a[k] if 0 <= k <= n else 0.0

    out = np.zeros(n + 2)
    out[1] = (at(0) - at(2) / 2.0) * half_width
    for k in range(2, n + 2):
        out[k] = (at(k - 1) - at(k + 1)) * half_width / (2.0 * k)
    signs = (-1.0) ** np.arange(n + 2)
    out[0] = -float(np.sum(out[1:] * signs[1:]))
    return out


def _cheb_eval(coeffs: np.ndarray, x: np.ndarray) -> np.ndarray:
    b1 = np.zeros_like(x)
    b2 = np.zeros_like(x)
    for c in coeffs[:0:-1]:
        b1, b2 = 2.0 * x * b1 - b2 + c, b1
    return x * b1 - b2 + coeffs[0]


class NumericAntiderivative:
    """Vectorized F with F(0) = 0, accurate to ~1e-13 on analytic f."""

    def __init__(self, f_vec, u_max: float, tol: float = 1e-12):
        self.f = f_vec
        self.tol = tol
        base = integrate(f_vec, 0.0, _BASE, tol=max(tol, 1e-14),
                         endpoint_singular="at_a")
        if base.diverged_to is not None:
            raise ProblemStructureError(
                "the antiderivative of f diverges at 0 (f is too singular "
                "for u*f(u) to vanish); the problem is outside scope")
        self._edges = [_BASE]
        self._F_edges = [base.value]
        self._panels: list[tuple[float, float, np.ndarray]] = []
        # evaluation is read-only; the lock only guards lazy extension of
        # the panel list when a caller reaches past the built range
        self._grow_lock = threading.Lock()
        self._extend(max(u_max, 1.0))

    def _add_panel(self, a: float, b: float, depth: int = 0) -> None:
        vals = self.f(_cheb_nodes(a, b))
        if not np.all(np.isfinite(vals)):
            raise ProblemStructureError(
                f"f could not be evaluated on the panel [{a}, {b}]")
        coeffs = _cheb_coeffs(vals)
        scale = float(np.max(np.abs(coeffs))) or 1.0
        tail = float(np.max(np.abs(coeffs[-3:])))
        if tail > 1e-11 * scale and depth < _MAX_SPLIT:
            mid = 0.5 * (a + b)
            self._add_panel(a, mid, depth + 1)
            self._add_panel(mid, b, depth + 1)
            return
        anti = _cheb_antiderivative(coeffs, 0.5 * (b - a))
        self._panels.append((a, b, anti))
        panel_integral = float(_cheb_eval(anti, np.array([1.0]))[0])
        self._edges.append(b)
        self._F_edges.append(self._F_edges[-1] + panel_integral)

    def _extend(self, u_hi: float) -> None:
        while self._edges[-1] < u_hi:
            a = self._edges[-1]
            self._add_panel(a, min(2.0 * a, a + _WIDTH_CAP))

    @property
    def top(self) -> float:
        return self._edges[-1]

    def __call__(self, u):
        scalar = np.isscalar(u)
        us = np.atleast_1d(np.asarray(u, dtype=np.float64))
        out = np.empty_like(us)
        if us.size == 0:
            return out
        if float(np.max(us)) > self._edges[-1]:
            with self._grow_lock:
                if float(np.max(us)) > self._edges[-1]:
                    self._extend(float(np.max(us)))
        edges = np.asarray(self._edges)
        idx = np.searchsorted(edges, us, side="right") - 1
        idx = np.clip(idx, -1, len(self._panels) - 1)
        below = (us < _BASE) | (idx < 0)
        for i in np.nonzero(below)[0]:
            out[i] = self._tiny(float(us[i]))
        valid = ~below
        for p in np.unique(idx[valid]):
            sel = valid & (idx == p)
            a, b, anti = self._panels[int(p)]
            x = (2.0 * us[sel] - (a + b)) / (b - a)
            out[sel] = self._F_edges[int(p)] + _cheb_eval(anti, x)
        return float(out[0]) if scalar else out

    def _tiny(self, u: float) -> float:
        if u <= 0.0:
            return 0.0
        try:
            r = integrate(self.f, 0.0, u, tol=max(self.tol, 1e-14),
                          endpoint_singular="at_a")
        except QuadratureError:
            return 0.0
        return r.value
