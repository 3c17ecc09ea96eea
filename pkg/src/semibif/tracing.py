"""Curve tracing: sample T over the admissible amplitude range.

The grid clusters points geometrically near both ends of the range, where
the curve's curvature concentrates (T blows up, flattens, or dips), with
the rest uniform in between.  For a finite right end the last grid point is
pinned at beta2 - span * 2^-14; an infinite right end is truncated at
min(u_max, 1000 * eta) with geometric spacing outward.

The traced points carry T, lambda = T^2, and the analytic T'; the interior
minimum is located by root-finding T' whenever the sampled curve is
dip-shaped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analysis import Landmarks, Nonlinearity
from .calculus import find_root
from .classify import ShapeKind, empirical_shape
from .errors import SemibifError, TraceError
from .timemap import TimeMapPoint, time_map, time_map_derivative

__all__ = ["CurveTrace", "trace", "locate_minimum", "write_csv", "write_svg"]


@dataclass
class CurveTrace:
    """Ordered samples of the curve, plus the located interior minimum
    (present exactly when the sampled shape is the dip shape)."""

    points: list[TimeMapPoint]
    alpha_grid_spec: str
    min_point: tuple[float, float] | None = None   # (alpha*, lambda*)
    empirical: ShapeKind | None = None
    eta: float = math.nan
    beta2: float = math.nan


def _grid(lm: Landmarks, n: int, u_max: float) -> tuple[np.ndarray, str]:
    eta, beta2 = lm.eta, lm.beta2
    n_side = n // 4
    if math.isfinite(beta2):
        span = beta2 - eta
        left = eta + span * np.exp(np.linspace(math.log(2.0 ** -20),
                                               math.log(1.0 / 16.0), n_side))
        right = beta2 - span * np.exp(np.linspace(math.log(1.0 / 16.0),
                                                  math.log(2.0 ** -14),
                                                  n_side))
        mid = np.linspace(eta + span / 16.0, beta2 - span / 16.0,
                          n - 2 * n_side + 2)[1:-1]
        spec = (f"{n} points on ({eta:.12g}, {beta2:.12g}): {n_side} "
                f"geometric near each end, {n - 2 * n_side} uniform between")
        grid = np.concatenate([left, mid, right])
    else:
        a_max = min(u_max, 1000.0 * eta)
        if a_max <= eta * (1 + 2.0 ** -18):
            raise TraceError("scan bound leaves no room above eta")
        span = a_max - eta
        left = eta + span * np.exp(np.linspace(math.log(2.0 ** -20),
                                               math.log(1.0 / 16.0), n_side))
        outer = eta + span * np.exp(np.linspace(math.log(1.0 / 16.0), 0.0,
                                                n - n_side + 1))[1:]
        spec = (f"{n} points on ({eta:.12g}, {a_max:.12g}) (right end "
                f"truncated): {n_side} geometric near eta, geometric to the "
                f"bound")
        grid = np.concatenate([left, outer])
    grid = np.unique(grid)
    return grid, spec


def trace(nl: Nonlinearity, lm: Landmarks, n_points: int = 64,
          spacing: str = "geometric_near_endpoints",
          tol: float = 1e-10) -> CurveTrace:
    """Sample T and T' over the admissible range on the clustered grid."""
    if n_points < 8:
        raise TraceError(f"n_points must be at least 8, got {n_points}")
    if spacing not in ("geometric_near_endpoints", "linear"):
        raise TraceError(f"unknown spacing {spacing!r}")
    if lm.eta is None:
        raise TraceError(f"cannot trace: {lm.curve_missing_reason}")

    if spacing == "linear":
        beta2_eff = lm.beta2 if math.isfinite(lm.beta2) else \
            min(lm.u_scan_max, 1000.0 * lm.eta)
        span = beta2_eff - lm.eta
        grid = np.linspace(lm.eta + span * 2.0 ** -20,
                           beta2_eff - span * 2.0 ** -14, n_points)
        spec = f"{n_points} uniform points"
    else:
        grid, spec = _grid(lm, n_points, lm.u_scan_max)

    points: list[TimeMapPoint] = []
    for alpha in grid:
        try:
            p = time_map(nl, lm, float(alpha), tol=tol)
            p.T_prime = time_map_derivative(nl, lm, float(alpha),
                                            tol=max(tol, 1e-9))
        except SemibifError as exc:
            raise TraceError(f"trace aborted at alpha={alpha:.12g}: {exc}") \
                from exc
        points.append(p)

    out = CurveTrace(points=points, alpha_grid_spec=spec, eta=lm.eta,
                     beta2=lm.beta2)
    if len(points) >= 64:
        out.empirical = empirical_shape(out)
        if out.empirical is ShapeKind.SUBSET_SHAPED:
            bracket = _slope_sign_change(points)
            if bracket is not None:
                out.min_point = locate_minimum(nl, lm, bracket)
    return out


def _slope_sign_change(points: list[TimeMapPoint]):
    for p0, p1 in zip(points[:-1], points[1:]):
        if p0.T_prime is not None and p1.T_prime is not None \
                and p0.T_prime < 0.0 and p1.T_prime > 0.0:
            return (p0.alpha, p1.alpha)
    return None


def locate_minimum(nl: Nonlinearity, lm: Landmarks,
                   bracket: tuple[float, float]) -> tuple[float, float]:
    """Refine the interior minimum: root of T' on a sign-change bracket."""
    lo, hi = bracket
    span = (lm.beta2 - lm.eta) if math.isfinite(lm.beta2) else \
        (min(lm.u_scan_max, 1000.0 * lm.eta) - lm.eta)
    tol = 1e-8 * span / (1.0 + abs(hi))
    r = find_root(lambda a: time_map_derivative(nl, lm, a), lo, hi, tol=tol)
    alpha_star = r.root
    lam_star = time_map(nl, lm, alpha_star).lam
    return (alpha_star, lam_star)


# --------------------------------------------------------------------------
# serialization

def write_csv(trace_obj: CurveTrace, path: str) -> None:
    """CSV rows alpha,T,lambda,T_prime at 12 significant digits, LF ends."""
    with open(path, "w", newline="\n") as fh:
        fh.write("alpha,T,lambda,T_prime\n")
        for p in trace_obj.points:
            tp = "" if p.T_prime is None else f"{p.T_prime:.12g}"
            fh.write(f"{p.alpha:.12g},{p.T:.12g},{p.lam:.12g},{tp}\n")


def write_svg(trace_obj: CurveTrace, path: str, width: int = 640,
              height: int = 480) -> None:
    """Minimal deterministic line plot: lambda on x, amplitude on y."""
    pts = trace_obj.points
    xs = [p.lam for p in pts]
    ys = [p.alpha for p in pts]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    x_span = (x_hi - x_lo) or 1.0
    y_span = (y_hi - y_lo) or 1.0
    m = 48  # margin

    def sx(x: float) -> float:
        return m + (x - x_lo) / x_span * (width - 2 * m)

    def sy(y: float) -> float:
        return height - m - (y - y_lo) / y_span * (height - 2 * m)

    poly = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(xs, ys))
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{m}" y1="{height - m}" x2="{width - m}" '
        f'y2="{height - m}" stroke="black"/>',
        f'<line x1="{m}" y1="{m}" x2="{m}" y2="{height - m}" '
        f'stroke="black"/>',
        f'<text x="{width // 2}" y="{height - 12}" font-size="12" '
        f'text-anchor="middle">lambda</text>',
        f'<text x="14" y="{height // 2}" font-size="12" '
        f'text-anchor="middle" transform="rotate(-90 14 {height // 2})">'
        f'amplitude</text>',
        f'<text x="{m}" y="{height - m + 16}" font-size="10">'
        f'{x_lo:.6g}</text>',
        f'<text x="{width - m}" y="{height - m + 16}" font-size="10" '
        f'text-anchor="end">{x_hi:.6g}</text>',
        f'<text x="{m - 4}" y="{height - m}" font-size="10" '
        f'text-anchor="end">{y_lo:.6g}</text>',
        f'<text x="{m - 4}" y="{m + 4}" font-size="10" '
        f'text-anchor="end">{y_hi:.6g}</text>',
        f'<polyline points="{poly}" fill="none" stroke="#1f4e9c" '
        f'stroke-width="1.5"/>',
    ]
    if trace_obj.min_point is not None:
        a_star, lam_star = trace_obj.min_point
        parts.append(f'<circle cx="{sx(lam_star):.2f}" cy="{sy(a_star):.2f}" '
                     f'r="4" fill="none" stroke="#c03020" stroke-width="1.5"/>')
        parts.append(f'<text x="{sx(lam_star) + 8:.2f}" '
                     f'y="{sy(a_star) - 8:.2f}" font-size="10" '
                     f'fill="#c03020">minimum</text>')
    parts.append("</svg>")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(parts) + "\n")
