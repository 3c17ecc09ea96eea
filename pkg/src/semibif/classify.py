"""Shape classification of the bifurcation curve.

``classify`` applies the structural decision rules to produce the exact
shape verdict together with the rule that fired; ``empirical_shape``
classifies a sampled curve from the sign pattern of successive differences.
The two must agree on every problem whose hypotheses are covered; when no
rule's hypotheses hold, the verdict is NotCovered rather than a guess.

Rule order: nonexistence, the convex special case, monotone-g, then the
single-peak rules (with the concave fallback at finite beta2).  The convex
rule is checked before the monotone-g rule so that convex problems are
reported with their richer endpoint descriptors; both produce the same
monotone decreasing shape whenever they overlap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .analysis import ConditionReport, Landmarks, Nonlinearity
from .timemap import CurveEndpoints

__all__ = ["ShapeKind", "ShapeClass", "CurveSummary", "classify",
           "empirical_shape"]


class ShapeKind(str, Enum):
    MONOTONE_DECREASING = "MonotoneDecreasing"
    MONOTONE_INCREASING = "MonotoneIncreasing"
    SUBSET_SHAPED = "SubsetShaped"
    CURVE_DOES_NOT_EXIST = "CurveDoesNotExist"
    NOT_COVERED = "NotCovered"


@dataclass(frozen=True)
class ShapeClass:
    """A shape verdict plus the tag of the rule that produced it."""

    kind: ShapeKind
    rule_fired: str


@dataclass
class CurveSummary:
    """Full classification: shape, start/end points, and the inputs used."""

    shape: ShapeClass
    start: tuple[float, float] | None   # (lambda_hat, eta)
    end: tuple[float, float] | None     # (kappa, beta2)
    conditions: ConditionReport | None
    endpoints: CurveEndpoints | None


def classify(nl: Nonlinearity, lm: Landmarks, cond: ConditionReport,
             ep: CurveEndpoints | None) -> CurveSummary:
    """Decision tree over the verified conditions; never guesses.

    A conflicting or uncovered combination of condition verdicts yields
    NotCovered with diagnostics preserved in the condition report.
    """
    if not cond.P2 or lm.eta is None:
        return CurveSummary(
            shape=ShapeClass(ShapeKind.CURVE_DOES_NOT_EXIST,
                             "energy-level nonexistence"),
            start=None, end=None, conditions=cond, endpoints=ep)

    if ep is None:
        raise ValueError("endpoints are required for an existing curve")
    start = (ep.lambda_hat, lm.eta)
    end = (ep.kappa, lm.beta2)

    def summary(kind: ShapeKind, rule: str) -> CurveSummary:
        return CurveSummary(shape=ShapeClass(kind, rule), start=start,
                            end=end, conditions=cond, endpoints=ep)

    if cond.fpp_positive and not math.isfinite(lm.beta2):
        return summary(ShapeKind.MONOTONE_DECREASING, "convex rule (C2)")

    if cond.H1 and cond.H2:
        return summary(ShapeKind.NOT_COVERED,
                       "conflicting condition verdicts (H1 and H2)")

    if cond.H1:
        return summary(ShapeKind.MONOTONE_DECREASING, "monotone-g rule T2(i)")

    if cond.H2 and (cond.H3 or cond.H4):
        via = "H2+H3" if cond.H3 else "H2+H4"
        if ep.G.negative:
            qual = "certified" if ep.G.certified_by else "numeric"
            return summary(ShapeKind.SUBSET_SHAPED,
                           f"single-peak rule T2(ii) [{via}, G<0 {qual}]")
        return summary(ShapeKind.MONOTONE_INCREASING,
                       f"single-peak rule T2(ii) [{via}, G>=0]")

    if math.isfinite(lm.beta2) and cond.H4:
        if ep.G.negative:
            return summary(ShapeKind.SUBSET_SHAPED,
                           "concave rule C0 [G<0]")
        return summary(ShapeKind.MONOTONE_INCREASING, "concave rule C0 [G>=0]")

    return summary(ShapeKind.NOT_COVERED, "no rule's hypotheses verified")


def empirical_shape(trace) -> ShapeKind:
    """Classify a sampled curve by the signs of successive T differences.

    Differences within a relative dead band of 1e-6 are ignored.  Exactly
    one negative-to-positive switch is the dip shape; anything that is not
    single-signed or single-switch is NotCovered.
    """
    points = trace.points
    if len(points) < 64:
        raise ValueError(f"empirical classification needs at least 64 "
                         f"points, got {len(points)}")
    signs = []
    for p0, p1 in zip(points[:-1], points[1:]):
        d = p1.T - p0.T
        if abs(d) <= 1e-6 * max(abs(p0.T), abs(p1.T)):
            continue
        signs.append(1 if d > 0 else -1)
    if not signs:
        return ShapeKind.NOT_COVERED
    switches = sum(1 for a, b in zip(signs[:-1], signs[1:]) if a != b)
    if switches == 0:
        return (ShapeKind.MONOTONE_INCREASING if signs[0] > 0
                else ShapeKind.MONOTONE_DECREASING)
    if switches == 1 and signs[0] < 0 and signs[-1] > 0:
        return ShapeKind.SUBSET_SHAPED
    return ShapeKind.NOT_COVERED
