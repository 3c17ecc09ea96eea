"""Theorem-based and empirical shape classification."""

import math

import pytest

from conftest import CURVE_CASES

from semibif.analysis import ConditionReport
from semibif.calculus import LimitEstimate
from semibif.classify import ShapeKind, classify, empirical_shape
from semibif.timemap import TimeMapPoint
from semibif.tracing import CurveTrace


def _synthetic_trace(Ts):
    points = [TimeMapPoint(alpha=1.0 + 0.01 * i, T=t, T_prime=None,
                           lam=t * t) for i, t in enumerate(Ts)]
    return CurveTrace(points=points, alpha_grid_spec="synthetic")


class TestEmpirical:
    def test_strictly_decreasing(self):
        tr = _synthetic_trace([2.0 - 0.01 * i for i in range(80)])
        assert empirical_shape(tr) is ShapeKind.MONOTONE_DECREASING

    def test_strictly_increasing(self):
        tr = _synthetic_trace([1.0 + 0.01 * i for i in range(80)])
        assert empirical_shape(tr) is ShapeKind.MONOTONE_INCREASING

    def test_single_dip(self):
        Ts = [2.0 - 0.02 * i for i in range(40)]
        Ts += [Ts[-1] + 0.02 * i for i in range(40)]
        assert empirical_shape(_synthetic_trace(Ts)) is ShapeKind.SUBSET_SHAPED

    def test_wiggle_is_not_covered(self):
        Ts = ([2.0 - 0.02 * i for i in range(30)]
              + [1.4 + 0.02 * i for i in range(30)]
              + [2.0 - 0.02 * i for i in range(30)])
        assert empirical_shape(_synthetic_trace(Ts)) is ShapeKind.NOT_COVERED

    def test_dead_band_ignores_flat_noise(self):
        Ts = [1.0 + 1e-9 * (-1) ** i for i in range(40)]
        Ts += [1.0 + 0.01 * i for i in range(40)]
        assert empirical_shape(_synthetic_trace(Ts)) is \
            ShapeKind.MONOTONE_INCREASING

    def test_too_few_points_rejected(self):
        with pytest.raises(ValueError):
            empirical_shape(_synthetic_trace([1.0] * 63))

    def test_logarithmic_problem_dips(self, traced):
        assert traced("E1").empirical is ShapeKind.SUBSET_SHAPED

    def test_sqrt_problem_increases(self, traced):
        assert traced("E4").empirical is ShapeKind.MONOTONE_INCREASING


class TestClassify:
    def test_rule_tags_present(self, pipeline):
        for name, params in CURVE_CASES:
            s = pipeline(name, params).summary
            assert s.shape.rule_fired, (name, params)

    def test_nonexistence(self, pipeline):
        s = pipeline("E5", {"a": 1.0, "b": 2.0}).summary
        assert s.shape.kind is ShapeKind.CURVE_DOES_NOT_EXIST
        assert s.start is None and s.end is None

    def test_monotone_ratio_rule(self, pipeline):
        s = pipeline("E2").summary
        assert s.shape.kind is ShapeKind.MONOTONE_DECREASING
        assert "T2(i)" in s.shape.rule_fired
        assert math.isfinite(s.end[0]) and math.isinf(s.end[1])

    def test_convex_rule_preferred_for_convex_problems(self, pipeline):
        s = pipeline("E6").summary
        assert s.shape.kind is ShapeKind.MONOTONE_DECREASING
        assert "C2" in s.shape.rule_fired
        assert s.end[0] == 0.0 and math.isinf(s.end[1])

    def test_single_peak_with_negative_G(self, pipeline):
        s = pipeline("E1").summary
        assert s.shape.kind is ShapeKind.SUBSET_SHAPED
        assert "T2(ii)" in s.shape.rule_fired and "G<0" in s.shape.rule_fired

    def test_single_peak_with_zero_G(self, pipeline):
        s = pipeline("E3").summary
        assert s.shape.kind is ShapeKind.MONOTONE_INCREASING
        assert "G>=0" in s.shape.rule_fired
        assert s.start[0] == pytest.approx(2 * math.pi ** 2, rel=1e-6)
        assert s.start[1] == pytest.approx(4.0, abs=1e-10)

    def test_quadratic_ends_at_finite_amplitude(self, pipeline):
        s = pipeline("E5", {"a": 1.0, "b": 4.0}).summary
        assert s.shape.kind is ShapeKind.SUBSET_SHAPED
        assert math.isinf(s.end[0]) and s.end[1] == pytest.approx(4.0)

    def test_not_covered_for_single_peak_without_concavity(self):
        cond = ConditionReport(
            P1=True, P2=True, H1=False, H2=True, H3=False, H4=False,
            fpp_positive=False,
            f0_limit=LimitEstimate("inconclusive", None, []))

        class _Stub:
            eta = 1.0
            beta2 = math.inf

        from semibif.timemap import CurveEndpoints, GResult
        ep = CurveEndpoints(
            lambda_hat=1.0, lambda_hat_err=0.0, lambda_hat_branch="",
            kappa_kind="infinite", kappa=math.inf, kappa_err=None,
            kappa_branch="", G=GResult(-1.0, 0.0, None, True))
        s = classify(None, _Stub(), cond, ep)
        assert s.shape.kind is ShapeKind.NOT_COVERED

    def test_conflicting_verdicts_not_covered(self):
        cond = ConditionReport(
            P1=True, P2=True, H1=True, H2=True, H3=None, H4=False,
            fpp_positive=False,
            f0_limit=LimitEstimate("inconclusive", None, []))

        class _Stub:
            eta = 1.0
            beta2 = math.inf

        from semibif.timemap import CurveEndpoints, GResult
        ep = CurveEndpoints(
            lambda_hat=1.0, lambda_hat_err=0.0, lambda_hat_branch="",
            kappa_kind="infinite", kappa=math.inf, kappa_err=None,
            kappa_branch="", G=GResult(-1.0, 0.0, None, True))
        s = classify(None, _Stub(), cond, ep)
        assert s.shape.kind is ShapeKind.NOT_COVERED
        assert "conflict" in s.shape.rule_fired


class TestRuleHypothesisConsistency:
    def test_fired_rule_hypotheses_all_hold(self, pipeline):
        # a verdict must only cite a rule whose hypotheses report true
        for name, params in CURVE_CASES:
            p = pipeline(name, params)
            rule = p.summary.shape.rule_fired
            if "T2(i)" in rule and "T2(ii)" not in rule:
                assert p.cond.H1, (name, params)
            if "T2(ii)" in rule:
                assert p.cond.H2, (name, params)
                if "H2+H3" in rule:
                    assert p.cond.H3, (name, params)
                if "H2+H4" in rule:
                    assert p.cond.H4, (name, params)
            if "C2" in rule:
                assert p.cond.fpp_positive, (name, params)
                assert math.isinf(p.lm.beta2), (name, params)
            if "C0" in rule:
                assert p.cond.H4 and math.isfinite(p.lm.beta2), (name, params)


class TestParameterRobustness:
    def test_slowly_vanishing_antiderivative_accepted(self, pipeline):
        # p close to 1 makes F ~ u^(1-p) vanish very slowly at 0
        p = pipeline("E2", {"sigma": 3.0, "p": 0.9})
        assert p.summary.shape.kind is ShapeKind.MONOTONE_DECREASING
        want_eta = (2.0 / (3.0 * 0.1)) ** (1.0 / 1.9)
        assert p.lm.eta == pytest.approx(want_eta, rel=1e-10)

    def test_small_eta_regime(self, pipeline):
        p = pipeline("E3", {"sigma": 5.0})
        assert p.summary.shape.kind is ShapeKind.MONOTONE_INCREASING
        assert p.ep.lambda_hat == pytest.approx(
            2.0 * math.pi ** 2 / 125.0, rel=1e-6)

    def test_marginal_quadratic_has_no_curve(self, pipeline):
        # at 3a = b the energy touches zero without crossing
        p = pipeline("E5", {"a": 1.0, "b": 3.0})
        assert p.summary.shape.kind is ShapeKind.CURVE_DOES_NOT_EXIST

    def test_flat_tail_cancellation_does_not_confuse_the_scan(self, pipeline):
        # with a = 0 the ratio slope decays like e^(-u): its computed sign
        # in the tail is rounding noise, which the scan must ignore
        p = pipeline("E9", {"a": 0.0, "b": 1.0, "c": 2.0})
        assert p.cond.H1
        assert p.summary.shape.kind is ShapeKind.MONOTONE_DECREASING


class TestRegressionAgainstKnownFamilies:
    def test_convex_family_decreasing_with_vanishing_end(self, pipeline):
        # exponential-type convex problems end at (0, inf)
        s = pipeline("E6").summary
        assert s.shape.kind is ShapeKind.MONOTONE_DECREASING
        assert s.end[0] == 0.0

    def test_bounded_concave_problems_never_monotone_increasing(self, pipeline):
        # with f bounded at zero, the increasing shape is impossible for
        # single-peak problems: the sign integral is then always negative
        for name, params in [("E5", {"a": 1.0, "b": 4.0}), ("E7", None),
                             ("E8", None),
                             ("E9", {"a": 1.0, "b": 1.0, "c": 2.0}),
                             ("E9", {"a": 1.0, "b": 0.0, "c": 2.0})]:
            p = pipeline(name, params)
            assert p.cond.f0_limit.kind == "finite", (name, params)
            assert p.summary.shape.kind in (
                ShapeKind.SUBSET_SHAPED, ShapeKind.MONOTONE_DECREASING), \
                (name, params)
