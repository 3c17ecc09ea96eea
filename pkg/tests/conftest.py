"""Shared fixtures: cached analysis pipelines and traces.

Building a nonlinearity, locating landmarks, and computing endpoints is
deterministic, so results are cached per parameterization for the whole
session.  Keys are the catalog name plus a frozen parameter override.
"""

from __future__ import annotations

from types import SimpleNamespace

import pytest

from semibif.analysis import check_conditions, locate_landmarks
from semibif.classify import classify
from semibif.fixtures import build_fixture
from semibif.timemap import compute_endpoints
from semibif.tracing import trace

_PIPELINES: dict = {}
_TRACES: dict = {}


def _key(name, params, u_max):
    return (name, tuple(sorted((params or {}).items())), u_max)


@pytest.fixture(scope="session")
def pipeline():
    """pipeline(name, params=None, u_max=None) -> namespace with
    nl, lm, cond, ep, summary."""

    def get(name, params=None, u_max=None):
        k = _key(name, params, u_max)
        if k not in _PIPELINES:
            nl, fx = build_fixture(name, params, u_max)
            lm = locate_landmarks(nl)
            cond = check_conditions(nl, lm)
            ep = compute_endpoints(nl, lm) if lm.curve_exists else None
            summary = classify(nl, lm, cond, ep)
            _PIPELINES[k] = SimpleNamespace(nl=nl, lm=lm, cond=cond, ep=ep,
                                            summary=summary, fixture=fx)
        return _PIPELINES[k]

    return get


@pytest.fixture(scope="session")
def traced(pipeline):
    """traced(name, params=None) -> 64-point CurveTrace (cached)."""

    def get(name, params=None, u_max=None, n_points=64):
        k = _key(name, params, u_max) + (n_points,)
        if k not in _TRACES:
            p = pipeline(name, params, u_max)
            _TRACES[k] = trace(p.nl, p.lm, n_points=n_points)
        return _TRACES[k]

    return get


# with-curve catalog parameterizations used by several suites
CURVE_CASES = [
    ("E1", None),
    ("E2", None),
    ("E3", None),
    ("E4", None),
    ("E5", {"a": 1.0, "b": 4.0}),
    ("E6", None),
    ("E7", None),
    ("E8", None),
    ("E9", {"a": -1.0, "b": 1.0, "c": 2.0}),
    ("E9", {"a": 1.0, "b": 1.0, "c": 2.0}),
    ("E9", {"a": 1.0, "b": 0.0, "c": 2.0}),
]


def case_id(case):
    name, params = case
    if params is None:
        return name
    return name + "[" + ",".join(f"{k}={v:g}" for k, v in
                                 sorted(params.items())) + "]"
