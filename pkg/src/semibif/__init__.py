"""semibif: bifurcation-curve analysis for semipositone two-point boundary
value problems -u'' = lambda f(u), u(-1) = u(1) = 0, via the time-map
method.

Workflow: parse f, build the callable bundle, locate landmarks, check the
structural conditions, compute the curve-end invariants, classify the
curve's exact shape, trace it, and cross-validate against an independent
shooting integration.
"""

from .analysis import (ConditionReport, Landmarks, Nonlinearity,
                       build_nonlinearity, check_conditions,
                       locate_landmarks)
from .backend import TapeFunction, backend_name, set_backend
from .calculus import (BracketedRoot, LimitEstimate, QuadratureResult,
                       estimate_limit_at_infinity, estimate_limit_at_zero,
                       find_root, integrate)
from .classify import (CurveSummary, ShapeClass, ShapeKind, classify,
                       empirical_shape)
from .errors import SemibifError
from .expr import ExprAst, bind, differentiate, evaluate, parse, to_string
from .fixtures import CATALOG, build_fixture, get_fixture
from .shooting import ShotResult, shoot, verify_trace
from .timemap import (CurveEndpoints, GResult, KappaResult, TimeMapPoint,
                      big_G, compute_endpoints, kappa, lambda_hat, time_map,
                      time_map_derivative)
from .tracing import CurveTrace, locate_minimum, trace, write_csv, write_svg

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "SemibifError",
    "parse", "evaluate", "differentiate", "bind", "to_string", "ExprAst",
    "TapeFunction", "backend_name", "set_backend",
    "integrate", "find_root", "estimate_limit_at_zero",
    "estimate_limit_at_infinity", "QuadratureResult", "BracketedRoot",
    "LimitEstimate",
    "Nonlinearity", "Landmarks", "ConditionReport", "build_nonlinearity",
    "locate_landmarks", "check_conditions",
    "TimeMapPoint", "CurveEndpoints", "GResult", "KappaResult", "time_map",
    "time_map_derivative", "lambda_hat", "big_G", "kappa",
    "compute_endpoints",
    "ShapeKind", "ShapeClass", "CurveSummary", "classify", "empirical_shape",
    "CurveTrace", "trace", "locate_minimum", "write_csv", "write_svg",
    "ShotResult", "shoot", "verify_trace",
    "CATALOG", "get_fixture", "build_fixture",
]
