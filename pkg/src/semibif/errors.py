"""Exception hierarchy shared across the package."""


class SemibifError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(SemibifError):
    """Malformed expression text; carries the byte offset of the problem."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class EvaluationError(SemibifError):
    """Domain violation or unbound parameter during expression evaluation."""


class DifferentiationError(SemibifError):
    """Expression cannot be differentiated (non-smooth node)."""


class NoSignChangeError(SemibifError):
    """Root bracketing requires opposite function signs at the endpoints."""


class MaxIterationsError(SemibifError):
    """Iteration budget exhausted; carries the best bracket found so far."""

    def __init__(self, message: str, bracket=None):
        super().__init__(message)
        self.bracket = bracket


class QuadratureError(SemibifError):
    """Quadrature failed to produce a usable value; may carry partial sums."""

    def __init__(self, message: str, partial_sums=None):
        super().__init__(message)
        self.partial_sums = partial_sums or []


class LimitProbeError(SemibifError):
    """All probe points of a numeric limit estimate failed to evaluate."""


class ProblemStructureError(SemibifError):
    """The nonlinearity violates the structural requirements (sign pattern
    near zero, integrability of the antiderivative, ...)."""


class TimeMapDomainError(SemibifError):
    """The time map is not defined at the requested amplitude."""


class BranchUnresolvedError(SemibifError):
    """A numeric limit probe was inconclusive and no override was given."""


class TraceError(SemibifError):
    """Curve tracing failed (bad grid request or mid-trace domain error)."""


class FixtureError(SemibifError):
    """Unknown fixture name or invalid fixture parameters."""
