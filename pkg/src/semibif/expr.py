"""Infix expression front end for nonlinearities f(u).

Parses text such as ``"sigma*u - u^(-p)"`` into an immutable tree, evaluates
it with typed domain errors, and produces exact first and second derivatives
by recursive symbolic differentiation.  Trees are frozen dataclasses, so all
operations here are pure and thread-safe.

Grammar (precedence high to low): ``^`` (right associative), unary ``-``,
``*`` ``/``, ``+`` ``-``.  Atoms: numbers, ``u``, ``pi``, ``e``, function
calls ``exp( ) ln( ) sqrt( ) abs( )``, parenthesised expressions.  Any other
identifier is a named parameter bound at evaluation time.

Simplification is limited to constant folding and the additive and
multiplicative identities; derivative trees are allowed to be large.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

from .errors import DifferentiationError, EvaluationError, ParseError

__all__ = [
    "Const", "Var", "Param", "Unary", "Binary", "ExprAst",
    "parse", "evaluate", "differentiate", "to_string", "bind",
]

UNARY_FUNCTIONS = ("exp", "ln", "sqrt", "abs")


# --------------------------------------------------------------------------
# tree nodes

@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    """The independent variable u."""


@dataclass(frozen=True)
class Param:
    name: str


@dataclass(frozen=True)
class Unary:
    op: str  # neg, exp, ln, sqrt, abs
    arg: "Node"


@dataclass(frozen=True)
class Binary:
    op: str  # add, sub, mul, div, pow
    lhs: "Node"
    rhs: "Node"


Node = Const | Var | Param | Unary | Binary


def _collect_params(node: Node, out: set[str]) -> None:
    if isinstance(node, Param):
        out.add(node.name)
    elif isinstance(node, Unary):
        _collect_params(node.arg, out)
    elif isinstance(node, Binary):
        _collect_params(node.lhs, out)
        _collect_params(node.rhs, out)


@dataclass(frozen=True)
class ExprAst:
    """An expression tree plus the set of parameter names it mentions."""

    root: Node
    params: frozenset[str] = field(default=frozenset())

    @staticmethod
    def of(root: Node) -> "ExprAst":
        names: set[str] = set()
        _collect_params(root, names)
        return ExprAst(root, frozenset(names))


# --------------------------------------------------------------------------
# tokenizer / parser

_TOKEN_RE = re.compile(r"\s*(?:(\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?"
                       r"|\d+(?:[eE][+-]?\d+)?)|([A-Za-z_][A-Za-z_0-9]*)|([-+*/^()]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            raise ParseError(f"unexpected character {stripped[0]!r}",
                             len(text) - len(stripped))
        if m.group(1) is not None:
            tokens.append(("num", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            tokens.append(("ident", m.group(2), m.start(2)))
        else:
            tokens.append(("op", m.group(3), m.start(3)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, symbol: str):
        kind, val, off = self.peek()
        if kind != "op" or val != symbol:
            raise ParseError(f"expected {symbol!r}", off)
        return self.advance()

    def parse(self) -> Node:
        node = self.additive()
        kind, val, off = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected trailing input {val!r}", off)
        return node

    def additive(self) -> Node:
        node = self.multiplicative()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.advance()
                rhs = self.multiplicative()
                node = Binary("add" if val == "+" else "sub", node, rhs)
            else:
                return node

    def multiplicative(self) -> Node:
        node = self.unary()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "*/":
                self.advance()
                rhs = self.unary()
                node = Binary("mul" if val == "*" else "div", node, rhs)
            else:
                return node

    def unary(self) -> Node:
        kind, val, _ = self.peek()
        if kind == "op" and val == "-":
            self.advance()
            arg = self.unary()
            if isinstance(arg, Const):
                return Const(-arg.value)  # keeps print/parse round trips exact
            return Unary("neg", arg)
        if kind == "op" and val == "+":
            self.advance()
            return self.unary()
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.advance()
            exponent = self.unary()  # right associative, binds above unary minus
            return Binary("pow", base, exponent)
        return base

    def atom(self) -> Node:
        kind, val, off = self.advance()
        if kind == "num":
            return Const(float(val))
        if kind == "ident":
            if val in UNARY_FUNCTIONS:
                self.expect_op("(")
                arg = self.additive()
                self.expect_op(")")
                return Unary(val, arg)
            nxt_kind, nxt_val, _ = self.peek()
            if nxt_kind == "op" and nxt_val == "(":
                raise ParseError(
                    f"unknown function {val!r} (valid functions: "
                    f"{', '.join(UNARY_FUNCTIONS)})", off)
            if val == "u":
                return Var()
            if val == "pi":
                return Const(math.pi)
            if val == "e":
                return Const(math.e)
            return Param(val)
        if kind == "op" and val == "(":
            node = self.additive()
            self.expect_op(")")
            return node
        raise ParseError(f"expected a value, got {val!r}" if val else
                         "unexpected end of input", off)


def parse(text: str) -> ExprAst:
    """Parse infix text into an expression tree.

    Raises ParseError with the byte offset of the first problem.  Unknown
    identifiers in call position are rejected; bare identifiers other than
    ``u``/``pi``/``e`` become named parameters.
    """
    return ExprAst.of(_Parser(text).parse())


# --------------------------------------------------------------------------
# evaluation

def _is_integral(x: float) -> bool:
    return abs(x) < 2 ** 31 and x == math.floor(x)


def _eval(node: Node, u: float, bindings: dict[str, float]) -> float:
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Var):
        return u
    if isinstance(node, Param):
        return bindings[node.name]
    if isinstance(node, Unary):
        x = _eval(node.arg, u, bindings)
        if node.op == "neg":
            return -x
        if node.op == "exp":
            try:
                return math.exp(x)
            except OverflowError:
                raise EvaluationError(f"overflow in exp({x!r})") from None
        if node.op == "ln":
            if x <= 0.0:
                raise EvaluationError(f"ln of non-positive value {x!r}")
            return math.log(x)
        if node.op == "sqrt":
            if x < 0.0:
                raise EvaluationError(f"sqrt of negative value {x!r}")
            return math.sqrt(x)
        if node.op == "abs":
            return abs(x)
        raise AssertionError(node.op)
    a = _eval(node.lhs, u, bindings)
    b = _eval(node.rhs, u, bindings)
    op = node.op
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        if b == 0.0:
            raise EvaluationError("division by zero")
        return a / b
    if op == "pow":
        if a < 0.0 and not _is_integral(b):
            raise EvaluationError(
                f"non-integer power {b!r} of non-positive base {a!r}")
        if a == 0.0:
            if b < 0.0:
                raise EvaluationError(f"zero base with negative power {b!r}")
            if not _is_integral(b):
                # u^c with non-integer c is only defined for u > 0
                raise EvaluationError(
                    f"non-integer power {b!r} of non-positive base 0.0")
            return 0.0 if b != 0.0 else 1.0
        try:
            return math.pow(a, b)
        except OverflowError:
            raise EvaluationError(f"overflow in {a!r}^{b!r}") from None
    raise AssertionError(op)


def evaluate(ast: ExprAst, u: float, bindings: dict[str, float] | None = None) -> float:
    """Evaluate the tree at u.

    ``bindings`` must cover exactly the tree's parameter set.  Domain
    violations raise EvaluationError rather than returning NaN.
    """
    bindings = dict(bindings or {})
    have, need = set(bindings), set(ast.params)
    if have != need:
        missing = sorted(need - have)
        extra = sorted(have - need)
        parts = []
        if missing:
            parts.append(f"missing parameter values: {', '.join(missing)}")
        if extra:
            parts.append(f"unused parameter values: {', '.join(extra)}")
        raise EvaluationError("; ".join(parts))
    return _eval(ast.root, float(u), bindings)


# --------------------------------------------------------------------------
# smart constructors: constant folding plus 0/1 identities, nothing more

def _fold_unary(op: str, arg: Node) -> Node | None:
    if isinstance(arg, Const):
        try:
            return Const(_eval(Unary(op, arg), 0.0, {}))
        except EvaluationError:
            return None  # leave the domain error for evaluation time
    return None


def _neg(a: Node) -> Node:
    if isinstance(a, Const):
        return Const(-a.value)
    return Unary("neg", a)


def _add(a: Node, b: Node) -> Node:
    if isinstance(a, Const) and a.value == 0.0:
        return b
    if isinstance(b, Const) and b.value == 0.0:
        return a
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value + b.value)
    return Binary("add", a, b)


def _sub(a: Node, b: Node) -> Node:
    if isinstance(b, Const) and b.value == 0.0:
        return a
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value - b.value)
    if isinstance(a, Const) and a.value == 0.0:
        return _neg(b)
    return Binary("sub", a, b)


def _mul(a: Node, b: Node) -> Node:
    if isinstance(a, Const):
        if a.value == 0.0:
            return Const(0.0)
        if a.value == 1.0:
            return b
    if isinstance(b, Const):
        if b.value == 0.0:
            return Const(0.0)
        if b.value == 1.0:
            return a
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value * b.value)
    return Binary("mul", a, b)


def _div(a: Node, b: Node) -> Node:
    if isinstance(b, Const) and b.value == 1.0:
        return a
    if isinstance(a, Const) and isinstance(b, Const) and b.value != 0.0:
        return Const(a.value / b.value)
    return Binary("div", a, b)


def _pow(a: Node, b: Node) -> Node:
    if isinstance(b, Const) and b.value == 1.0:
        return a
    if isinstance(a, Const) and isinstance(b, Const):
        try:
            return Const(_eval(Binary("pow", a, b), 0.0, {}))
        except EvaluationError:
            pass
    return Binary("pow", a, b)


def _fn(op: str, a: Node) -> Node:
    folded = _fold_unary(op, a)
    return folded if folded is not None else Unary(op, a)


# --------------------------------------------------------------------------
# differentiation

def _contains_var(node: Node) -> bool:
    if isinstance(node, Var):
        return True
    if isinstance(node, Unary):
        return _contains_var(node.arg)
    if isinstance(node, Binary):
        return _contains_var(node.lhs) or _contains_var(node.rhs)
    return False


def _d(node: Node) -> Node:
    if isinstance(node, (Const, Param)):
        return Const(0.0)
    if isinstance(node, Var):
        return Const(1.0)
    if isinstance(node, Unary):
        da = _d(node.arg)
        a = node.arg
        if node.op == "neg":
            return _neg(da)
        if node.op == "exp":
            return _mul(_fn("exp", a), da)
        if node.op == "ln":
            return _div(da, a)
        if node.op == "sqrt":
            return _div(da, _mul(Const(2.0), _fn("sqrt", a)))
        if node.op == "abs":
            raise DifferentiationError(
                "abs is not differentiable; the nonlinearity must be twice "
                "continuously differentiable")
        raise AssertionError(node.op)
    a, b = node.lhs, node.rhs
    da, db = None, None
    if node.op == "add":
        return _add(_d(a), _d(b))
    if node.op == "sub":
        return _sub(_d(a), _d(b))
    if node.op == "mul":
        return _add(_mul(_d(a), b), _mul(a, _d(b)))
    if node.op == "div":
        return _div(_sub(_mul(_d(a), b), _mul(a, _d(b))), _pow(b, Const(2.0)))
    if node.op == "pow":
        if not _contains_var(b):
            # c constant in u: d/du a^c = c a^(c-1) a'
            return _mul(_mul(b, _pow(a, _sub(b, Const(1.0)))), _d(a))
        if not _contains_var(a):
            # d/du c^b = c^b ln(c) b'
            return _mul(_mul(_pow(a, b), _fn("ln", a)), _d(b))
        return _mul(_pow(a, b),
                    _add(_mul(_d(b), _fn("ln", a)), _div(_mul(b, _d(a)), a)))
    raise AssertionError(node.op)


def differentiate(ast: ExprAst, order: int = 1) -> ExprAst:
    """Exact symbolic derivative of given order (1 or 2) with respect to u.

    Purely structural: the same input tree always produces the same output
    tree.  ``abs`` is rejected.
    """
    if order not in (1, 2):
        raise ValueError(f"order must be 1 or 2, got {order!r}")
    node = ast.root
    for _ in range(order):
        node = _d(node)
    return ExprAst.of(node)


def bind(ast: ExprAst, bindings: dict[str, float]) -> ExprAst:
    """Substitute parameter values, returning a parameter-free tree."""
    have, need = set(bindings), set(ast.params)
    if not need <= have:
        raise EvaluationError(
            f"missing parameter values: {', '.join(sorted(need - have))}")

    def sub(node: Node) -> Node:
        if isinstance(node, Param):
            return Const(float(bindings[node.name]))
        if isinstance(node, Unary):
            return Unary(node.op, sub(node.arg))
        if isinstance(node, Binary):
            return Binary(node.op, sub(node.lhs), sub(node.rhs))
        return node

    return ExprAst.of(sub(ast.root))


# --------------------------------------------------------------------------
# printing

_PREC = {"add": 1, "sub": 1, "mul": 2, "div": 2, "neg": 3, "pow": 4}
_SYMBOL = {"add": "+", "sub": "-", "mul": "*", "div": "/", "pow": "^"}


def _prec(node: Node) -> int:
    if isinstance(node, Binary):
        return _PREC[node.op]
    if isinstance(node, Unary) and node.op == "neg":
        return _PREC["neg"]
    return 5


def _print(node: Node) -> str:
    if isinstance(node, Const):
        return repr(node.value)
    if isinstance(node, Var):
        return "u"
    if isinstance(node, Param):
        return node.name
    if isinstance(node, Unary):
        if node.op == "neg":
            inner = _print(node.arg)
            if _prec(node.arg) < _PREC["neg"]:
                inner = f"({inner})"
            return f"-{inner}"
        return f"{node.op}({_print(node.arg)})"
    lhs, rhs = _print(node.lhs), _print(node.rhs)
    p = _PREC[node.op]
    if node.op == "pow":
        # right associative; a lower-or-equal precedence base needs parens,
        # as does a negative constant base (unary minus binds below ^)
        if _prec(node.lhs) <= p or (isinstance(node.lhs, Const)
                                    and node.lhs.value < 0):
            lhs = f"({lhs})"
        if _prec(node.rhs) < p:
            rhs = f"({rhs})"
    else:
        if _prec(node.lhs) < p:
            lhs = f"({lhs})"
        if _prec(node.rhs) <= p:
            rhs = f"({rhs})"
    return f"{lhs} {_SYMBOL[node.op]} {rhs}"


def to_string(ast: ExprAst) -> str:
    """Render the tree as parseable infix text; parse(to_string(a)) is
    structurally identical to a."""
    return _print(ast.root)
