"""Numeric kernel selection and the expression tape compiler.

Expression trees are compiled once into a flat postfix tape (opcode/operand
pairs plus a constant pool).  The tape is then evaluated by one of two
interchangeable kernels:

* ``semibif._ckernels`` — a Cython extension with tight C loops, used when
  the compiled module is importable;
* ``semibif._pykernels`` — a numpy implementation with identical semantics.

Tape evaluation follows IEEE arithmetic silently (log of a negative number
is NaN, division by zero is signed infinity, ...).  This is the hot path
used inside quadrature and ODE stepping, where invalid points are expected
near singular endpoints and are filtered by the caller.  The typed-error
evaluation path lives in :mod:`semibif.expr`.

Set the environment variable ``SEMIBIF_BACKEND=python`` (or call
:func:`set_backend`) to force the fallback, e.g. for benchmarking.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from . import _pykernels
from .errors import EvaluationError
from .expr import Const, ExprAst, Node, Param, Unary, Var, to_string

__all__ = ["Tape", "TapeFunction", "compile_tape", "backend_name",
           "set_backend", "available_backends"]

OP_CONST = 0
OP_U = 1
OP_ADD = 2
OP_SUB = 3
OP_MUL = 4
OP_DIV = 5
OP_POW = 6
OP_NEG = 7
OP_EXP = 8
OP_LN = 9
OP_SQRT = 10
OP_ABS = 11

MAX_STACK = 64

_impl = _pykernels
_name = "python"
if os.environ.get("SEMIBIF_BACKEND", "").strip().lower() not in ("python", "py"):
    try:
        from . import _ckernels as _cimpl
        _impl = _cimpl
        _name = "c"
    except ImportError:
        pass


def backend_name() -> str:
    """Name of the kernel implementation in use: 'c' or 'python'."""
    return _name


def available_backends() -> list[str]:
    names = ["python"]
    try:
        from . import _ckernels  # noqa: F401
        names.insert(0, "c")
    except ImportError:
        pass
    return names


def set_backend(name: str) -> str:
    """Switch the kernel implementation at runtime (testing/benchmarks)."""
    global _impl, _name
    if name == "python":
        _impl = _pykernels
        _name = "python"
    elif name == "c":
        from . import _ckernels
        _impl = _ckernels
        _name = "c"
    else:
        raise ValueError(f"unknown backend {name!r}")
    return _name


@dataclass(frozen=True)
class Tape:
    """Flat postfix program: int32 (op, operand) pairs plus constants."""

    code: np.ndarray
    consts: np.ndarray
    stack_need: int
    source: str


def compile_tape(ast: ExprAst | Node, bindings: dict[str, float] | None = None) -> Tape:
    """Lower a tree to a tape, resolving parameters to constants."""
    root = ast.root if isinstance(ast, ExprAst) else ast
    bindings = bindings or {}
    code: list[int] = []
    consts: list[float] = []

    def emit(op: int, arg: int = 0) -> None:
        code.append(op)
        code.append(arg)

    def const_index(value: float) -> int:
        consts.append(float(value))
        return len(consts) - 1

    def walk(node: Node) -> int:
        if isinstance(node, Const):
            emit(OP_CONST, const_index(node.value))
            return 1
        if isinstance(node, Var):
            emit(OP_U)
            return 1
        if isinstance(node, Param):
            if node.name not in bindings:
                raise EvaluationError(
                    f"missing parameter value: {node.name}")
            emit(OP_CONST, const_index(bindings[node.name]))
            return 1
        if isinstance(node, Unary):
            depth = walk(node.arg)
            emit({"neg": OP_NEG, "exp": OP_EXP, "ln": OP_LN,
                  "sqrt": OP_SQRT, "abs": OP_ABS}[node.op])
            return depth
        depth_l = walk(node.lhs)
        depth_r = walk(node.rhs)
        emit({"add": OP_ADD, "sub": OP_SUB, "mul": OP_MUL,
              "div": OP_DIV, "pow": OP_POW}[node.op])
        return max(depth_l, depth_r + 1)

    depth = walk(root)
    if depth > MAX_STACK:
        raise EvaluationError(f"expression too deep for the tape evaluator "
                              f"(stack {depth} > {MAX_STACK})")
    return Tape(np.asarray(code, dtype=np.int32),
                np.asarray(consts, dtype=np.float64),
                depth,
                to_string(ExprAst.of(root)))


class TapeFunction:
    """A vectorized numeric function compiled from an expression tree.

    Accepts a scalar or a float64 array; evaluation is pure and thread-safe.
    """

    __slots__ = ("tape",)

    def __init__(self, ast: ExprAst | Node, bindings: dict[str, float] | None = None):
        self.tape = compile_tape(ast, bindings)

    def __call__(self, u):
        if isinstance(u, np.ndarray):
            return self.many(u)
        return _impl.tape_eval(self.tape.code, self.tape.consts, float(u))

    def many(self, us: np.ndarray) -> np.ndarray:
        us = np.ascontiguousarray(us, dtype=np.float64)
        out = np.empty_like(us)
        _impl.tape_eval_array(self.tape.code, self.tape.consts, us, out)
        return out

    def __repr__(self):
        return f"TapeFunction({self.tape.source!r})"
