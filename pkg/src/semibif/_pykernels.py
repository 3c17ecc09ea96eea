"""Pure-Python (numpy) tape evaluation, semantics-identical to _ckernels.

Arithmetic follows IEEE silently: invalid operations produce NaN, division
by zero produces signed infinity.  Used when the compiled extension is not
available, or when forced via SEMIBIF_BACKEND=python.
"""

from __future__ import annotations

import numpy as np

_OP_CONST = 0
_OP_U = 1
_OP_ADD = 2
_OP_SUB = 3
_OP_MUL = 4
_OP_DIV = 5
_OP_POW = 6
_OP_NEG = 7
_OP_EXP = 8
_OP_LN = 9
_OP_SQRT = 10
_OP_ABS = 11


def tape_eval_array(code: np.ndarray, consts: np.ndarray,
                    us: np.ndarray, out: np.ndarray) -> None:
    stack: list[np.ndarray] = []
    with np.errstate(all="ignore"):
        for k in range(0, len(code), 2):
            op = code[k]
            if op == _OP_CONST:
                stack.append(np.full_like(us, consts[code[k + 1]]))
            elif op == _OP_U:
                stack.append(us.copy())
            elif op == _OP_NEG:
                np.negative(stack[-1], out=stack[-1])
            elif op == _OP_EXP:
                np.exp(stack[-1], out=stack[-1])
            elif op == _OP_LN:
                np.log(stack[-1], out=stack[-1])
            elif op == _OP_SQRT:
                np.sqrt(stack[-1], out=stack[-1])
            elif op == _OP_ABS:
                np.abs(stack[-1], out=stack[-1])
            else:
                b = stack.pop()
                a = stack[-1]
                if op == _OP_ADD:
                    np.add(a, b, out=a)
                elif op == _OP_SUB:
                    np.subtract(a, b, out=a)
                elif op == _OP_MUL:
                    np.multiply(a, b, out=a)
                elif op == _OP_DIV:
                    np.divide(a, b, out=a)
                elif op == _OP_POW:
                    np.power(a, b, out=a)
        out[...] = stack[-1]


def tape_eval(code: np.ndarray, consts: np.ndarray, u: float) -> float:
    buf = np.array([u], dtype=np.float64)
    out = np.empty(1, dtype=np.float64)
    tape_eval_array(code, consts, buf, out)
    return float(out[0])
