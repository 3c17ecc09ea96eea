# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled tape evaluation: a stack machine over flat postfix programs.

Semantics match _pykernels exactly (IEEE arithmetic, silent NaN/inf).
"""

from libc.math cimport exp, fabs, log, pow, sqrt



cdef int OP_CONST = 0
cdef int OP_U = 1
cdef int OP_ADD = 2
cdef int OP_SUB = 3
cdef int OP_MUL = 4
cdef int OP_DIV = 5
cdef int OP_POW = 6
cdef int OP_NEG = 7
cdef int OP_EXP = 8
cdef int OP_LN = 9
cdef int OP_SQRT = 10
cdef int OP_ABS = 11


cdef inline double _run(const int[::1] code, const double[::1] consts,
                        double u, double* stack) noexcept nogil:
    cdef Py_ssize_t k, n = code.shape[0]
    cdef int sp = 0
    cdef int op
    for k in range(0, n, 2):
        op = code[k]
        if op == OP_CONST:
            stack[sp] = consts[code[k + 1]]
            sp += 1
        elif op == OP_U:
            stack[sp] = u
            sp += 1
        elif op == OP_ADD:
            sp -= 1
            stack[sp - 1] = stack[sp - 1] + stack[sp]
        elif op == OP_SUB:
            sp -= 1
            stack[sp - 1] = stack[sp - 1] - stack[sp]
        elif op == OP_MUL:
            sp -= 1
            stack[sp - 1] = stack[sp - 1] * stack[sp]
        elif op == OP_DIV:
            sp -= 1
            stack[sp - 1] = stack[sp - 1] / stack[sp]
        elif op == OP_POW:
            sp -= 1
            stack[sp - 1] = pow(stack[sp - 1], stack[sp])
        elif op == OP_NEG:
            stack[sp - 1] = -stack[sp - 1]
        elif op == OP_EXP:
            stack[sp - 1] = exp(stack[sp - 1])
        elif op == OP_LN:
            stack[sp - 1] = log(stack[sp - 1])
        elif op == OP_SQRT:
            stack[sp - 1] = sqrt(stack[sp - 1])
        elif op == OP_ABS:
            stack[sp - 1] = fabs(stack[sp - 1])
    return stack[sp - 1]


def tape_eval(const int[::1] code, const double[::1] consts, double u):
    cdef double stack[64]
    return _run(code, consts, u, stack)


def tape_eval_array(const int[::1] code, const double[::1] consts,
                    const double[::1] us, double[::1] out):
    cdef double stack[64]
    cdef Py_ssize_t i, n = us.shape[0]
    with nogil:
        for i in range(n):
            out[i] = _run(code, consts, us[i], stack)
