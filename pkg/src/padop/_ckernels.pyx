# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled arithmetic kernels on raw p-adic triples.

Semantics are identical to ``padop._pykernels`` (see its docstring for the
raw representation); valuations and precisions are C integers, units stay
Python integers.
"""

from .errors import DivisionByZero, PrecisionExhausted

cdef long long _EXACT = 1LL << 62
EXACT = _EXACT
ZERO = (_EXACT, 0, 0)


cdef inline bint _is_exact_zero(tuple a):
    return a[1] == 0 and <long long>a[0] >= _EXACT


cdef tuple _add(object p, list pw, tuple a, tuple b):
    cdef long long v1 = a[0], r1 = a[2], v2 = b[0], r2 = b[2]
    cdef long long m, d, t, top
    cdef object u1 = a[1], u2 = b[1], s
    if u1 == 0:
        if v1 >= _EXACT:
            return b
        if u2 == 0:
            return a if v1 <= v2 else b
        if v2 >= v1:
            return a
        m = v1 - v2
        return (v2, u2 % pw[m], m) if m < r2 else b
    if u2 == 0:
        if v2 >= _EXACT:
            return a
        if v1 >= v2:
            return b
        m = v2 - v1
        return (v1, u1 % pw[m], m) if m < r1 else a
    if v1 > v2:
        v1, v2 = v2, v1
        r1, r2 = r2, r1
        u1, u2 = u2, u1
    top = v1 + r1
    if v2 + r2 < top:
        top = v2 + r2
    m = top - v1
    d = v2 - v1
    if d >= m:
        return (v1, u1 % pw[m], m) if m < r1 else (v1, u1, r1)
    s = (u1 + u2 * pw[d]) % pw[m]
    if s == 0:
        return (top, 0, 0)
    t = 0
    while s % p == 0:
        s //= p
        t += 1
    return (v1 + t, s, m - t)


cdef tuple _neg(list pw, tuple a):
    cdef long long r = a[2]
    if a[1] == 0:
        return a
    return (a[0], pw[r] - a[1], r)


cdef tuple _mul(list pw, tuple a, tuple b):
    cdef long long v1 = a[0], r1 = a[2], v2 = b[0], r2 = b[2], r
    if a[1] == 0 or b[1] == 0:
        if v1 >= _EXACT or v2 >= _EXACT:
            return ZERO
        return (v1 + v2, 0, 0)
    r = r1 if r1 < r2 else r2
    return (v1 + v2, (a[1] * b[1]) % pw[r], r)


cdef tuple _sub(object p, list pw, tuple a, tuple b):
    cdef long long r2 = b[2]
    if b[1] == 0:
        return _add(p, pw, a, b)
    return _add(p, pw, a, (b[0], pw[r2] - b[1], r2))


def add(p, list pw, tuple a, tuple b):
    return _add(p, pw, a, b)


def neg(p, list pw, tuple a):
    return _neg(pw, a)


def sub(p, list pw, tuple a, tuple b):
    return _sub(p, pw, a, b)


def mul(p, list pw, tuple a, tuple b):
    return _mul(pw, a, b)


def inv(p, list pw, tuple a):
    cdef long long v = a[0], r = a[2]
    if a[1] == 0:
        if v >= _EXACT:
            raise DivisionByZero("inverse of exact zero")
        raise PrecisionExhausted(f"inverse of O({p}^{v}): value not certified nonzero")
    return (-v, pow(a[1], -1, pw[r]), r)


def div(p, list pw, tuple a, tuple b):
    return _mul(pw, a, inv(p, pw, b))


cdef tuple _dot(object p, list pw, object xs, object ys):
    cdef tuple acc = ZERO, x, y
    for x, y in zip(xs, ys):
        if _is_exact_zero(x) or _is_exact_zero(y):
            continue
        acc = _add(p, pw, acc, _mul(pw, x, y))
    return acc


def dot(p, list pw, xs, ys):
    return _dot(p, pw, xs, ys)


def matmul(p, list pw, A, B):
    cdef list cols = [list(c) for c in zip(*B)] if B else []
    cdef list out = []
    cdef list row_out
    for row in A:
        row_out = []
        for col in cols:
            row_out.append(_dot(p, pw, row, col))
        out.append(row_out)
    return out


def axpy(p, list pw, list y, tuple c, x, Py_ssize_t start=0):
    """In place: ``y[i] -= c * x[i]`` for ``i >= start``."""
    cdef Py_ssize_t i, n = len(y)
    cdef tuple xi
    if _is_exact_zero(c):
        return
    for i in range(start, n):
        xi = x[i]
        if _is_exact_zero(xi):
            continue
        y[i] = _sub(p, pw, y[i], _mul(pw, c, xi))


def scale(p, list pw, tuple c, x):
    return [_mul(pw, c, xi) for xi in x]


def sparse_axpy(p, list pw, dict y, tuple c, dict x):
    """In place on dict rows: ``y -= c * x``; zeros are dropped.

    Returns the lowest absolute precision among dropped inexact zeros.
    """
    cdef long long floor = _EXACT
    cdef tuple prod, new
    cdef object yv
    for k, xv in x.items():
        prod = _mul(pw, c, xv)
        yv = y.get(k)
        if yv is None:
            new = _neg(pw, prod)
        else:
            new = _sub(p, pw, yv, prod)
        if new[1] == 0:
            if <long long>new[0] < floor:
                floor = new[0]
            if yv is not None:
                del y[k]
        else:
            y[k] = new
    return floor


def sparse_scale(p, list pw, tuple c, dict x):
    return {k: _mul(pw, c, xv) for k, xv in x.items()}
