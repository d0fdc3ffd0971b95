"""Pure-Python arithmetic kernels on raw p-adic triples.

A raw element is a tuple ``(v, u, r)``:

* nonzero: value ``p**v * u`` known modulo ``p**(v + r)``, with ``u`` a unit
  reduced modulo ``p**r`` and ``r >= 1``;
* ``u == 0``: a zero known only to absolute precision ``O(p**v)``;
* ``v >= EXACT`` (with ``u == 0``): the exact zero.

``pw`` is the table ``[p**0, p**1, ...]`` from ``padop._backend.powers``.
This module must stay in lockstep with ``_ckernels.pyx``.
"""

from .errors import DivisionByZero, PrecisionExhausted

EXACT = 1 << 62
ZERO = (EXACT, 0, 0)


def add(p, pw, a, b):
    v1, u1, r1 = a
    v2, u2, r2 = b
    if u1 == 0:
        if v1 >= EXACT:
            return b
        if u2 == 0:
            return a if v1 <= v2 else b
        if v2 >= v1:
            return a
        m = v1 - v2
        return (v2, u2 % pw[m], m) if m < r2 else b
    if u2 == 0:
        if v2 >= EXACT:
            return a
        if v1 >= v2:
            return b
        m = v2 - v1
        return (v1, u1 % pw[m], m) if m < r1 else a
    if v1 > v2:
        v1, u1, r1, v2, u2, r2 = v2, u2, r2, v1, u1, r1
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


def neg(p, pw, a):
    v, u, r = a
    if u == 0:
        return a
    return (v, pw[r] - u, r)


def sub(p, pw, a, b):
    v2, u2, r2 = b
    if u2 == 0:
        return add(p, pw, a, b)
    return add(p, pw, a, (v2, pw[r2] - u2, r2))


def mul(p, pw, a, b):
    v1, u1, r1 = a
    v2, u2, r2 = b
    if u1 == 0 or u2 == 0:
        if v1 >= EXACT or v2 >= EXACT:
            return ZERO
        return (v1 + v2, 0, 0)
    r = r1 if r1 < r2 else r2
    return (v1 + v2, (u1 * u2) % pw[r], r)


def inv(p, pw, a):
    v, u, r = a
    if u == 0:
        if v >= EXACT:
            raise DivisionByZero("inverse of exact zero")
        raise PrecisionExhausted(f"inverse of O({p}^{v}): value not certified nonzero")
    return (-v, pow(u, -1, pw[r]), r)


def div(p, pw, a, b):
    return mul(p, pw, a, inv(p, pw, b))


def dot(p, pw, xs, ys):
    acc = ZERO
    for x, y in zip(xs, ys):
        if x[1] == 0 and x[0] >= EXACT:
            continue
        if y[1] == 0 and y[0] >= EXACT:
            continue
        acc = add(p, pw, acc, mul(p, pw, x, y))
    return acc


def matmul(p, pw, A, B):
    cols = list(zip(*B)) if B else []
    return [[dot(p, pw, row, col) for col in cols] for row in A]


def axpy(p, pw, y, c, x, start=0):
    """In place: ``y[i] -= c * x[i]`` for ``i >= start``."""
    if c[1] == 0 and c[0] >= EXACT:
        return
    for i in range(start, len(y)):
        xi = x[i]
        if xi[1] == 0 and xi[0] >= EXACT:
            continue
        y[i] = sub(p, pw, y[i], mul(p, pw, c, xi))


def scale(p, pw, c, x):
    return [mul(p, pw, c, xi) for xi in x]


def sparse_axpy(p, pw, y, c, x):
    """In place on dict rows: ``y -= c * x``; zeros are dropped.

    Returns the lowest absolute precision among dropped inexact zeros
    (``EXACT`` when every cancellation was exact).
    """
    floor = EXACT
    for k, xv in x.items():
        prod = mul(p, pw, c, xv)
        yv = y.get(k)
        new = neg(p, pw, prod) if yv is None else sub(p, pw, yv, prod)
        if new[1] == 0:
            if new[0] < floor:
                floor = new[0]
            if yv is not None:
                del y[k]
        else:
            y[k] = new
    return floor


def sparse_scale(p, pw, c, x):
    return {k: mul(p, pw, c, xv) for k, xv in x.items()}
