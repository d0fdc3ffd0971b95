"""Seeded random generators for scalars, matrices and split symmetric operators."""

from __future__ import annotations

import random

from .errors import PrecisionExhausted, Singular
from .linalg import PMatrix
from .padic import PadicScalar, default_prec


def random_scalar(rng: random.Random, p: int, vmin: int = 0, vmax: int = 2,
                  prec: int | None = None, zero_rate: float = 0.0) -> PadicScalar:
    prec = default_prec() if prec is None else prec
    if zero_rate and rng.random() < zero_rate:
        return PadicScalar.zero(p)
    u = rng.randrange(1, p**prec)
    while u % p == 0:
        u = rng.randrange(1, p**prec)
    return PadicScalar(p, rng.randint(vmin, vmax), u, prec)


def random_unit(rng: random.Random, p: int, prec: int | None = None) -> PadicScalar:
    return random_scalar(rng, p, 0, 0, prec)


def random_zp(rng: random.Random, p: int, prec: int | None = None) -> PadicScalar:
    """A random element of Z_p known to ``prec`` digits (absolute)."""
    prec = default_prec() if prec is None else prec
    n = rng.randrange(p**prec)
    if n == 0:
        return PadicScalar.zero(p, prec)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return PadicScalar(p, v, n, prec - v)


def random_matrix(rng: random.Random, p: int, n: int, vmin: int = 0, vmax: int = 2,
                  zero_rate: float = 0.1, m: int | None = None) -> PMatrix:
    m = n if m is None else m
    return PMatrix.from_entries(p, [[random_scalar(rng, p, vmin, vmax, zero_rate=zero_rate) for _ in range(m)]
                                    for _ in range(n)])


def random_antisymmetric(rng: random.Random, p: int, n: int, vmin: int = 0, vmax: int = 2) -> PMatrix:
    A = random_matrix(rng, p, n, vmin, vmax)
    return A - A.T


def random_orthogonal(rng: random.Random, p: int, n: int) -> PMatrix:
    """A random ``Q`` with ``Q^t Q = I`` and integral entries (``p`` odd).

    Cayley transform ``(I - K)(I + K)^{-1}`` of an integral antisymmetric
    ``K`` with ``det(I + K)`` a unit, composed with a signed permutation.
    """
    eye = PMatrix.identity(p, n)
    while True:
        Kmat = PMatrix.from_entries(p, [[0] * n for _ in range(n)])
        for i in range(n):
            for j in range(i + 1, n):
                x = rng.randrange(p * p)
                Kmat.rows[i][j] = PadicScalar.from_int(x, p).raw
                Kmat.rows[j][i] = PadicScalar.from_int(-x, p).raw
        try:
            inv = (eye + Kmat).inverse()
        except (Singular, PrecisionExhausted):
            continue
        if inv.norm() < 0:
            continue
        Q = (eye - Kmat) @ inv
        break
    perm = list(range(n))
    rng.shuffle(perm)
    signs = [rng.choice((1, -1)) for _ in range(n)]
    P = PMatrix.zeros(p, n)
    for i, j in enumerate(perm):
        P.rows[i][j] = PadicScalar.from_int(signs[i], p).raw
    return P @ Q


def distinct_spectrum(rng: random.Random, p: int, n: int, valuations=(0, 1, 2), power: int = 1) -> list[PadicScalar]:
    """``n`` eigenvalues with pairwise distinct (valuation, residue) pairs.

    With ``power > 1`` every value is a ``power``-th power ``mu**power`` of a
    scalar with distinct (valuation, residue) data, so roots of that order exist.
    """
    used = set()
    out = []
    attempts = 0
    while len(out) < n:
        attempts += 1
        if attempts > 10000:
            raise ValueError("cannot draw that many distinct eigenvalues")
        mu = random_scalar(rng, p, min(valuations), max(valuations))
        lam = mu**power if power > 1 else mu
        key = (lam.v, lam.unit % p)
        if key in used:
            continue
        used.add(key)
        out.append(lam)
    return out


def random_symmetric_split(rng: random.Random, p: int, n: int, valuations=(0, 1, 2), power: int = 1):
    """Symmetric ``A = Q^t diag(spectrum) Q`` with ``Q`` integral orthogonal.

    Returns ``(A, spectrum)``; ``||A|| = max |eigenvalue|``.
    """
    spectrum = distinct_spectrum(rng, p, n, valuations, power)
    Q = random_orthogonal(rng, p, n)
    A = Q.T @ PMatrix.diag(p, spectrum) @ Q
    return A, spectrum


def random_block_shape(rng: random.Random, total_max: int = 6, blocks_max: int = 3) -> list[int]:
    total = rng.randint(2, total_max)
    shape = []
    while total > 0 and len(shape) < blocks_max:
        k = rng.randint(1, total)
        shape.append(k)
        total -= k
    return shape
