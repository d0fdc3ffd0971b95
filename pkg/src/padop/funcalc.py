"""Functional calculus for operators over Q_p.

Polynomials are evaluated by Horner's rule; continuous functions on Z_p are
handled through their Mahler expansions ``f = sum a_k binom(x, k)``, whose
sup norm on Z_p is ``max |a_k|``. Every evaluation that carries a norm bound
returns both sides of the inequality as exact exponents.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import BoundViolation, NotUnitriangular, PreconditionViolated, SeriesDiverges, SpectrumNotSplit
from .linalg import EigDecomposition, ExtMatrix, PMatrix, eig_symmetric, ldu_decompose
from .padic import ZERO, ExtScalar, PadicScalar, default_prec, nth_root


def _scalar(x, p: int) -> PadicScalar:
    if isinstance(x, PadicScalar):
        return x
    return PadicScalar.from_rational(Fraction(x), p)


def _exp_le(a, b) -> bool:
    """``p**-a <= p**-b`` for norm exponents (ZERO is +infinity)."""
    return a >= b


class PPolynomial:
    """``S(x) = sum_k coeffs[k] x**k`` over Q_p."""

    def __init__(self, p: int, coeffs):
        self.p = p
        cs = [_scalar(c, p) for c in coeffs]
        while len(cs) > 1 and cs[-1].is_exact_zero():
            cs.pop()
        self.coeffs = cs or [PadicScalar.zero(p)]

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        acc = self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = acc * x + c
        return acc

    def coeff_exponent(self) -> float:
        """Exponent of ``max_k |s_k|``."""
        return min(c.norm() for c in self.coeffs)

    def __repr__(self):
        return f"PPolynomial(p={self.p}, degree={self.degree})"


def poly_eval(S: PPolynomial, A):
    """``S(A)`` by Horner's rule (works for PMatrix and ExtMatrix)."""
    n = A.n
    eye = PMatrix.identity(A.p, n)
    if isinstance(A, ExtMatrix):
        eye = eye.to_ext(A.d)
    R = eye * S.coeffs[-1]
    for c in reversed(S.coeffs[:-1]):
        R = R @ A + eye * c
    return R


def _stirling2_row(j: int) -> list[int]:
    row = [1]
    for m in range(1, j + 1):
        new = [0] * (m + 1)
        for k in range(1, m + 1):
            new[k] = (row[k - 1] if k - 1 < len(row) else 0) + k * (row[k] if k < len(row) else 0)
        row = new
    return row


def to_mahler(S: PPolynomial) -> list[PadicScalar]:
    """Mahler coefficients of a polynomial: ``x**j = sum_k k! S2(j, k) binom(x, k)``."""
    out = [PadicScalar.zero(S.p)] * (S.degree + 1)
    for j, c in enumerate(S.coeffs):
        if c.is_exact_zero():
            continue
        row = _stirling2_row(j)
        for k in range(j + 1):
            w = row[k] * math.factorial(k)
            if w:
                out[k] = out[k] + c * w
    return out


def sup_norm_on_ball(S: PPolynomial, radius_exponent) -> float:
    """Exponent ``e`` with ``sup_{t in Q_p, |t| <= p**r} |S(t)| = p**-e``.

    ``radius_exponent`` is ``r``; ``-ZERO`` (the radius of the zero ball)
    reduces to ``|S(0)|``.
    """
    p = S.p
    if radius_exponent == -ZERO:
        return S.coeffs[0].norm()
    r = int(radius_exponent)
    scaled = PPolynomial(p, [c * PadicScalar(p, -r * j, 1) if not c.is_zero() else c for j, c in enumerate(S.coeffs)])
    return min(a.norm() for a in to_mahler(scaled))


@dataclass
class NormCheck:
    """Both sides of ``||result|| <= bound`` as exponents (larger is smaller)."""

    achieved: float
    bound: float

    @property
    def holds(self) -> bool:
        return _exp_le(self.achieved, self.bound)

    def as_dict(self) -> dict:
        return {"achieved_exp": _exp_json(self.achieved), "bound_exp": _exp_json(self.bound), "holds": self.holds}


def _exp_json(e):
    if e == ZERO:
        return "ZERO"
    if isinstance(e, Fraction):
        return str(e) if e.denominator != 1 else int(e)
    return int(e)


def poly_norm_check(S: PPolynomial, A: PMatrix, value=None) -> NormCheck:
    """``||S(A)|| <= sup_{|t| <= ||A||} |S(t)|``."""
    value = poly_eval(S, A) if value is None else value
    return NormCheck(value.norm(), sup_norm_on_ball(S, -A.norm()))


@dataclass
class BinomBound:
    bound: float
    achieved: float


def _is_unitriangular(C: PMatrix) -> bool:
    n = C.n
    lower = all(C.rows[i][j][1] == 0 for i in range(n) for j in range(i + 1, n))
    upper = all(C.rows[i][j][1] == 0 for i in range(n) for j in range(i))
    if not (lower or upper):
        return False
    return all((C[i, i] - 1).is_zero() for i in range(n))


def binom_expand_bound(C: PMatrix, k: int) -> BinomBound:
    """Bound ``max_{0 <= h <= min(n-1, k)} ||C - I||**h`` on ``||C**k||``.

    The directly computed ``||C**k||`` is checked against it.
    """
    if not _is_unitriangular(C):
        raise NotUnitriangular("expected a triangular matrix with unit diagonal")
    n = C.n
    e = (C - PMatrix.identity(C.p, n)).norm()
    hmax = min(n - 1, k)
    bound = 0 if e == ZERO else min(h * e for h in range(hmax + 1))
    achieved = (C**k).norm()
    if not _exp_le(achieved, bound):
        raise BoundViolation(f"||C^{k}|| = p^{-achieved} exceeds p^{-bound}")
    return BinomBound(bound, achieved)


def binomial(x, k: int):
    """``binom(x, k)`` for ``x`` in Z_p (PadicScalar) or an integer."""
    if isinstance(x, int):
        return math.comb(x, k) if x >= 0 else (-1) ** k * math.comb(k - x - 1, k)
    acc = x * 0 + 1
    for i in range(k):
        acc = acc * (x - i) / (i + 1)
    return acc


class MahlerSeries:
    """``f(x) = sum_k coeffs[k] binom(x, k)`` on Z_p.

    ``tail`` is the exponent of ``max_{k > K} |a_k|`` when known, else None.
    """

    def __init__(self, p: int, coeffs: list[PadicScalar], tail=None):
        self.p = p
        self.coeffs = [_scalar(c, p) for c in coeffs]
        self.tail = tail

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x, upto: int | None = None):
        K = self.order if upto is None else upto
        acc = x * 0
        b = x * 0 + 1
        for k in range(K + 1):
            if k:
                b = b * (x - (k - 1)) / k
            if not self.coeffs[k].is_exact_zero():
                acc = acc + self.coeffs[k] * b
        return acc

    def sup_exponent(self) -> float:
        """Exponent of ``max_k |a_k|``, the sup norm on Z_p of the truncated series."""
        e = min((c.norm() for c in self.coeffs), default=ZERO)
        if self.tail is not None:
            e = min(e, self.tail)
        return e

    def tail_exponent(self, k: int) -> float:
        """Exponent of ``max_{j > k} |a_j|`` over the known coefficients."""
        return min((c.norm() for c in self.coeffs[k + 1:]), default=ZERO)

    def as_polynomial(self) -> PPolynomial:
        """Expand ``sum a_k binom(x, k)`` into the monomial basis."""
        p = self.p
        out = [PadicScalar.zero(p)] * (self.order + 1)
        basis = [Fraction(1)]  # binom(x, k) as rational coefficients
        for k, a in enumerate(self.coeffs):
            if k:
                nxt = [Fraction(0)] * (k + 1)
                for i, c in enumerate(basis):
                    nxt[i + 1] += c / k
                    nxt[i] -= c * (k - 1) / k
                basis = nxt
            if a.is_exact_zero():
                continue
            for i, c in enumerate(basis):
                if c:
                    out[i] = out[i] + a * PadicScalar.from_rational(c, p, max(default_prec(), a.prec))
        return PPolynomial(p, out)


def mahler_from_samples(values: list, p: int | None = None) -> MahlerSeries:
    """Forward differences ``a_k = (Delta^k f)(0)`` from samples ``f(0..K)``."""
    if p is None:
        p = values[0].p
    row = [_scalar(v, p) for v in values]
    coeffs = []
    while row:
        coeffs.append(row[0])
        row = [b - a for a, b in zip(row, row[1:])]
    return MahlerSeries(p, coeffs)


@dataclass
class FuncalcResult:
    value: PMatrix | ExtMatrix
    check: NormCheck
    isometric: bool = True
    notes: str = ""


def _spectrum_in_zp(eig: EigDecomposition) -> list[PadicScalar]:
    vals = []
    for lam in eig.eigenvalues:
        if isinstance(lam, ExtScalar):
            if not lam.in_base_field():
                raise SpectrumNotSplit("Mahler evaluation needs eigenvalues in Z_p")
            lam = lam.a
        vals.append(lam)
    return vals


def funcalc_spectral(f, A: PMatrix, eig: EigDecomposition | None = None) -> FuncalcResult:
    """``f(A) = C^{-1} diag(f(lambda_i)) C`` for symmetric split ``A``, ``||A|| <= 1``."""
    if A.norm() < 0:
        raise PreconditionViolated("Mahler calculus needs ||A|| <= 1; rescale A by a power of p first")
    if isinstance(f, MahlerSeries) and f.tail is not None and f.tail < default_prec():
        raise SeriesDiverges(f"Mahler tail p^-{f.tail} is not below the working precision p^-{default_prec()}")
    eig = eig_symmetric(A) if eig is None else eig
    if isinstance(f, MahlerSeries):
        values = [f(lam) for lam in _spectrum_in_zp(eig)]
        bound = f.sup_exponent()
    else:
        values = [f(lam) for lam in eig.eigenvalues]
        bound = sup_norm_on_ball(f, -A.norm())
    out = eig.apply(values)
    return FuncalcResult(out, NormCheck(out.norm(), bound), eig.isometric)


@dataclass
class TriangularResult:
    value: PMatrix
    check: NormCheck
    direct: PMatrix
    discrepancy: float  # exponent of ||value - S(A)||


def funcalc_triangular(S: PPolynomial, A: PMatrix) -> TriangularResult:
    """``P_r^t S(C) S(T) S(E) P_c^t`` from the decomposition ``P_r A P_c = C T E``.

    The bound uses ``||S(C)|| <= max_k |s_k| * max_h ||C - I||**h`` (and the
    same for ``E``) with ``||S(T)|| <= sup_{|t| <= ||T||} |S(t)|``.
    """
    dec = ldu_decompose(A)
    n = A.n
    SC, ST, SE = poly_eval(S, dec.C), poly_eval(S, dec.T), poly_eval(S, dec.E)
    value = dec.unpermute(SC @ ST @ SE)
    eye = PMatrix.identity(A.p, n)
    sigma = S.coeff_exponent()

    def factor(M):
        e = (M - eye).norm()
        return 0 if e == ZERO else min(h * e for h in range(n))

    bound = sigma + factor(dec.C) + sup_norm_on_ball(S, -dec.T.norm()) + sigma + factor(dec.E)
    direct = poly_eval(S, A)
    return TriangularResult(value, NormCheck(value.norm(), bound), direct, (value - direct).norm())


class ClampFunction:
    """``f(t) = t`` on the unit ball and ``p**(2k-1) t`` on the shell ``p**(k-1) < |t| <= p**k``."""

    def __init__(self, p: int):
        self.p = p

    @staticmethod
    def shell(t) -> int:
        """The ``k >= 0`` with ``p**(k-1) < |t| <= p**k`` (0 inside the unit ball)."""
        if t.is_zero():
            return 0
        e = t.norm()
        return max(0, math.ceil(-e))

    def __call__(self, t):
        k = self.shell(t)
        if k == 0:
            return t
        return t * PadicScalar(self.p, 2 * k - 1, 1)

    def mahler_series(self, K: int) -> MahlerSeries:
        """Mahler coefficients of the restriction to Z_p from samples at ``0..K``."""
        return mahler_from_samples([self(PadicScalar.from_int(i, self.p)) for i in range(K + 1)], self.p)


def clamp(t):
    return ClampFunction(t.p)(t)


@dataclass
class RootResult:
    B: PMatrix
    polynomial: PPolynomial
    power_residual: float  # exponent of ||B**n - A||
    commutator: float  # exponent of ||[B, A]||
    poly_residual: float  # exponent of ||q(A) - B||
    isometric: bool


def vandermonde_interpolate(xs: list, ys: list) -> list:
    """Coefficients ``q`` with ``sum_j q_j xs[i]**j = ys[i]``."""
    from .linalg import _object_inverse

    n = len(xs)
    V = []
    for x in xs:
        row, acc = [], x * 0 + 1
        for _ in range(n):
            row.append(acc)
            acc = acc * x
        V.append(row)
    Vinv = _object_inverse(V)
    out = []
    for i in range(n):
        acc = Vinv[i][0] * ys[0]
        for j in range(1, n):
            acc = acc + Vinv[i][j] * ys[j]
        out.append(acc)
    return out


def operator_root(A: PMatrix, n: int) -> RootResult:
    """Canonical ``n``-th root ``B`` of a symmetric split ``A``, with ``B`` in F[A].

    Diagonal ``A`` may repeat eigenvalues (the root of ``I`` is ``I``); any
    other ``A`` needs a simple spectrum.
    """
    if A.is_diagonal():
        lams = [A[i, i] for i in range(A.n)]
        mus = [nth_root(lam, n) for lam in lams]
        B, isometric = PMatrix.diag(A.p, mus), True
    else:
        eig = eig_symmetric(A)
        lams = _spectrum_in_zp(eig)
        mus = [nth_root(lam, n) for lam in lams]
        B, isometric = eig.apply(mus), eig.isometric
        if isinstance(B, ExtMatrix):
            B = B.to_base()
    xs, ys = [], []
    for lam, mu in zip(lams, mus):
        if not any((lam - x).is_zero() for x in xs):
            xs.append(lam)
            ys.append(mu)
    q = PPolynomial(A.p, vandermonde_interpolate(xs, ys))
    return RootResult(
        B,
        q,
        (B**n - A).norm(),
        B.commutator(A).norm(),
        (poly_eval(q, A) - B).norm(),
        isometric,
    )
