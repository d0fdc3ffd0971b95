"""Elements of Q_p and of its quadratic extensions Q_p(sqrt(d)).

Precision model: capped relative precision with exact valuation. A nonzero
:class:`PadicScalar` is ``p**v * u`` with ``u`` a unit known modulo ``p**prec``.
Arithmetic operators never invent digits: when a sum cancels completely the
result is an *inexact zero* ``O(p**k)`` that remembers how much is known.
The strict :func:`arith` entry point refuses such cancellations instead.
"""

from __future__ import annotations

import math
import os
from fractions import Fraction
from typing import Union

from ._backend import EXACT, MAX_PREC, ZERO_RAW, kernels as K, powers
from .errors import (
    DivisionByZero,
    ExtensionMismatch,
    NoResidueRoot,
    PrecisionExhausted,
    PrimeMismatch,
    RamifiedCase,
    UnsupportedPrime,
)

#: Valuation exponent of zero, so that ``|0| = p**-ZERO = 0``.
ZERO = math.inf

_default_prec = int(os.environ.get("PADOP_PREC", "32"))


def default_prec() -> int:
    return _default_prec


def set_default_prec(n: int) -> None:
    global _default_prec
    if not 1 <= n <= MAX_PREC:
        raise ValueError(f"precision must lie in [1, {MAX_PREC}]")
    _default_prec = n


def valuation_int(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of 0")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


def least_nonresidue(p: int) -> int:
    """Smallest positive quadratic non-residue modulo an odd prime."""
    for t in range(2, p):
        if pow(t, (p - 1) // 2, p) == p - 1:
            return t
    raise UnsupportedPrime(f"no quadratic non-residue modulo {p}")


def _unit_digits(u: int, p: int, r: int) -> list[int]:
    out = []
    for _ in range(r):
        u, d = divmod(u, p)
        out.append(d)
    return out


class PadicScalar:
    """An element of Q_p at capped relative precision."""

    __slots__ = ("p", "raw")

    def __init__(self, p: int, v: int | None = None, unit: int = 0, prec: int | None = None):
        self.p = p
        if unit == 0:
            self.raw = ZERO_RAW
            return
        if unit % p == 0:
            raise ValueError("unit part must not be divisible by p")
        prec = _default_prec if prec is None else prec
        if not 1 <= prec <= MAX_PREC:
            raise ValueError(f"precision must lie in [1, {MAX_PREC}]")
        self.raw = (v, unit % powers(p)[prec], prec)

    @classmethod
    def _make(cls, p: int, raw: tuple) -> "PadicScalar":
        obj = object.__new__(cls)
        obj.p = p
        obj.raw = raw
        return obj

    # -- construction -------------------------------------------------
    @classmethod
    def from_int(cls, n: int, p: int, prec: int | None = None) -> "PadicScalar":
        if n == 0:
            return cls._make(p, ZERO_RAW)
        v = valuation_int(n, p)
        return cls(p, v, n // p**v, prec)

    @classmethod
    def from_rational(cls, q, p: int, prec: int | None = None) -> "PadicScalar":
        q = Fraction(q)
        if q == 0:
            return cls._make(p, ZERO_RAW)
        prec = _default_prec if prec is None else prec
        num, den = q.numerator, q.denominator
        v = 0
        while num % p == 0:
            num //= p
            v += 1
        while den % p == 0:
            den //= p
            v -= 1
        mod = powers(p)[prec]
        return cls(p, v, num * pow(den, -1, mod) % mod, prec)

    @classmethod
    def from_digits(cls, p: int, v: int, digits: list[int]) -> "PadicScalar":
        if not digits or digits[0] == 0:
            raise ValueError("digits must be nonempty with a nonzero leading digit")
        u = 0
        for d in reversed(digits):
            if not 0 <= d < p:
                raise ValueError(f"digit {d} outside [0, {p - 1}]")
            u = u * p + d
        return cls(p, v, u, len(digits))

    @classmethod
    def zero(cls, p: int, abs_prec: int | None = None) -> "PadicScalar":
        """Exact zero, or ``O(p**abs_prec)`` when ``abs_prec`` is given."""
        return cls._make(p, ZERO_RAW if abs_prec is None else (abs_prec, 0, 0))

    @classmethod
    def one(cls, p: int, prec: int | None = None) -> "PadicScalar":
        return cls(p, 0, 1, prec)

    # -- inspection ---------------------------------------------------
    @property
    def v(self) -> int | None:
        """Exact valuation, ``None`` for any zero."""
        return None if self.raw[1] == 0 else self.raw[0]

    @property
    def unit(self) -> int:
        return self.raw[1]

    @property
    def prec(self) -> int:
        """Relative precision (number of known digits); 0 for zeros."""
        return self.raw[2]

    @property
    def abs_prec(self) -> float:
        """Absolute precision: the value is known modulo ``p**abs_prec``."""
        v, u, r = self.raw
        if u == 0:
            return ZERO if v >= EXACT else v
        return v + r

    @property
    def digits(self) -> list[int]:
        v, u, r = self.raw
        return _unit_digits(u, self.p, r) if u else []

    def is_zero(self) -> bool:
        return self.raw[1] == 0

    def is_exact_zero(self) -> bool:
        return self.raw[1] == 0 and self.raw[0] >= EXACT

    def norm(self) -> float:
        """Exponent ``k`` with ``|x| = p**-k``; :data:`ZERO` for zero."""
        return ZERO if self.raw[1] == 0 else self.raw[0]

    def residue(self) -> int:
        """Leading digit of the unit part (0 for zero)."""
        return self.raw[1] % self.p

    def as_fraction(self) -> Fraction:
        """Rational representative ``p**v * u`` of the known digits."""
        v, u, _ = self.raw
        if u == 0:
            return Fraction(0)
        return Fraction(u * self.p**v) if v >= 0 else Fraction(u, self.p**-v)

    def rational(self) -> Fraction | None:
        """Smallest rational ``a/b`` agreeing with the known digits, if one is small enough.

        Rational reconstruction with ``|a|, |b| <= sqrt(p**prec / 2)``;
        ``None`` when no such fraction exists.
        """
        v, u, r = self.raw
        if u == 0:
            return Fraction(0)
        m = self.p**r
        bound = math.isqrt(m // 2)
        r0, r1, s0, s1 = m, u, 0, 1
        while r1 > bound:
            q = r0 // r1
            r0, r1 = r1, r0 - q * r1
            s0, s1 = s1, s0 - q * s1
        if s1 == 0 or abs(s1) > bound or math.gcd(r1, s1) != 1:
            return None
        return Fraction(r1, s1) * Fraction(self.p) ** v

    def with_prec(self, prec: int) -> "PadicScalar":
        """Truncate to at most ``prec`` relative digits."""
        v, u, r = self.raw
        if u == 0 or prec >= r:
            return self
        return PadicScalar._make(self.p, (v, u % powers(self.p)[prec], prec))

    # -- arithmetic ---------------------------------------------------
    def _coerce(self, other) -> "PadicScalar":
        if isinstance(other, PadicScalar):
            if other.p != self.p:
                raise PrimeMismatch(f"{self.p} vs {other.p}")
            return other
        if isinstance(other, (int, Fraction)):
            prec = max(_default_prec, self.raw[2])
            return PadicScalar.from_rational(other, self.p, prec)
        return NotImplemented

    def __add__(self, other):
        if isinstance(other, ExtScalar):
            return NotImplemented
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return PadicScalar._make(self.p, K.add(self.p, powers(self.p), self.raw, o.raw))

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, ExtScalar):
            return NotImplemented
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return PadicScalar._make(self.p, K.sub(self.p, powers(self.p), self.raw, o.raw))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        if isinstance(other, ExtScalar):
            return NotImplemented
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return PadicScalar._make(self.p, K.mul(self.p, powers(self.p), self.raw, o.raw))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, ExtScalar):
            return NotImplemented
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return PadicScalar._make(self.p, K.div(self.p, powers(self.p), self.raw, o.raw))

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o / self

    def __neg__(self):
        return PadicScalar._make(self.p, K.neg(self.p, powers(self.p), self.raw))

    def __pos__(self):
        return self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return (PadicScalar.one(self.p, max(self.raw[2], 1)) / self) ** -n
        result = PadicScalar.one(self.p, max(_default_prec, self.raw[2]))
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inverse(self) -> "PadicScalar":
        return PadicScalar._make(self.p, K.inv(self.p, powers(self.p), self.raw))

    def __eq__(self, other):
        if isinstance(other, ExtScalar):
            return other == self
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return (self - o).is_zero()

    __hash__ = None

    def __repr__(self):
        v, u, r = self.raw
        if u == 0:
            return f"O({self.p}^{v})" if v < EXACT else "0"
        return f"PadicScalar(p={self.p}, v={v}, digits={_unit_digits(u, self.p, min(r, 8))}{'...' if r > 8 else ''}, prec={r})"


Scalar = Union[PadicScalar, "ExtScalar"]


# -- strict arithmetic -------------------------------------------------
def arith(kind: str, x: PadicScalar, y: PadicScalar | None = None) -> PadicScalar:
    """Field operation with strict cancellation policy.

    ``kind`` is one of ``add, sub, mul, div, neg``. A sum of nonzero
    operands whose known digits all cancel raises :class:`PrecisionExhausted`
    rather than returning a zero.
    """
    if kind == "neg":
        return -x
    if y is None:
        raise TypeError(f"{kind} needs two operands")
    if x.p != y.p:
        raise PrimeMismatch(f"{x.p} vs {y.p}")
    if kind == "mul":
        return x * y
    if kind == "div":
        if y.is_zero():
            if y.is_exact_zero():
                raise DivisionByZero("division by zero")
            raise PrecisionExhausted("divisor is not certified nonzero")
        return x / y
    if kind not in ("add", "sub"):
        raise ValueError(f"unknown operation {kind!r}")
    out = x + y if kind == "add" else x - y
    if out.is_zero() and not (x.is_zero() or y.is_zero()):
        raise PrecisionExhausted(f"all digits cancelled in {kind}; result is O({x.p}^{out.abs_prec})")
    return out


def norm(x) -> float:
    """Exponent ``k`` with ``|x| = p**-k`` (a Fraction over ramified extensions)."""
    return x.norm()


# -- roots -------------------------------------------------------------
def _residue_roots(c: int, n: int, p: int) -> list[int]:
    return [t for t in range(1, p) if pow(t, n, p) == c % p]


def _lift_root(u: int, n: int, t: int, p: int, r: int) -> int:
    """Newton lift of a simple root ``t`` of ``X**n - u`` from mod p to mod p**r."""
    k = 1
    while k < r:
        k = min(2 * k, r)
        mod = p**k
        f = (pow(t, n, mod) - u) % mod
        df = n * pow(t, n - 1, mod) % mod
        t = (t - f * pow(df, -1, mod)) % mod
    return t


def _unit_root(u: int, n: int, p: int, r: int) -> int:
    roots = _residue_roots(u % p, n, p)
    if not roots:
        raise NoResidueRoot(f"X^{n} = {u % p} has no solution mod {p}")
    t0 = roots[0]
    root = _lift_root(u, n, t0, p, r)
    assert pow(root, n, p**r) == u % p**r
    return root


def nth_root(x: PadicScalar, n: int) -> PadicScalar:
    """Canonical ``n``-th root in Q_p (least residue digit among residue roots)."""
    p = x.p
    if n < 2:
        raise ValueError("root order must be at least 2")
    if p == 2:
        raise UnsupportedPrime("root extraction at p = 2 is not supported")
    if math.gcd(n, p) != 1:
        raise RamifiedCase(f"gcd({n}, {p}) > 1")
    if x.is_zero():
        if x.is_exact_zero():
            return x
        raise PrecisionExhausted("root of a zero known only to finite precision")
    v, u, r = x.raw
    if v % n:
        raise RamifiedCase(f"{n} does not divide the valuation {v}")
    return PadicScalar(p, v // n, _unit_root(u, n, p, r), r)


def sqrt(x: PadicScalar) -> "ExtScalar":
    """Canonical square root, in Q_p or in the smallest needed Q_p(sqrt(d))."""
    p = x.p
    if p == 2:
        raise UnsupportedPrime("square roots at p = 2 are not supported")
    if x.is_zero():
        if x.is_exact_zero():
            return ExtScalar.embed(x, "1")
        raise PrecisionExhausted("square root of a zero known only to finite precision")
    v, u, r = x.raw
    residue_square = pow(u % p, (p - 1) // 2, p) == 1
    unr = least_nonresidue(p)
    mod = powers(p)[r]
    w = u if residue_square else u * pow(unr, -1, mod) % mod
    root = _unit_root(w, 2, p, r)
    if v % 2 == 0:
        y = PadicScalar(p, v // 2, root, r)
        if residue_square:
            return ExtScalar(p, "1", y, PadicScalar.zero(p))
        return ExtScalar(p, "u", PadicScalar.zero(p), y)
    y = PadicScalar(p, (v - 1) // 2, root, r)
    return ExtScalar(p, "p" if residue_square else "pu", PadicScalar.zero(p), y)


# -- quadratic extensions ---------------------------------------------
D_CODES = ("1", "u", "p", "pu")


def disc_value(p: int, d: str, prec: int | None = None) -> PadicScalar:
    """The discriminant named by code ``d`` as an element of Q_p."""
    if d == "1":
        return PadicScalar.one(p, prec)
    if d == "u":
        return PadicScalar.from_int(least_nonresidue(p), p, prec)
    if d == "p":
        return PadicScalar.from_int(p, p, prec)
    if d == "pu":
        return PadicScalar.from_int(p * least_nonresidue(p), p, prec)
    raise ValueError(f"unknown discriminant code {d!r}")


def common_disc(d1: str, d2: str) -> str:
    if d1 == d2 or d2 == "1":
        return d1
    if d1 == "1":
        return d2
    raise ExtensionMismatch(f"Q_p(sqrt {d1}) vs Q_p(sqrt {d2})")


class ExtScalar:
    """``a + b*sqrt(d)`` with ``a, b`` in Q_p and ``d`` one of :data:`D_CODES`."""

    __slots__ = ("p", "d", "a", "b")

    def __init__(self, p: int, d: str, a: PadicScalar, b: PadicScalar):
        if d not in D_CODES:
            raise ValueError(f"unknown discriminant code {d!r}")
        if d == "1" and not b.is_zero():
            raise ValueError("d = 1 requires b = 0")
        if a.p != p or b.p != p:
            raise PrimeMismatch("component prime differs from extension prime")
        self.p = p
        self.d = d
        self.a = a
        self.b = b

    @classmethod
    def embed(cls, x, d: str = "1") -> "ExtScalar":
        if isinstance(x, ExtScalar):
            if x.d == d:
                return x
            if x.d == "1":
                return cls(x.p, d, x.a, x.b)
            raise ExtensionMismatch(f"cannot move Q_p(sqrt {x.d}) element into Q_p(sqrt {d})")
        return cls(x.p, d, x, PadicScalar.zero(x.p))

    def _dval(self) -> PadicScalar:
        prec = max(self.a.prec, self.b.prec, 1)
        return disc_value(self.p, self.d, max(prec, _default_prec))

    def _lift(self, other):
        if isinstance(other, ExtScalar):
            if other.p != self.p:
                raise PrimeMismatch(f"{self.p} vs {other.p}")
            d = common_disc(self.d, other.d)
            return ExtScalar.embed(self, d), ExtScalar.embed(other, d)
        if isinstance(other, PadicScalar):
            if other.p != self.p:
                raise PrimeMismatch(f"{self.p} vs {other.p}")
            return self, ExtScalar.embed(other, self.d)
        if isinstance(other, (int, Fraction)):
            prec = max(_default_prec, self.a.prec, self.b.prec)
            return self, ExtScalar.embed(PadicScalar.from_rational(other, self.p, prec), self.d)
        return None

    def __add__(self, other):
        pair = self._lift(other)
        if pair is None:
            return NotImplemented
        x, y = pair
        return ExtScalar(x.p, x.d, x.a + y.a, x.b + y.b)

    __radd__ = __add__

    def __sub__(self, other):
        pair = self._lift(other)
        if pair is None:
            return NotImplemented
        x, y = pair
        return ExtScalar(x.p, x.d, x.a - y.a, x.b - y.b)

    def __rsub__(self, other):
        pair = self._lift(other)
        if pair is None:
            return NotImplemented
        x, y = pair
        return y - x

    def __mul__(self, other):
        pair = self._lift(other)
        if pair is None:
            return NotImplemented
        x, y = pair
        if x.d == "1":
            return ExtScalar(x.p, "1", x.a * y.a, x.b)
        a = x.a * y.a + x._dval() * (x.b * y.b)
        b = x.a * y.b + x.b * y.a
        return ExtScalar(x.p, x.d, a, b)

    __rmul__ = __mul__

    def conj(self) -> "ExtScalar":
        return ExtScalar(self.p, self.d, self.a, -self.b)

    def norm_form(self) -> PadicScalar:
        """The field norm ``a**2 - d*b**2`` down to Q_p."""
        if self.d == "1":
            return self.a * self.a
        return self.a * self.a - self._dval() * (self.b * self.b)

    def inverse(self) -> "ExtScalar":
        if self.d == "1":
            return ExtScalar(self.p, "1", self.a.inverse(), self.b)
        if self.is_zero():
            if self.a.is_exact_zero() and self.b.is_exact_zero():
                raise DivisionByZero("inverse of exact zero")
            raise PrecisionExhausted("inverse of a zero known only to finite precision")
        n_inv = self.norm_form().inverse()
        c = self.conj()
        return ExtScalar(self.p, self.d, c.a * n_inv, c.b * n_inv)

    def __truediv__(self, other):
        pair = self._lift(other)
        if pair is None:
            return NotImplemented
        x, y = pair
        return x * y.inverse()

    def __rtruediv__(self, other):
        pair = self._lift(other)
        if pair is None:
            return NotImplemented
        x, y = pair
        return y * x.inverse()

    def __neg__(self):
        return ExtScalar(self.p, self.d, -self.a, -self.b)

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        result = ExtScalar.embed(PadicScalar.one(self.p, max(_default_prec, self.a.prec, self.b.prec)), self.d)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def is_zero(self) -> bool:
        return self.a.is_zero() and self.b.is_zero()

    def is_exact_zero(self) -> bool:
        return self.a.is_exact_zero() and self.b.is_exact_zero()

    def in_base_field(self) -> bool:
        return self.b.is_zero()

    def norm(self):
        """Exponent of ``max(|a|, |b| |d|^(1/2))``; a Fraction when ramified."""
        na = self.a.norm()
        nb = self.b.norm()
        if self.d in ("p", "pu") and nb != ZERO:
            nb = Fraction(2 * nb + 1, 2)
        return min(na, nb)

    @property
    def prec(self) -> int:
        return min(c.prec for c in (self.a, self.b) if not c.is_zero()) if not self.is_zero() else 0

    def __eq__(self, other):
        pair = self._lift(other)
        if pair is None:
            return NotImplemented
        x, y = pair
        return (x - y).is_zero()

    __hash__ = None

    def __repr__(self):
        if self.d == "1":
            return f"ExtScalar({self.a!r})"
        return f"ExtScalar({self.a!r} + {self.b!r}*sqrt({self.d}))"


def to_ext(x, d: str = "1") -> ExtScalar:
    return ExtScalar.embed(x, d)


__all__ = [
    "ZERO",
    "PadicScalar",
    "ExtScalar",
    "arith",
    "norm",
    "sqrt",
    "nth_root",
    "disc_value",
    "least_nonresidue",
    "default_prec",
    "set_default_prec",
    "valuation_int",
    "is_prime",
    "D_CODES",
    "common_disc",
    "to_ext",
]
