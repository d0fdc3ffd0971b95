"""Operators on c_0(n, F) as n x n matrices over Q_p or Q_p(sqrt d).

:class:`PMatrix` stores raw kernel triples row by row and routes the inner
loops through the selected backend. :class:`ExtMatrix` holds
:class:`~padop.padic.ExtScalar` entries and uses plain object arithmetic;
it only appears in eigen-decompositions and extended derivations, where
dimensions are small.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from ._backend import EXACT, ZERO_RAW, kernels as K, powers
from .errors import (
    NotAntisymmetric,
    PrecisionExhausted,
    PrimeMismatch,
    RepeatedEigenvalues,
    RepeatedResidueRoots,
    Singular,
    UnsupportedPrime,
    NotSymmetric,
)
from .padic import ZERO, ExtScalar, PadicScalar, common_disc, default_prec, sqrt


def _one_raw(prec: int | None = None) -> tuple:
    return (0, 1, default_prec() if prec is None else prec)


def _raw_of(x, p: int) -> tuple:
    if isinstance(x, PadicScalar):
        if x.p != p:
            raise PrimeMismatch(f"{x.p} vs {p}")
        return x.raw
    if isinstance(x, ExtScalar):
        if not x.in_base_field():
            raise TypeError("extension-valued entry in a Q_p matrix")
        return _raw_of(x.a, p)
    return PadicScalar.from_rational(x, p).raw


def _norm_raw(entry: tuple) -> float:
    return ZERO if entry[1] == 0 else entry[0]


class PMatrix:
    """Matrix over Q_p with capped-relative entries."""

    over_extension = False
    __slots__ = ("p", "rows")

    def __init__(self, p: int, rows: list[list[tuple]]):
        self.p = p
        self.rows = rows

    # -- construction -------------------------------------------------
    @classmethod
    def from_entries(cls, p: int, grid, prec: int | None = None) -> "PMatrix":
        """Build from ints, Fractions, strings like ``"3/2"`` or PadicScalars."""
        rows = []
        for row in grid:
            out = []
            for x in row:
                if isinstance(x, (PadicScalar, ExtScalar)):
                    out.append(_raw_of(x, p))
                else:
                    out.append(PadicScalar.from_rational(Fraction(x), p, prec).raw)
            rows.append(out)
        return cls(p, rows)

    @classmethod
    def zeros(cls, p: int, m: int, n: int | None = None) -> "PMatrix":
        n = m if n is None else n
        return cls(p, [[ZERO_RAW] * n for _ in range(m)])

    @classmethod
    def identity(cls, p: int, n: int, prec: int | None = None) -> "PMatrix":
        one = _one_raw(prec)
        return cls(p, [[one if i == j else ZERO_RAW for j in range(n)] for i in range(n)])

    @classmethod
    def unit(cls, p: int, n: int, i: int, j: int, prec: int | None = None) -> "PMatrix":
        """Matrix unit E_ij (0-based indices)."""
        m = cls.zeros(p, n)
        m.rows[i][j] = _one_raw(prec)
        return m

    @classmethod
    def diag(cls, p: int, values) -> "PMatrix":
        n = len(values)
        m = cls.zeros(p, n)
        for i, x in enumerate(values):
            m.rows[i][i] = _raw_of(x, p)
        return m

    @classmethod
    def from_vec(cls, p: int, vec: list[tuple], n: int) -> "PMatrix":
        return cls(p, [list(vec[i * n:(i + 1) * n]) for i in range(n)])

    # -- inspection ---------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), (len(self.rows[0]) if self.rows else 0)

    @property
    def n(self) -> int:
        m, k = self.shape
        if m != k:
            raise ValueError(f"matrix is {m}x{k}, not square")
        return m

    def __getitem__(self, ij) -> PadicScalar:
        i, j = ij
        return PadicScalar._make(self.p, self.rows[i][j])

    def entries(self) -> list[list[PadicScalar]]:
        return [[PadicScalar._make(self.p, e) for e in row] for row in self.rows]

    def vec(self) -> list[tuple]:
        """Row-major vectorization (raw entries)."""
        return [e for row in self.rows for e in row]

    def copy(self) -> "PMatrix":
        return PMatrix(self.p, [row[:] for row in self.rows])

    def norm(self) -> float:
        """Operator norm exponent on c_0: the largest entry norm."""
        best = ZERO
        for row in self.rows:
            for e in row:
                if e[1] and e[0] < best:
                    best = e[0]
        return best

    def certified_exponent(self) -> float:
        """Largest ``k`` such that every entry is certified to lie in ``p**k Z_p``.

        For a matrix whose entries are all zero at precision this is the
        worst absolute precision among them, i.e. how small it is known to be.
        """
        best = ZERO
        for row in self.rows:
            for v, u, r in row:
                if u == 0 and v >= EXACT:
                    continue
                if v < best:
                    best = v
        return best

    def is_zero(self) -> bool:
        return all(e[1] == 0 for row in self.rows for e in row)

    def is_square(self) -> bool:
        m, k = self.shape
        return m == k

    # -- arithmetic ---------------------------------------------------
    def _check(self, other: "PMatrix") -> None:
        if other.p != self.p:
            raise PrimeMismatch(f"{self.p} vs {other.p}")
        if other.shape != self.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other):
        if isinstance(other, ExtMatrix):
            return NotImplemented
        self._check(other)
        p, pw = self.p, powers(self.p)
        return PMatrix(p, [[K.add(p, pw, a, b) for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)])

    def __sub__(self, other):
        if isinstance(other, ExtMatrix):
            return NotImplemented
        self._check(other)
        p, pw = self.p, powers(self.p)
        return PMatrix(p, [[K.sub(p, pw, a, b) for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)])

    def __neg__(self):
        p, pw = self.p, powers(self.p)
        return PMatrix(p, [[K.neg(p, pw, a) for a in row] for row in self.rows])

    def __matmul__(self, other):
        if isinstance(other, ExtMatrix):
            return NotImplemented
        if other.p != self.p:
            raise PrimeMismatch(f"{self.p} vs {other.p}")
        if self.shape[1] != other.shape[0]:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        return PMatrix(self.p, K.matmul(self.p, powers(self.p), self.rows, other.rows))

    def scale(self, c) -> "PMatrix":
        c = _raw_of(c, self.p)
        p, pw = self.p, powers(self.p)
        return PMatrix(p, [K.scale(p, pw, c, row) for row in self.rows])

    def __mul__(self, c):
        if isinstance(c, (PMatrix, ExtMatrix)):
            return NotImplemented
        if isinstance(c, ExtScalar) and not c.in_base_field():
            return self.to_ext(c.d) * c
        return self.scale(c)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "PMatrix":
        result = PMatrix.identity(self.p, self.n)
        base = self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    @property
    def T(self) -> "PMatrix":
        return PMatrix(self.p, [list(col) for col in zip(*self.rows)])

    def transpose(self) -> "PMatrix":
        return self.T

    def trace(self) -> PadicScalar:
        p, pw = self.p, powers(self.p)
        acc = ZERO_RAW
        for i in range(self.n):
            acc = K.add(p, pw, acc, self.rows[i][i])
        return PadicScalar._make(p, acc)

    def commutator(self, other: "PMatrix") -> "PMatrix":
        """``[self, other] = self @ other - other @ self``."""
        return self @ other - other @ self

    def equals(self, other) -> bool:
        """Equality at precision: the difference is zero in every known digit."""
        if isinstance(other, ExtMatrix):
            return other.equals(self)
        return (self - other).is_zero()

    def __eq__(self, other):
        if not isinstance(other, (PMatrix, ExtMatrix)):
            return NotImplemented
        return self.shape == other.shape and self.equals(other)

    __hash__ = None

    def is_diagonal(self) -> bool:
        return all(not self.rows[i][j][1] for i in range(len(self.rows)) for j in range(len(self.rows[i])) if i != j)

    def is_symmetric(self) -> bool:
        return self.is_square() and self.equals(self.T)

    def is_antisymmetric(self) -> bool:
        return self.is_square() and (self.T + self).is_zero()

    def permuted(self, row_perm: list[int], col_perm: list[int]) -> "PMatrix":
        """``P_r A P_c`` with ``(P_r A P_c)[i][j] = A[row_perm[i]][col_perm[j]]``."""
        return PMatrix(self.p, [[self.rows[i][j] for j in col_perm] for i in row_perm])

    def inverse(self) -> "PMatrix":
        """Gauss-Jordan inverse with max-norm partial pivoting."""
        n = self.n
        p, pw = self.p, powers(self.p)
        one = _one_raw(max(default_prec(), max((e[2] for row in self.rows for e in row), default=1)))
        W = [row[:] + [one if i == j else ZERO_RAW for j in range(n)] for i, row in enumerate(self.rows)]
        for k in range(n):
            best = None
            for i in range(k, n):
                e = W[i][k]
                if e[1] and (best is None or e[0] < W[best][k][0]):
                    best = i
            if best is None:
                raise Singular(f"no certified nonzero pivot in column {k}")
            W[k], W[best] = W[best], W[k]
            pinv = K.inv(p, pw, W[k][k])
            W[k] = K.scale(p, pw, pinv, W[k])
            for i in range(n):
                if i != k and W[i][k][1]:
                    K.axpy(p, pw, W[i], W[i][k], W[k], k)
                elif i != k:
                    W[i][k] = ZERO_RAW
        return PMatrix(p, [row[n:] for row in W])

    def to_ext(self, d: str = "1") -> "ExtMatrix":
        zero = PadicScalar.zero(self.p)
        return ExtMatrix(self.p, d, [[ExtScalar(self.p, d, PadicScalar._make(self.p, e), zero) for e in row] for row in self.rows])

    def __repr__(self):
        return f"PMatrix(p={self.p}, shape={self.shape}, norm_exp={self.norm()})"


def block_diag(*mats: PMatrix) -> PMatrix:
    p = mats[0].p
    n = sum(m.n for m in mats)
    out = PMatrix.zeros(p, n)
    off = 0
    for m in mats:
        for i in range(m.n):
            out.rows[off + i][off:off + m.n] = m.rows[i]
        off += m.n
    return out


def kron(A: PMatrix, B: PMatrix) -> PMatrix:
    p, pw = A.p, powers(A.p)
    (ma, na), (mb, nb) = A.shape, B.shape
    rows = []
    for i in range(ma):
        for k in range(mb):
            rows.append([K.mul(p, pw, A.rows[i][j], B.rows[k][l]) for j in range(na) for l in range(nb)])
    return PMatrix(p, rows)


# -- extension-valued matrices -------------------------------------------
class ExtMatrix:
    """Matrix over Q_p(sqrt d) with :class:`ExtScalar` entries."""

    over_extension = True
    __slots__ = ("p", "d", "grid")

    def __init__(self, p: int, d: str, grid: list[list[ExtScalar]]):
        self.p = p
        self.d = d
        self.grid = grid

    @classmethod
    def from_parts(cls, re: PMatrix, im: PMatrix, d: str) -> "ExtMatrix":
        """``re + im * sqrt(d)``."""
        return cls(re.p, d, [[ExtScalar(re.p, d, PadicScalar._make(re.p, a), PadicScalar._make(re.p, b)) for a, b in zip(r1, r2)]
                             for r1, r2 in zip(re.rows, im.rows)])

    @classmethod
    def identity(cls, p: int, n: int, d: str) -> "ExtMatrix":
        return PMatrix.identity(p, n).to_ext(d)

    @classmethod
    def diag(cls, p: int, d: str, values) -> "ExtMatrix":
        n = len(values)
        m = PMatrix.zeros(p, n).to_ext(d)
        for i, x in enumerate(values):
            m.grid[i][i] = ExtScalar.embed(x, d)
        return m

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.grid), (len(self.grid[0]) if self.grid else 0)

    @property
    def n(self) -> int:
        m, k = self.shape
        if m != k:
            raise ValueError("not square")
        return m

    def __getitem__(self, ij) -> ExtScalar:
        i, j = ij
        return self.grid[i][j]

    @property
    def re(self) -> PMatrix:
        return PMatrix(self.p, [[x.a.raw for x in row] for row in self.grid])

    @property
    def im(self) -> PMatrix:
        return PMatrix(self.p, [[x.b.raw for x in row] for row in self.grid])

    def _lift(self, other):
        if isinstance(other, PMatrix):
            return self, other.to_ext(self.d)
        d = common_disc(self.d, other.d)
        return self.retag(d), other.retag(d)

    def retag(self, d: str) -> "ExtMatrix":
        if d == self.d:
            return self
        return ExtMatrix(self.p, d, [[ExtScalar.embed(x, d) for x in row] for row in self.grid])

    def __add__(self, other):
        x, y = self._lift(other)
        return ExtMatrix(self.p, x.d, [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(x.grid, y.grid)])

    __radd__ = __add__

    def __sub__(self, other):
        x, y = self._lift(other)
        return ExtMatrix(self.p, x.d, [[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(x.grid, y.grid)])

    def __rsub__(self, other):
        x, y = self._lift(other)
        return y - x

    def __neg__(self):
        return ExtMatrix(self.p, self.d, [[-a for a in row] for row in self.grid])

    def __matmul__(self, other):
        x, y = self._lift(other)
        # Four base-field products keep the inner loops in the kernels.
        a, b, c, e = x.re, x.im, y.re, y.im
        re = a @ c
        if x.d != "1":
            dval = ExtScalar.embed(PadicScalar.one(self.p), x.d)._dval()
            re = re + (b @ e).scale(dval)
        return ExtMatrix.from_parts(re, a @ e + b @ c, x.d)

    def __rmatmul__(self, other):
        x, y = self._lift(other)
        return y @ x

    def __mul__(self, c):
        if isinstance(c, (PMatrix, ExtMatrix)):
            return NotImplemented
        d = common_disc(self.d, c.d) if isinstance(c, ExtScalar) else self.d
        m = self.retag(d)
        return ExtMatrix(self.p, d, [[a * c for a in row] for row in m.grid])

    __rmul__ = __mul__

    @property
    def T(self) -> "ExtMatrix":
        return ExtMatrix(self.p, self.d, [list(col) for col in zip(*self.grid)])

    def transpose(self) -> "ExtMatrix":
        return self.T

    def norm(self):
        return min((x.norm() for row in self.grid for x in row), default=ZERO)

    def is_zero(self) -> bool:
        return all(x.is_zero() for row in self.grid for x in row)

    def equals(self, other) -> bool:
        return (self - other).is_zero()

    def __eq__(self, other):
        if not isinstance(other, (PMatrix, ExtMatrix)):
            return NotImplemented
        return self.shape == other.shape and self.equals(other)

    __hash__ = None

    def certified_exponent(self) -> float:
        return min(self.re.certified_exponent(), self.im.certified_exponent())

    def in_base_field(self) -> bool:
        return self.im.is_zero()

    def to_base(self) -> PMatrix:
        if not self.in_base_field():
            raise ValueError("matrix has nonzero sqrt(d) components")
        return self.re

    def inverse(self) -> "ExtMatrix":
        return ExtMatrix(self.p, self.d, _object_inverse(self.grid))

    def trace(self) -> ExtScalar:
        acc = self.grid[0][0]
        for i in range(1, self.n):
            acc = acc + self.grid[i][i]
        return acc

    def __repr__(self):
        return f"ExtMatrix(p={self.p}, d={self.d!r}, shape={self.shape})"


# -- object-generic elimination (PadicScalar or ExtScalar entries) --------
def _object_inverse(grid: list[list]) -> list[list]:
    n = len(grid)
    proto = grid[0][0]
    one = proto * 0 + 1
    zero = proto * 0
    W = [list(row) + [one if i == j else zero for j in range(n)] for i, row in enumerate(grid)]
    for k in range(n):
        best = None
        for i in range(k, n):
            if not W[i][k].is_zero() and (best is None or W[i][k].norm() < W[best][k].norm()):
                best = i
        if best is None:
            raise Singular(f"no certified nonzero pivot in column {k}")
        W[k], W[best] = W[best], W[k]
        pinv = W[k][k].inverse()
        W[k] = [x * pinv for x in W[k]]
        for i in range(n):
            if i != k and not W[i][k].is_zero():
                f = W[i][k]
                W[i] = [a - f * b for a, b in zip(W[i], W[k])]
    return [row[n:] for row in W]


def null_vector(grid: list[list]) -> list:
    """A kernel vector of a corank-one square matrix.

    Full max-norm pivoting for ``n - 1`` steps; the remaining column is set
    to 1, so the returned vector has norm exactly 1.
    """
    n = len(grid)
    W = [list(row) for row in grid]
    cols = list(range(n))
    for k in range(n - 1):
        best, bnorm = None, None
        for i in range(k, n):
            for j in range(k, n):
                x = W[i][j]
                if x.is_zero():
                    continue
                nx = x.norm()
                if best is None or nx < bnorm:
                    best, bnorm = (i, j), nx
        if best is None:
            raise RepeatedEigenvalues("eigenspace has dimension greater than one")
        i, j = best
        W[k], W[i] = W[i], W[k]
        for row in W:
            row[k], row[j] = row[j], row[k]
        cols[k], cols[j] = cols[j], cols[k]
        pinv = W[k][k].inverse()
        for r in range(k + 1, n):
            if not W[r][k].is_zero():
                f = W[r][k] * pinv
                W[r] = [a - f * b for a, b in zip(W[r], W[k])]
    one = W[0][0] * 0 + 1
    x = [None] * n
    x[n - 1] = one
    for k in range(n - 2, -1, -1):
        acc = W[k][n - 1] * x[n - 1]
        for j in range(k + 1, n - 1):
            acc = acc + W[k][j] * x[j]
        x[k] = -(acc / W[k][k])
    out = [None] * n
    for k in range(n):
        out[cols[k]] = x[k]
    return out


# -- named operations ---------------------------------------------------
def matrix_arith(kind: str, A: PMatrix, B=None):
    if kind == "add":
        return A + B
    if kind == "sub":
        return A - B
    if kind == "mul":
        return A @ B
    if kind == "scalar_mul":
        return A * B
    if kind == "inverse":
        return A.inverse()
    raise ValueError(f"unknown matrix operation {kind!r}")


def op_norm(A) -> float:
    return A.norm()


def transpose(A):
    return A.T


def symmetric_split(A: PMatrix) -> tuple[PMatrix, PMatrix]:
    """``A = A1 - A2`` with ``A1`` symmetric and ``A2`` antisymmetric."""
    if A.p == 2:
        raise UnsupportedPrime("halving requires an odd prime")
    half = PadicScalar.from_rational(Fraction(1, 2), A.p)
    At = A.T
    return (At + A).scale(half), (At - A).scale(half)


def block_symmetrize(A2: PMatrix) -> PMatrix:
    """The symmetric ``2n x 2n`` block matrix ``[[0, A2], [-A2, 0]]``."""
    if not A2.is_antisymmetric():
        raise NotAntisymmetric("input must satisfy A^t = -A")
    n = A2.n
    out = PMatrix.zeros(A2.p, 2 * n)
    neg = -A2
    for i in range(n):
        out.rows[i][n:] = A2.rows[i]
        out.rows[n + i][:n] = neg.rows[i]
    return out


def imaginary_unit(p: int) -> PMatrix:
    """The real 2 x 2 matrix ``[[0, 1], [-1, 0]]`` squaring to ``-I``."""
    return PMatrix.from_entries(p, [[0, 1], [-1, 0]])


@dataclass
class TriDecomposition:
    """``P_r A P_c = C T E`` with unitriangular ``C`` (lower), ``E`` (upper)."""

    row_perm: list[int]
    col_perm: list[int]
    C: PMatrix
    T: PMatrix
    E: PMatrix

    def product(self) -> PMatrix:
        return self.C @ self.T @ self.E

    def permute(self, A: PMatrix) -> PMatrix:
        return A.permuted(self.row_perm, self.col_perm)

    def unpermute(self, M: PMatrix) -> PMatrix:
        """Inverse of :meth:`permute`: returns ``P_r^t M P_c^t``."""
        n = M.n
        rows = [[None] * n for _ in range(n)]
        for i, ri in enumerate(self.row_perm):
            for j, cj in enumerate(self.col_perm):
                rows[ri][cj] = M.rows[i][j]
        return PMatrix(M.p, rows)

    @property
    def diagonal(self) -> list[PadicScalar]:
        return [self.T[i, i] for i in range(self.T.n)]

    def permutation_sign(self) -> int:
        return _perm_sign(self.row_perm) * _perm_sign(self.col_perm)


def _perm_sign(perm: list[int]) -> int:
    seen = [False] * len(perm)
    sign = 1
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def ldu_decompose(A: PMatrix) -> TriDecomposition:
    """Full-pivoting triangular decomposition with max-norm pivots.

    Ties are broken by lowest row, then lowest column of the remaining
    block. Rank deficiency leaves trailing zeros on the diagonal of ``T``.
    """
    n = A.n
    p, pw = A.p, powers(A.p)
    W = [row[:] for row in A.rows]
    rp, cp = list(range(n)), list(range(n))
    one = _one_raw()
    L = [[one if i == j else ZERO_RAW for j in range(n)] for i in range(n)]
    U = [[one if i == j else ZERO_RAW for j in range(n)] for i in range(n)]
    T = [[ZERO_RAW] * n for _ in range(n)]
    for k in range(n):
        best, bval, floor = None, None, EXACT
        for i in range(k, n):
            row = W[i]
            for j in range(k, n):
                v, u, _ = row[j]
                if u == 0:
                    if v < floor:
                        floor = v
                elif best is None or v < bval:
                    best, bval = (i, j), v
        if best is None:
            for i in range(k, n):
                T[i][i] = W[i][i]
            break
        if floor <= bval:
            raise PrecisionExhausted(
                f"pivot of valuation {bval} cannot be certified maximal against O({p}^{floor})")
        i, j = best
        if i != k:
            W[k], W[i] = W[i], W[k]
            rp[k], rp[i] = rp[i], rp[k]
            for c in range(k):
                L[k][c], L[i][c] = L[i][c], L[k][c]
        if j != k:
            for row in W:
                row[k], row[j] = row[j], row[k]
            cp[k], cp[j] = cp[j], cp[k]
            for r in range(k):
                U[r][k], U[r][j] = U[r][j], U[r][k]
        piv = W[k][k]
        T[k][k] = piv
        pinv = K.inv(p, pw, piv)
        for r in range(k + 1, n):
            e = W[r][k]
            if e[1] == 0:
                W[r][k] = ZERO_RAW
                continue
            lk = K.mul(p, pw, e, pinv)
            L[r][k] = lk
            K.axpy(p, pw, W[r], lk, W[k], k + 1)
            W[r][k] = ZERO_RAW
        for c in range(k + 1, n):
            U[k][c] = K.mul(p, pw, pinv, W[k][c])
    return TriDecomposition(rp, cp, PMatrix(p, L), PMatrix(p, T), PMatrix(p, U))


def det(A: PMatrix) -> PadicScalar:
    dec = ldu_decompose(A)
    acc = PadicScalar.one(A.p) if dec.permutation_sign() == 1 else -PadicScalar.one(A.p)
    for t in dec.diagonal:
        acc = acc * t
    return acc


# -- characteristic polynomial and spectrum -------------------------------
def char_poly(A: PMatrix) -> list[PadicScalar]:
    """Coefficients of ``det(x I - A)``, lowest degree first (division free)."""
    n = A.n
    p, pw = A.p, powers(A.p)
    M = A.rows
    one = _one_raw()
    poly = [one]  # highest degree first while building
    for k in range(1, n + 1):
        a = M[k - 1][k - 1]
        R = M[k - 1][:k - 1]
        Cc = [M[i][k - 1] for i in range(k - 1)]
        Asub = [row[:k - 1] for row in M[:k - 1]]
        col = [one, K.neg(p, pw, a)]
        vec = Cc
        for _ in range(k - 1):
            col.append(K.neg(p, pw, K.dot(p, pw, R, vec)))
            vec = [K.dot(p, pw, row, vec) for row in Asub]
        new = []
        for i in range(k + 1):
            acc = ZERO_RAW
            for j in range(min(i, k - 1) + 1):
                if i - j < len(col):
                    acc = K.add(p, pw, acc, K.mul(p, pw, col[i - j], poly[j]))
            new.append(acc)
        poly = new
    return [PadicScalar._make(p, e) for e in reversed(poly)]


def char_roots(A: PMatrix) -> list[tuple[ExtScalar, int]]:
    """Eigenvalues of ``A`` with multiplicities, via Hensel lifting."""
    from .roots import poly_roots

    roots = poly_roots(char_poly(A))
    return [(ExtScalar.embed(r.value, r.d), 1) for r in roots]


@dataclass
class EigDecomposition:
    """``A = C^{-1} diag(eigenvalues) C``; rows of ``C`` are eigenvectors."""

    C: PMatrix | ExtMatrix
    C_inv: PMatrix | ExtMatrix
    eigenvalues: list
    isometric: bool
    d: str = "1"
    self_pairings: list = field(default_factory=list)

    @property
    def Lambda(self):
        if isinstance(self.C, PMatrix):
            return PMatrix.diag(self.C.p, self.eigenvalues)
        return ExtMatrix.diag(self.C.p, self.C.d, self.eigenvalues)

    def reconstruct(self):
        return self.C_inv @ self.Lambda @ self.C

    def apply(self, values) -> PMatrix | ExtMatrix:
        """``C^{-1} diag(values) C``, collapsed to Q_p when possible."""
        if isinstance(self.C, PMatrix) and all(not isinstance(x, ExtScalar) or x.in_base_field() for x in values):
            D = PMatrix.diag(self.C.p, values)
        else:
            d = self.C.d if isinstance(self.C, ExtMatrix) else "1"
            for x in values:
                if isinstance(x, ExtScalar):
                    d = common_disc(d, x.d)
            D = ExtMatrix.diag(self.C.p, d, values)
        out = self.C_inv @ D @ self.C
        if isinstance(out, ExtMatrix) and out.in_base_field():
            return out.re
        return out


def eig_symmetric(A: PMatrix) -> EigDecomposition:
    """Eigen-decomposition of a symmetric matrix with distinct eigenvalues.

    Eigenvectors are normalized to unit self-pairing when every ``v^t v``
    has a square root in Q_p or its unramified quadratic extension; then
    ``C^t = C^{-1}`` and ``isometric`` is set. Otherwise ``C`` keeps the
    max-norm-one eigenvectors and ``C^{-1}`` is computed by elimination.
    """
    from .roots import poly_roots

    if not A.is_symmetric():
        raise NotSymmetric("eigen-decomposition requires A^t = A")
    p, n = A.p, A.n
    try:
        roots = poly_roots(char_poly(A))
    except RepeatedResidueRoots as exc:
        raise RepeatedEigenvalues(str(exc)) from exc
    d_eig = "1"
    for r in roots:
        d_eig = common_disc(d_eig, r.d)
    values = [r.value for r in roots]
    if d_eig == "1":
        grid = A.entries()
    else:
        grid = A.to_ext(d_eig).grid
    vecs = []
    for lam in values:
        M = [[grid[i][j] - lam if i == j else grid[i][j] for j in range(n)] for i in range(n)]
        vecs.append(null_vector(M))
    pairings = []
    for v in vecs:
        acc = v[0] * v[0]
        for x in v[1:]:
            acc = acc + x * x
        pairings.append(acc)

    scale, d_norm = _normalizers(pairings, d_eig)
    if scale is not None:
        C = ExtMatrix(p, d_norm, [[ExtScalar.embed(x, d_norm) / s for x in v] for v, s in zip(vecs, scale)])
        if d_norm == "1":
            Cm = C.re
            return EigDecomposition(Cm, Cm.T, values, True, "1", pairings)
        return EigDecomposition(C, C.T, [ExtScalar.embed(x, d_norm) for x in values], True, d_norm, pairings)
    if d_eig == "1":
        Cm = PMatrix.from_entries(p, vecs)
        return EigDecomposition(Cm, Cm.inverse(), values, False, "1", pairings)
    C = ExtMatrix(p, d_eig, [[ExtScalar.embed(x, d_eig) for x in v] for v in vecs])
    return EigDecomposition(C, C.inverse(), values, False, d_eig, pairings)


def _normalizers(pairings: list, d_eig: str):
    """Square roots of the self-pairings, if all fit one unramified field."""
    if d_eig != "1":
        roots = []
        for s in pairings:
            if not s.in_base_field():
                return None, d_eig
            root = _sqrt_unramified(s.a)
            if root is None or common_disc(root.d, d_eig) != d_eig:
                return None, d_eig
            roots.append(root)
        return roots, d_eig
    roots = []
    d = "1"
    for s in pairings:
        root = _sqrt_unramified(s)
        if root is None:
            return None, "1"
        roots.append(root)
        d = common_disc(d, root.d)
    return roots, d


def _sqrt_unramified(s: PadicScalar):
    if s.is_zero() or s.v % 2:
        return None
    root = sqrt(s)
    return root if root.d in ("1", "u") else None
