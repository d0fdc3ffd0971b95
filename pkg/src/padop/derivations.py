"""Derivations of finite-dimensional matrix algebras over Q_p.

Operators are vectorized row-major (entry ``(i, j)`` of an ``n x n`` matrix
sits at index ``i*n + j``), so a linear map on Mat_n is an ``n^2 x n^2``
matrix. Algebras are stored as fully reduced sparse echelon forms, and every
linear system (Leibniz equations, centers, commutants, inner witnesses) is
solved on those sparse rows.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ._backend import ZERO_RAW, kernels as K, powers
from .echelon import SparseEchelon, null_space
from .errors import NoBlockStructure, PreconditionViolated, PrimeMismatch
from .linalg import ExtMatrix, PMatrix, det, eig_symmetric
from .padic import ZERO, PadicScalar, default_prec


def to_sparse(X: PMatrix) -> dict:
    n = X.shape[1]
    return {i * n + j: e for i, row in enumerate(X.rows) for j, e in enumerate(row) if e[1]}


def from_sparse(p: int, n: int, vec: dict) -> PMatrix:
    rows = [[ZERO_RAW] * n for _ in range(n)]
    for k, e in vec.items():
        rows[k // n][k % n] = e
    return PMatrix(p, rows)


def sparse_matmul(p: int, n: int, x: dict, y: dict) -> dict:
    """Product of two vectorized ``n x n`` matrices, sparse in and out."""
    pw = powers(p)
    yrows: dict[int, list] = {}
    for k, e in y.items():
        yrows.setdefault(k // n, []).append((k % n, e))
    out: dict = {}
    for k, e in x.items():
        r, t = divmod(k, n)
        for s, f in yrows.get(t, ()):
            idx = r * n + s
            prod = K.mul(p, pw, e, f)
            old = out.get(idx)
            out[idx] = prod if old is None else K.add(p, pw, old, prod)
    return {k: e for k, e in out.items() if e[1]}


def sparse_sub(p: int, x: dict, y: dict) -> dict:
    pw = powers(p)
    out = dict(x)
    for k, e in y.items():
        old = out.get(k)
        new = K.neg(p, pw, e) if old is None else K.sub(p, pw, old, e)
        if new[1]:
            out[k] = new
        else:
            out.pop(k, None)
    return out


def sparse_commutator(p: int, n: int, x: dict, y: dict) -> dict:
    return sparse_sub(p, sparse_matmul(p, n, x, y), sparse_matmul(p, n, y, x))


def _one(prec: int | None = None) -> tuple:
    return (0, 1, default_prec() if prec is None else prec)


@dataclass
class Block:
    """A minimal central idempotent: the diagonal projection onto ``indices``."""

    indices: list[int]
    projection: PMatrix


class AlgebraSpan:
    """A subalgebra of Mat_n(Q_p), stored as a fully reduced echelon basis."""

    def __init__(self, p: int, n: int, echelon: SparseEchelon, generators: list[PMatrix] | None = None):
        self.p = p
        self.n = n
        self.echelon = echelon
        self.generators = list(generators or [])
        self._basis_vecs = echelon.basis()
        self._pivots = echelon.pivots
        self._structure: dict = {}
        self._gen_subset: list[int] | None = None
        self._center: AlgebraSpan | None = None
        self._blocks = None
        self._derivation_dims: dict = {}

    # -- construction -------------------------------------------------
    @classmethod
    def close(cls, generators: list[PMatrix]) -> "AlgebraSpan":
        """Smallest subalgebra containing ``generators`` (not necessarily unital)."""
        if not generators:
            raise ValueError("need at least one generator")
        p, n = generators[0].p, generators[0].n
        for g in generators:
            if g.p != p:
                raise PrimeMismatch(f"{g.p} vs {p}")
            if g.shape != (n, n):
                raise ValueError("generators must be square of equal size")
        gens = [to_sparse(g) for g in generators]
        ech = SparseEchelon(p)
        queue = list(gens)
        while queue:
            x = queue.pop(0)
            if ech.insert(x) is not None:
                queue.extend(sparse_matmul(p, n, g, x) for g in gens)
        return cls(p, n, ech, generators)

    @classmethod
    def from_basis(cls, p: int, n: int, mats: list) -> "AlgebraSpan":
        """Span of ``mats`` (sparse dicts or PMatrix), assumed multiplicatively closed."""
        ech = SparseEchelon(p)
        for m in mats:
            ech.insert(m if isinstance(m, dict) else to_sparse(m))
        alg = cls(p, n, ech)
        alg.generators = alg.basis
        return alg

    # -- basic data ---------------------------------------------------
    @property
    def dim(self) -> int:
        return len(self._basis_vecs)

    @property
    def basis(self) -> list[PMatrix]:
        return [from_sparse(self.p, self.n, v) for v in self._basis_vecs]

    @property
    def basis_vectors(self) -> list[dict]:
        return self._basis_vecs

    def coordinates(self, X) -> list:
        vec = X if isinstance(X, dict) else to_sparse(X)
        return self.echelon.coordinates(vec)

    def contains(self, X) -> bool:
        vec = X if isinstance(X, dict) else to_sparse(X)
        return self.echelon.contains(vec)

    def residual(self, X) -> dict:
        vec = X if isinstance(X, dict) else to_sparse(X)
        return self.echelon.reduce(vec)[0]

    def element(self, coords: list) -> dict:
        """Sparse vector of ``sum coords[i] basis[i]``."""
        p, pw = self.p, powers(self.p)
        out: dict = {}
        for c, b in zip(coords, self._basis_vecs):
            if c[1]:
                K.sparse_axpy(p, pw, out, K.neg(p, pw, c), b)
        return out

    @property
    def has_unit(self) -> bool:
        return self.contains(PMatrix.identity(self.p, self.n))

    @property
    def closed_under_transpose(self) -> bool:
        return all(self.contains(B.T) for B in self.basis)

    def is_closed(self) -> bool:
        return all(self.contains(sparse_matmul(self.p, self.n, a, b))
                   for a in self._basis_vecs for b in self._basis_vecs)

    def structure(self, i: int, j: int) -> list:
        """Coordinates of ``basis[i] @ basis[j]``."""
        key = (i, j)
        out = self._structure.get(key)
        if out is None:
            prod = sparse_matmul(self.p, self.n, self._basis_vecs[i], self._basis_vecs[j])
            out = self.coordinates(prod)
            self._structure[key] = out
        return out

    def generating_subset(self) -> list[int]:
        """Indices of basis elements that generate the algebra (chosen greedily)."""
        if self._gen_subset is not None:
            return self._gen_subset
        p, n = self.p, self.n
        chosen: list[int] = []
        gens: list[dict] = []
        ech = SparseEchelon(p)
        spanning: list[dict] = []
        order = sorted(range(self.dim), key=lambda i: (len(self._basis_vecs[i]), i))
        for i in order:
            b = self._basis_vecs[i]
            if ech.contains(b):
                continue
            chosen.append(i)
            gens.append(b)
            queue = [b] + [sparse_matmul(p, n, b, w) for w in spanning]
            while queue:
                x = queue.pop(0)
                if ech.insert(x) is not None:
                    spanning.append(x)
                    queue.extend(sparse_matmul(p, n, g, x) for g in gens)
            if len(ech) == self.dim:
                break
        self._gen_subset = sorted(chosen)
        return self._gen_subset

    # -- center, commutant, blocks -----------------------------------
    def center(self) -> "AlgebraSpan":
        if self._center is None:
            self._center = center(self)
        return self._center

    def blocks(self) -> list[Block]:
        if self._blocks is None:
            self._blocks = _detect_blocks(self)
        if isinstance(self._blocks, NoBlockStructure):
            raise self._blocks
        return self._blocks

    def __repr__(self):
        return f"AlgebraSpan(p={self.p}, n={self.n}, dim={self.dim})"


def close_span(generators: list[PMatrix]) -> AlgebraSpan:
    return AlgebraSpan.close(generators)


# -- standard algebras ----------------------------------------------------
def matrix_units(p: int, n: int, pairs) -> list[PMatrix]:
    return [PMatrix.unit(p, n, i, j) for i, j in pairs]


def full_algebra(p: int, n: int) -> AlgebraSpan:
    """Mat_n, generated by the matrix units next to the diagonal."""
    if n == 1:
        return close_span([PMatrix.identity(p, 1)])
    pairs = [(i, i + 1) for i in range(n - 1)] + [(i + 1, i) for i in range(n - 1)]
    return close_span(matrix_units(p, n, pairs))


def diagonal_algebra(p: int, n: int) -> AlgebraSpan:
    return close_span(matrix_units(p, n, [(i, i) for i in range(n)]))


def block_algebra(p: int, sizes: list[int], multiplicity: int = 1) -> AlgebraSpan:
    """``(Mat_{n_1} + ... + Mat_{n_k}) tensor I_m`` in block-diagonal position."""
    n = sum(sizes) * multiplicity
    gens = []
    off = 0
    for k in sizes:
        for i in range(k):
            for j in range(k):
                g = PMatrix.zeros(p, n)
                for r in range(multiplicity):
                    g.rows[(off + i) * multiplicity + r][(off + j) * multiplicity + r] = _one()
                gens.append(g)
        off += k
    return close_span(gens)


def tensor_with_identity(p: int, k: int, m: int, left: bool = True) -> AlgebraSpan:
    """``Mat_k tensor I_m`` (``left=True``) or ``I_m tensor Mat_k`` inside Mat_{km}."""
    eye = PMatrix.identity(p, m)
    gens = []
    for i in range(k):
        for j in range(k):
            E = PMatrix.unit(p, k, i, j)
            gens.append(_kron(E, eye) if left else _kron(eye, E))
    return close_span(gens)


def _kron(A: PMatrix, B: PMatrix) -> PMatrix:
    from .linalg import kron

    return kron(A, B)


# -- linear maps ----------------------------------------------------------
class DerivationMap:
    """A linear map on Mat_n given by its ``n^2 x n^2`` matrix on row-major vectors."""

    def __init__(self, M: PMatrix, n: int, domain: AlgebraSpan | None = None, d: str = "1"):
        self.M = M
        self.n = n
        self.p = M.p
        self.domain = domain
        self.d = d

    @classmethod
    def ad(cls, B: PMatrix, domain: AlgebraSpan | None = None) -> "DerivationMap":
        """``X -> B X - X B``."""
        n, p = B.n, B.p
        pw = powers(p)
        rows = [[ZERO_RAW] * (n * n) for _ in range(n * n)]
        for a in range(n):
            for b in range(n):
                out = rows[a * n + b]
                for k in range(n):
                    e = B.rows[a][k]
                    if e[1]:
                        out[k * n + b] = K.add(p, pw, out[k * n + b], e)
                    f = B.rows[k][b]
                    if f[1]:
                        out[a * n + k] = K.sub(p, pw, out[a * n + k], f)
        return cls(PMatrix(p, rows), n, domain)

    @classmethod
    def zero(cls, p: int, n: int, domain: AlgebraSpan | None = None) -> "DerivationMap":
        return cls(PMatrix.zeros(p, n * n), n, domain)

    @classmethod
    def transpose_map(cls, p: int, n: int) -> "DerivationMap":
        M = PMatrix.zeros(p, n * n)
        for i in range(n):
            for j in range(n):
                M.rows[i * n + j][j * n + i] = _one()
        return cls(M, n)

    def apply(self, X):
        if isinstance(X, ExtMatrix):
            return ExtMatrix.from_parts(self.apply(X.re), self.apply(X.im), X.d)
        p, pw, n = self.p, powers(self.p), self.n
        v = X.vec()
        out = [K.dot(p, pw, row, v) for row in self.M.rows]
        return PMatrix.from_vec(p, out, n)

    __call__ = apply

    def apply_sparse(self, vec: dict) -> dict:
        p, pw = self.p, powers(self.p)
        out = {}
        for a, row in enumerate(self.M.rows):
            acc = ZERO_RAW
            for k, e in vec.items():
                f = row[k]
                if f[1]:
                    acc = K.add(p, pw, acc, K.mul(p, pw, f, e))
            if acc[1]:
                out[a] = acc
        return out

    def norm(self) -> float:
        return self.M.norm()

    def __add__(self, other: "DerivationMap") -> "DerivationMap":
        return DerivationMap(self.M + other.M, self.n, self.domain, self.d)

    def scale(self, c) -> "DerivationMap":
        return DerivationMap(self.M.scale(c), self.n, self.domain, self.d)

    def __repr__(self):
        return f"DerivationMap(p={self.p}, n={self.n}, d={self.d!r}, norm_exp={self.norm()})"


def leibniz_defect(D: DerivationMap, alg: AlgebraSpan) -> float:
    """``max ||D(AB) - D(A)B - A D(B)||`` over basis pairs, as an exponent."""
    if D.n != alg.n:
        raise ValueError("dimension mismatch")
    basis = alg.basis
    images = [D.apply(B) for B in basis]
    worst = ZERO
    for A, DA in zip(basis, images):
        for B, DB in zip(basis, images):
            r = D.apply(A @ B) - DA @ B - A @ DB
            e = r.norm()
            if e < worst:
                worst = e
    return worst


def leibniz_defect_pairs(D: DerivationMap, pairs) -> float:
    worst = ZERO
    for A, B in pairs:
        r = D.apply(A @ B) - D.apply(A) @ B - A @ D.apply(B)
        e = r.norm()
        if e < worst:
            worst = e
    return worst


# -- derivation spaces ----------------------------------------------------
def _self_equations(alg: AlgebraSpan) -> list[dict]:
    """Leibniz equations for unknowns ``M[i][j]`` (coefficient of basis_i in D(basis_j))."""
    p, pw, m = alg.p, powers(alg.p), alg.dim
    eqs = []
    for g in alg.generating_subset():
        for b in range(m):
            gb = alg.structure(g, b)
            rows = [dict() for _ in range(m)]  # equation per output coordinate l
            # D(g b) = sum_k c_k D(B_k): coefficient of B_l is sum_k c_k M[l][k]
            for k, c in enumerate(gb):
                if c[1]:
                    for l in range(m):
                        _acc(p, pw, rows[l], l * m + k, c)
            # - D(g) b = - sum_i M[i][g] B_i b
            for i in range(m):
                ib = alg.structure(i, b)
                for l, c in enumerate(ib):
                    if c[1]:
                        _acc(p, pw, rows[l], i * m + g, K.neg(p, pw, c))
            # - g D(b) = - sum_i M[i][b] g B_i
            for i in range(m):
                gi = alg.structure(g, i)
                for l, c in enumerate(gi):
                    if c[1]:
                        _acc(p, pw, rows[l], i * m + b, K.neg(p, pw, c))
            eqs.extend(r for r in rows if r)
    return eqs


def _ambient_equations(alg: AlgebraSpan) -> list[dict]:
    """Leibniz equations for unknowns ``N[a][j]`` (entry ``a`` of D(basis_j)) in Mat_n."""
    p, pw, m, n = alg.p, powers(alg.p), alg.dim, alg.n
    basis = alg.basis
    eqs = []
    for g in alg.generating_subset():
        G = basis[g]
        for b in range(m):
            Bm = basis[b]
            gb = alg.structure(g, b)
            for r in range(n):
                for s in range(n):
                    a = r * n + s
                    row: dict = {}
                    for k, c in enumerate(gb):
                        if c[1]:
                            _acc(p, pw, row, a * m + k, c)
                    for t in range(n):
                        e = Bm.rows[t][s]
                        if e[1]:
                            _acc(p, pw, row, (r * n + t) * m + g, K.neg(p, pw, e))
                        f = G.rows[r][t]
                        if f[1]:
                            _acc(p, pw, row, (t * n + s) * m + b, K.neg(p, pw, f))
                    if row:
                        eqs.append(row)
    return eqs


def _acc(p, pw, row: dict, key: int, val: tuple) -> None:
    old = row.get(key)
    new = val if old is None else K.add(p, pw, old, val)
    if new[1]:
        row[key] = new
    else:
        row.pop(key, None)


def derivation_space(alg: AlgebraSpan, codomain: str = "self") -> list[DerivationMap]:
    """Basis of all derivations ``alg -> alg`` (or ``alg -> Mat_n``)."""
    p, n, m = alg.p, alg.n, alg.dim
    nn = n * n
    maps = []
    if codomain == "self":
        kernel = null_space(p, _self_equations(alg), m * m)
        for vec in kernel:
            M = [[ZERO_RAW] * nn for _ in range(nn)]
            pw = powers(p)
            for key, c in vec.items():
                i, j = divmod(key, m)
                col = alg._pivots[j]
                for a, e in alg._basis_vecs[i].items():
                    M[a][col] = K.add(p, pw, M[a][col], K.mul(p, pw, c, e))
            maps.append(DerivationMap(PMatrix(p, M), n, alg))
    elif codomain == "ambient":
        kernel = null_space(p, _ambient_equations(alg), nn * m)
        for vec in kernel:
            M = [[ZERO_RAW] * nn for _ in range(nn)]
            for key, c in vec.items():
                a, j = divmod(key, m)
                M[a][alg._pivots[j]] = c
            maps.append(DerivationMap(PMatrix(p, M), n, alg))
    else:
        raise ValueError(f"codomain must be 'self' or 'ambient', not {codomain!r}")
    alg._derivation_dims[codomain] = len(maps)
    return maps


def derivation_space_dim(alg: AlgebraSpan, codomain: str = "self") -> int:
    if codomain not in alg._derivation_dims:
        derivation_space(alg, codomain)
    return alg._derivation_dims[codomain]


# -- center and commutant -------------------------------------------------
def center(alg: AlgebraSpan) -> AlgebraSpan:
    """``alg`` intersected with its commutant."""
    p, n, m = alg.p, alg.n, alg.dim
    pw = powers(p)
    gens = [alg._basis_vecs[g] for g in alg.generating_subset()]
    eqs: list[dict] = []
    for G in gens:
        rows: dict[int, dict] = {}
        for i, B in enumerate(alg._basis_vecs):
            for a, c in sparse_commutator(p, n, B, G).items():
                _acc(p, pw, rows.setdefault(a, {}), i, c)
        eqs.extend(r for r in rows.values() if r)
    kernel = null_space(p, eqs, m)
    return AlgebraSpan.from_basis(p, n, [alg.element(_dense(v, m)) for v in kernel])


def _dense(vec: dict, m: int) -> list:
    return [vec.get(i, ZERO_RAW) for i in range(m)]


def commutant(alg: AlgebraSpan, ambient_n: int | None = None) -> AlgebraSpan:
    """All ``X`` in Mat_n with ``[X, G] = 0`` for every element ``G`` of ``alg``."""
    p, n = alg.p, alg.n if ambient_n is None else ambient_n
    if n != alg.n:
        raise ValueError("ambient dimension must match the algebra")
    pw = powers(p)
    eqs = []
    for gi in alg.generating_subset():
        G = from_sparse(p, n, alg._basis_vecs[gi])
        for a in range(n):
            for b in range(n):
                row: dict = {}
                # ([X, G])_{ab} = sum_k X_{ak} G_{kb} - G_{ak} X_{kb}
                for k in range(n):
                    e = G.rows[k][b]
                    if e[1]:
                        _acc(p, pw, row, a * n + k, e)
                    f = G.rows[a][k]
                    if f[1]:
                        _acc(p, pw, row, k * n + b, K.neg(p, pw, f))
                if row:
                    eqs.append(row)
    kernel = null_space(p, eqs, n * n)
    return AlgebraSpan.from_basis(p, n, kernel)


def _detect_blocks(alg: AlgebraSpan):
    p, n = alg.p, alg.n
    Z = alg.center()
    for z in Z.basis_vectors:
        if any(k // n != k % n for k in z):
            return NoBlockStructure("center is not diagonal in the standard basis")
    classes: dict[tuple, list[int]] = {}
    for i in range(n):
        key = tuple(_raw_key(z.get(i * n + i, ZERO_RAW), p) for z in Z.basis_vectors)
        classes.setdefault(key, []).append(i)
    blocks = []
    for idx in sorted(classes.values()):
        P = PMatrix.zeros(p, n)
        for i in idx:
            P.rows[i][i] = _one()
        if not Z.contains(P):
            return NoBlockStructure("diagonal classes of the center are not central idempotents")
        blocks.append(Block(idx, P))
    return blocks


def _raw_key(e: tuple, p: int):
    """Hashable value of a raw entry, compared to half the working precision."""
    v, u, r = e
    if u == 0:
        return None
    return (v, u % p ** min(r, default_prec() // 2))


# -- inner derivations ----------------------------------------------------
@dataclass
class InnerSolveResult:
    status: str
    witness: PMatrix | None
    residual: float | None  # exponent of max ||[B, A_i] - D(A_i)||; None without a witness
    certified: float | None  # absolute precision of that residual when it vanishes
    derivation_space_dim: int | None = None
    spatial: bool | None = None
    notes: list = field(default_factory=list)


def _solve_particular(p: int, columns: list[dict], rhs: list[dict]):
    """Solve ``sum_k x_k columns[k] = rhs`` (stacked sparse blocks); None if inconsistent."""
    m = len(columns)
    ech = SparseEchelon(p)
    rows: dict[int, dict] = {}
    for k, col in enumerate(columns):
        for a, c in col.items():
            rows.setdefault(a, {})[k] = c
    for a, c in rhs.items():
        rows.setdefault(a, {})[m] = c
    for a in sorted(rows):
        if ech.insert(rows[a], allowed=m) == -1:
            return None
    x = [ZERO_RAW] * m
    for c, row in ech.rows.items():
        x[c] = row.get(m, ZERO_RAW)
    return x


def solve_inner(D: DerivationMap, alg: AlgebraSpan) -> InnerSolveResult:
    """Find ``B`` in ``alg`` with ``D = ad B`` on ``alg``, normalized modulo the center."""
    p, n = alg.p, alg.n
    images = [D.apply_sparse(b) for b in alg.basis_vectors]
    columns, rhs = [], {}
    nn = n * n
    for k, Bk in enumerate(alg.basis_vectors):
        col = {}
        for i, Ai in enumerate(alg.basis_vectors):
            for a, c in sparse_commutator(p, n, Bk, Ai).items():
                col[i * nn + a] = c
        columns.append(col)
    for i, img in enumerate(images):
        for a, c in img.items():
            rhs[i * nn + a] = c
    x = _solve_particular(p, columns, rhs)
    dim = alg._derivation_dims.get("self")
    if x is None:
        spatial = _solve_particular(p, _ambient_columns(alg), rhs) is not None
        return InnerSolveResult("not_inner", None, None, None, dim, spatial)
    B = from_sparse(p, n, alg.element(x))
    B = normalize_witness(B, alg)
    worst, cert = ZERO, ZERO
    for Ai, img in zip(alg.basis, images):
        r = B.commutator(Ai) - from_sparse(p, n, img)
        e = r.norm()
        worst = min(worst, e)
        cert = min(cert, r.certified_exponent())
    status = "inner" if worst == ZERO else "not_inner"
    return InnerSolveResult(status, B, worst, cert, dim, True)


def _ambient_columns(alg: AlgebraSpan) -> list[dict]:
    p, n = alg.p, alg.n
    nn = n * n
    cols = []
    for k in range(nn):
        E = {k: _one()}
        col = {}
        for i, Ai in enumerate(alg.basis_vectors):
            for a, c in sparse_commutator(p, n, E, Ai).items():
                col[i * nn + a] = c
        cols.append(col)
    return cols


def normalize_witness(B: PMatrix, alg: AlgebraSpan) -> PMatrix:
    """Canonical representative of ``B`` modulo the center.

    Trace zero on every block when a block structure is detected; otherwise
    the residue modulo the center's echelon form.
    """
    p, n = alg.p, alg.n
    try:
        blocks = alg.blocks()
    except NoBlockStructure:
        blocks = None
    if blocks is not None:
        out = B
        for blk in blocks:
            tr = (blk.projection @ B).trace()
            if tr.is_zero():
                continue
            out = out - blk.projection * (tr / len(blk.indices))
        return out
    r = alg.center().residual(B)
    return from_sparse(p, n, r)


# -- carriers, Killing form, centers --------------------------------------
def central_carrier(A: PMatrix, alg: AlgebraSpan) -> PMatrix:
    """Sum of the minimal central projections ``P_i`` with ``P_i A != 0``."""
    out = PMatrix.zeros(alg.p, alg.n)
    for blk in alg.blocks():
        if not (blk.projection @ A).is_zero():
            out = out + blk.projection
    return out


def derived_algebra(alg: AlgebraSpan) -> SparseEchelon:
    """Span of the commutators ``[B_i, B_j]`` (the trace-zero part on each block)."""
    p, n = alg.p, alg.n
    ech = SparseEchelon(p)
    bv = alg.basis_vectors
    for i in range(len(bv)):
        for j in range(i + 1, len(bv)):
            c = sparse_commutator(p, n, bv[i], bv[j])
            if c:
                ech.insert(c)
    return ech


def killing_form(A: PMatrix, B: PMatrix, alg: AlgebraSpan, lie: SparseEchelon | None = None) -> PadicScalar:
    """``tr(ad A ad B)`` on the Lie algebra ``[alg, alg]``."""
    p, n = alg.p, alg.n
    pw = powers(p)
    lie = derived_algebra(alg) if lie is None else lie
    a, b = to_sparse(A), to_sparse(B)
    acc = ZERO_RAW
    for piv in lie.pivots:
        X = lie.rows[piv]
        Y = sparse_commutator(p, n, a, sparse_commutator(p, n, b, X))
        e = Y.get(piv)
        if e is not None:
            acc = K.add(p, pw, acc, e)
    return PadicScalar._make(p, acc)


@dataclass
class KillingGram:
    basis: list[PMatrix]
    gram: PMatrix
    det: PadicScalar
    det_valuation: float

    @property
    def nondegenerate(self) -> bool:
        return self.det_valuation != ZERO


def killing_gram(alg: AlgebraSpan) -> KillingGram:
    p, n = alg.p, alg.n
    lie = derived_algebra(alg)
    basis = [from_sparse(p, n, v) for v in lie.basis()]
    k = len(basis)
    G = PMatrix.zeros(p, k)
    for i in range(k):
        for j in range(i, k):
            val = killing_form(basis[i], basis[j], alg, lie).raw
            G.rows[i][j] = val
            G.rows[j][i] = val
    dt = det(G) if k else PadicScalar.one(p)
    return KillingGram(basis, G, dt, dt.norm())


def annihilates_center(D: DerivationMap, alg: AlgebraSpan) -> bool:
    return all(D.apply(z).is_zero() for z in alg.center().basis)


def projected_derivation_vanishes(D: DerivationMap, A: PMatrix) -> bool:
    """Whether ``D(A^k)`` has zero diagonal in the eigenbasis of ``A`` for all ``k < n``.

    In that basis the algebra generated by ``I`` and ``A`` is the diagonal,
    and projecting onto it keeps the diagonal part.
    """
    eig = eig_symmetric(A)
    n = A.n
    power = PMatrix.identity(A.p, n)
    for _ in range(n):
        Y = D.apply(power)
        Yeig = eig.C @ Y @ eig.C_inv
        for i in range(n):
            if not Yeig[i, i].is_zero():
                return False
        power = power @ A
    return True


# -- functionals ----------------------------------------------------------
class SymmetricFunctional:
    """``rho(A) = sum_{j,k} R[j][k] A[j][k]``."""

    def __init__(self, R: PMatrix):
        self.R = R
        self.p = R.p
        self.n = R.n

    @classmethod
    def coordinate(cls, p: int, n: int, j: int) -> "SymmetricFunctional":
        """Evaluation of the ``(j, j)`` entry."""
        return cls(PMatrix.unit(p, n, j, j))

    @classmethod
    def normalized_trace(cls, p: int, n: int) -> "SymmetricFunctional":
        return cls(PMatrix.identity(p, n).scale(PadicScalar.from_rational(f"1/{n}", p)))

    def __call__(self, A: PMatrix) -> PadicScalar:
        p, pw = self.p, powers(self.p)
        acc = ZERO_RAW
        for r1, r2 in zip(self.R.rows, A.rows):
            acc = K.add(p, pw, acc, K.dot(p, pw, r1, r2))
        return PadicScalar._make(p, acc)

    def is_symmetric(self, alg: AlgebraSpan | None = None) -> bool:
        if alg is None:
            return self.R.is_symmetric()
        return all((self(B.T) - self(B)).is_zero() for B in alg.basis)

    def is_unital(self) -> bool:
        return (self(PMatrix.identity(self.p, self.n)) - 1).is_zero()

    def is_state(self, alg: AlgebraSpan | None = None) -> bool:
        return self.is_symmetric(alg) and self.is_unital()

    def is_definite_on(self, A: PMatrix, kmax: int = 8) -> bool:
        """``rho(A^k) = rho(A)^k`` for ``1 <= k <= kmax``."""
        r = self(A)
        power = A
        for k in range(1, kmax + 1):
            if not (self(power) - r**k).is_zero():
                return False
            power = power @ A
        return True

    def is_multiplicative_on(self, alg: AlgebraSpan) -> bool:
        basis = alg.basis
        vals = [self(B) for B in basis]
        for A, ra in zip(basis, vals):
            for B, rb in zip(basis, vals):
                if not (self(A @ B) - ra * rb).is_zero():
                    return False
        return True


def functional_eval(rho: SymmetricFunctional, A: PMatrix) -> PadicScalar:
    return rho(A)


# -- extensions and commutant checks -------------------------------------
def extend_derivation(D: DerivationMap, d: str) -> DerivationMap:
    """The same map acting coefficient-wise on Mat_n(Q_p(sqrt d))."""
    return DerivationMap(D.M, D.n, D.domain, d)


def commutant_derivation_check(B: PMatrix, alg: AlgebraSpan, comm: AlgebraSpan | None = None) -> bool:
    """Whether ``ad B`` maps the commutant of ``alg`` into itself.

    ``ad B`` must preserve ``alg``; otherwise :class:`PreconditionViolated`.
    """
    p, n = alg.p, alg.n
    b = to_sparse(B)
    for A in alg.basis_vectors:
        if not alg.contains(sparse_commutator(p, n, b, A)):
            raise PreconditionViolated("ad B does not map the algebra into itself")
    comm = commutant(alg) if comm is None else comm
    return all(comm.contains(sparse_commutator(p, n, b, T)) for T in comm.basis_vectors)
