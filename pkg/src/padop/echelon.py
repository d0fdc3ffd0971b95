"""Sparse row echelon forms over Q_p on raw kernel triples.

Rows are dicts ``column -> raw``. The form is kept fully reduced with
normalized pivots, so a vector in the span equals the sum of basis rows
weighted by its own entries at the pivot columns.
"""

from __future__ import annotations

from ._backend import EXACT, kernels as K, powers
from .errors import PrecisionExhausted
from .padic import default_prec


def _pick_pivot(row: dict, allowed=None):
    best, bval = None, None
    for c, e in row.items():
        if allowed is not None and c >= allowed:
            continue
        if best is None or e[0] < bval or (e[0] == bval and c < best):
            best, bval = c, e[0]
    return best


class SparseEchelon:
    """Incremental fully reduced echelon form.

    Pivots are chosen by maximal norm (lowest column on ties). ``floor``
    records the lowest absolute precision of any cancellation that was
    treated as zero; a vector that only reduces to zero below
    ``min_certified`` raises :class:`PrecisionExhausted`.
    """

    def __init__(self, p: int, min_certified: int | None = None):
        self.p = p
        self.pw = powers(p)
        self.rows: dict[int, dict] = {}
        self.floor = EXACT
        self.min_certified = default_prec() // 2 if min_certified is None else min_certified

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def pivots(self) -> list[int]:
        return sorted(self.rows)

    def reduce(self, vec: dict) -> tuple[dict, int]:
        """Residue of ``vec`` modulo the span, and the cancellation floor."""
        p, pw = self.p, self.pw
        v = dict(vec)
        floor = EXACT
        for c in [k for k in v if k in self.rows]:
            coef = v.pop(c, None)
            if coef is None:
                continue
            f = K.sparse_axpy(p, pw, v, coef, self.rows[c])
            if f < floor:
                floor = f
            v.pop(c, None)
        return v, floor

    def contains(self, vec: dict) -> bool:
        r, floor = self.reduce(vec)
        if r:
            return False
        self._certify(floor)
        return True

    def _certify(self, floor: int) -> None:
        if floor < self.floor:
            self.floor = floor
        if floor < self.min_certified:
            raise PrecisionExhausted(f"rank decision only certified to O({self.p}^{floor})")

    def insert(self, vec: dict, allowed: int | None = None):
        """Add ``vec`` to the span; returns the new pivot column or None.

        With ``allowed`` set, pivots are restricted to columns below it; a
        residue with entries only at or beyond ``allowed`` returns ``-1``.
        """
        p, pw = self.p, self.pw
        r, floor = self.reduce(vec)
        if not r:
            self._certify(floor)
            return None
        c = _pick_pivot(r, allowed)
        if c is None:
            return -1
        inv = K.inv(p, pw, r[c])
        r = K.sparse_scale(p, pw, inv, r)
        r[c] = (0, 1, r[c][2])
        for row in self.rows.values():
            coef = row.get(c)
            if coef is not None:
                K.sparse_axpy(p, pw, row, coef, r)
                row.pop(c, None)
        self.rows[c] = r
        return c

    def coordinates(self, vec: dict) -> list:
        """Entries of ``vec`` at the pivots (its coordinates if it lies in the span)."""
        from ._backend import ZERO_RAW

        return [vec.get(c, ZERO_RAW) for c in self.pivots]

    def basis(self) -> list[dict]:
        return [self.rows[c] for c in self.pivots]


def null_space(p: int, equations: list[dict], unknowns: int) -> list[dict]:
    """Kernel basis of a sparse homogeneous system.

    The system is split into connected components of unknowns first, so
    block-structured systems are solved block by block.
    """
    parent = list(range(unknowns))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for eq in equations:
        it = iter(eq)
        first = next(it, None)
        if first is None:
            continue
        r0 = find(first)
        for k in it:
            rk = find(k)
            if rk != r0:
                parent[rk] = r0
    groups: dict[int, list[dict]] = {}
    for eq in equations:
        if eq:
            groups.setdefault(find(next(iter(eq))), []).append(eq)
    members: dict[int, list[int]] = {}
    for u in range(unknowns):
        members.setdefault(find(u), []).append(u)

    kernel = []
    one = (0, 1, default_prec())
    pw = powers(p)
    for root in sorted(members):
        ech = SparseEchelon(p)
        for eq in groups.get(root, []):
            ech.insert(eq)
        for f in members[root]:
            if f in ech.rows:
                continue
            vec = {f: one}
            for c, row in ech.rows.items():
                e = row.get(f)
                if e is not None:
                    vec[c] = K.neg(p, pw, e)
            kernel.append((f, vec))
    kernel.sort(key=lambda fv: fv[0])
    return [vec for _, vec in kernel]
