"""JSON encoding of scalars, matrices, polynomials, function tables and derivations.

Scalars are ``{"p": 7, "v": -1, "digits": [3, 0, 6, ...]}`` with little-endian
base-p unit digits (``digits[0] != 0``). The exact zero is
``{"p": 7, "zero": true}``; a zero known only modulo ``p**k`` carries an extra
``"abs_prec": k``. Where the prime is known from context, plain integers and
``"a/b"`` strings are accepted as shorthand.
"""

from __future__ import annotations

from fractions import Fraction

from ._backend import EXACT, MAX_PREC
from .errors import MalformedInput
from .linalg import ExtMatrix, PMatrix
from .padic import D_CODES, ExtScalar, PadicScalar, is_prime


def _require(cond: bool, message: str, path: str) -> None:
    if not cond:
        raise MalformedInput(message, path)


def _int(x, path: str) -> int:
    _require(isinstance(x, int) and not isinstance(x, bool), "expected an integer", path)
    return x


def parse_prime(x, path: str = "$.p") -> int:
    p = _int(x, path)
    _require(is_prime(p), f"{p} is not prime", path)
    return p


# -- scalars ---------------------------------------------------------------
def parse_scalar(obj, p: int | None = None, path: str = "$") -> PadicScalar:
    if isinstance(obj, bool):
        raise MalformedInput("expected a scalar", path)
    if isinstance(obj, (int, str)):
        _require(p is not None, "shorthand scalar needs a prime from context", path)
        try:
            q = Fraction(obj)
        except (ValueError, ZeroDivisionError):
            raise MalformedInput(f"cannot read {obj!r} as a rational", path) from None
        return PadicScalar.from_rational(q, p)
    _require(isinstance(obj, dict), "expected a scalar object", path)
    if "d" in obj:
        raise MalformedInput("extension element where a Q_p scalar is required", path)
    sp = parse_prime(obj.get("p", p), path + ".p")
    _require(p is None or sp == p, f"prime {sp} differs from context prime {p}", path + ".p")
    if obj.get("zero"):
        _require(set(obj) <= {"p", "zero", "abs_prec"}, "zero carries no digits", path)
        if "abs_prec" in obj:
            return PadicScalar.zero(sp, _int(obj["abs_prec"], path + ".abs_prec"))
        return PadicScalar.zero(sp)
    _require("v" in obj and "digits" in obj, "scalar needs 'v' and 'digits'", path)
    v = _int(obj["v"], path + ".v")
    digits = obj["digits"]
    _require(isinstance(digits, list) and digits, "digits must be a non-empty list", path + ".digits")
    _require(len(digits) <= MAX_PREC, f"at most {MAX_PREC} digits", path + ".digits")
    for i, d in enumerate(digits):
        _int(d, f"{path}.digits[{i}]")
        _require(0 <= d < sp, f"digit {d} out of range for p = {sp}", f"{path}.digits[{i}]")
    _require(digits[0] != 0, "leading unit digit must be nonzero", f"{path}.digits[0]")
    return PadicScalar.from_digits(sp, v, digits)


def serialize_scalar(x: PadicScalar) -> dict:
    v, u, r = x.raw
    if u == 0:
        if v >= EXACT:
            return {"p": x.p, "zero": True}
        return {"p": x.p, "zero": True, "abs_prec": v}
    return {"p": x.p, "v": v, "digits": x.digits}


def parse_ext(obj, p: int | None = None, path: str = "$") -> ExtScalar:
    if isinstance(obj, dict) and "d" in obj:
        sp = parse_prime(obj.get("p", p), path + ".p")
        d = obj["d"]
        _require(d in D_CODES, f"d must be one of {list(D_CODES)}", path + ".d")
        a = parse_scalar(obj.get("a", 0), sp, path + ".a")
        b = parse_scalar(obj.get("b", 0), sp, path + ".b")
        _require(d != "1" or b.is_zero(), "d = 1 requires b = 0", path + ".b")
        return ExtScalar(sp, d, a, b)
    return ExtScalar.embed(parse_scalar(obj, p, path), "1")


def serialize_ext(x: ExtScalar) -> dict:
    return {"p": x.p, "d": x.d, "a": serialize_scalar(x.a), "b": serialize_scalar(x.b)}


def serialize_value(x) -> dict:
    if isinstance(x, ExtScalar):
        if x.d == "1":
            return serialize_scalar(x.a)
        return serialize_ext(x)
    return serialize_scalar(x)


# -- matrices --------------------------------------------------------------
def parse_matrix(obj, p: int | None = None, path: str = "$") -> PMatrix:
    if isinstance(obj, list):
        obj = {"entries": obj}
    _require(isinstance(obj, dict), "expected a matrix object", path)
    mp = obj.get("p", p)
    _require(mp is not None, "matrix needs a prime", path + ".p")
    mp = parse_prime(mp, path + ".p")
    entries = obj.get("entries")
    _require(isinstance(entries, list) and entries, "entries must be a non-empty list of rows", path + ".entries")
    n = obj.get("n", len(entries))
    _int(n, path + ".n")
    _require(len(entries) == n, f"expected {n} rows", path + ".entries")
    rows = []
    for i, row in enumerate(entries):
        _require(isinstance(row, list) and len(row) == n, f"row must have {n} entries", f"{path}.entries[{i}]")
        rows.append([parse_scalar(x, mp, f"{path}.entries[{i}][{j}]").raw for j, x in enumerate(row)])
    return PMatrix(mp, rows)


def parse_ext_matrix(obj, p: int | None = None, path: str = "$") -> PMatrix | ExtMatrix:
    """Matrix whose entries may be extension elements (all with one ``d``)."""
    if isinstance(obj, dict) and "d" in obj and obj["d"] != "1":
        mp = parse_prime(obj.get("p", p), path + ".p")
        d = obj["d"]
        _require(d in D_CODES, "unknown discriminant code", path + ".d")
        grid = []
        for i, row in enumerate(obj.get("entries", [])):
            grid.append([ExtScalar.embed(parse_ext(x, mp, f"{path}.entries[{i}][{j}]"), d) for j, x in enumerate(row)])
        return ExtMatrix(mp, d, grid)
    return parse_matrix(obj, p, path)


def serialize_matrix(A) -> dict:
    if isinstance(A, ExtMatrix):
        if A.in_base_field():
            return serialize_matrix(A.re)
        return {"p": A.p, "n": A.shape[0], "d": A.d,
                "entries": [[serialize_ext(x) for x in row] for row in A.grid]}
    return {"p": A.p, "n": A.shape[0], "entries": [[serialize_scalar(x) for x in row] for row in A.entries()]}


# -- polynomials, function tables, derivations -----------------------------
def parse_polynomial(obj, p: int, path: str = "$"):
    from .funcalc import PPolynomial

    _require(isinstance(obj, dict) and isinstance(obj.get("coeffs"), list) and obj["coeffs"],
             "polynomial needs a non-empty 'coeffs' list", path)
    return PPolynomial(p, [parse_scalar(c, p, f"{path}.coeffs[{i}]") for i, c in enumerate(obj["coeffs"])])


def serialize_polynomial(S) -> dict:
    return {"coeffs": [serialize_scalar(c) for c in S.coeffs]}


def parse_function_table(obj, p: int, path: str = "$"):
    from .funcalc import mahler_from_samples

    _require(isinstance(obj, dict), "expected a function table", path)
    _require(obj.get("domain", "Zp") == "Zp", "only the domain 'Zp' is supported", path + ".domain")
    samples = obj.get("samples")
    _require(isinstance(samples, list) and samples, "samples must be a non-empty list", path + ".samples")
    return mahler_from_samples([parse_scalar(s, p, f"{path}.samples[{i}]") for i, s in enumerate(samples)], p)


def parse_derivation(obj, p: int | None = None, path: str = "$"):
    from .derivations import DerivationMap

    _require(isinstance(obj, dict), "expected a derivation object", path)
    _require(obj.get("vec_order", "row-major") == "row-major", "only row-major vectorization is supported",
             path + ".vec_order")
    n = _int(obj.get("n"), path + ".n")
    M = parse_matrix({"p": obj.get("p", p), "entries": obj.get("matrix")}, p, path + ".matrix")
    _require(M.shape == (n * n, n * n), f"matrix must be {n * n} x {n * n}", path + ".matrix")
    return DerivationMap(M, n)


def serialize_derivation(D) -> dict:
    return {"p": D.p, "n": D.n, "vec_order": "row-major",
            "matrix": [[serialize_scalar(x) for x in row] for row in D.M.entries()]}


def parse_algebra(obj, p: int | None = None, path: str = "$"):
    """Algebra from explicit generators or a named family."""
    from . import derivations as dv

    _require(isinstance(obj, dict), "expected an algebra object", path)
    ap = obj.get("p", p)
    _require(ap is not None, "algebra needs a prime", path + ".p")
    ap = parse_prime(ap, path + ".p")
    if "generators" in obj:
        gens = obj["generators"]
        _require(isinstance(gens, list) and gens, "generators must be a non-empty list", path + ".generators")
        mats = [parse_matrix(g, ap, f"{path}.generators[{i}]") for i, g in enumerate(gens)]
        _require(len({m.shape for m in mats}) == 1, "generators must share one size", path + ".generators")
        return dv.close_span(mats)
    kind = obj.get("kind")
    if kind == "full":
        return dv.full_algebra(ap, _int(obj.get("n"), path + ".n"))
    if kind == "diagonal":
        return dv.diagonal_algebra(ap, _int(obj.get("n"), path + ".n"))
    if kind == "blocks":
        sizes = obj.get("sizes")
        _require(isinstance(sizes, list) and sizes and all(isinstance(s, int) and s > 0 for s in sizes),
                 "sizes must be a list of positive integers", path + ".sizes")
        return dv.block_algebra(ap, sizes, _int(obj.get("multiplicity", 1), path + ".multiplicity"))
    if kind == "tensor":
        return dv.tensor_with_identity(ap, _int(obj.get("k"), path + ".k"), _int(obj.get("m"), path + ".m"),
                                       obj.get("side", "left") == "left")
    raise MalformedInput("algebra needs 'generators' or kind in {full, diagonal, blocks, tensor}", path)


def serialize_algebra(alg) -> dict:
    return {"p": alg.p, "n": alg.n, "dim": alg.dim, "basis": [serialize_matrix(B) for B in alg.basis]}


def exponent(e):
    """JSON form of a norm exponent: an integer, ``"a/2"`` when ramified, or ``"ZERO"``."""
    if e == float("inf"):
        return "ZERO"
    if isinstance(e, Fraction):
        return int(e) if e.denominator == 1 else f"{e.numerator}/{e.denominator}"
    return int(e)
