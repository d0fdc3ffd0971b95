"""Roots of polynomials over Q_p lying in Q_p or one quadratic extension.

The Newton polygon splits roots by valuation. On each segment the residual
polynomial over F_p is factored by brute force (linear factors over F_p and
irreducible quadratics via F_{p^2}); every simple residue root is then refined
by Newton iteration and certified by evaluating the polynomial at the root.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import ExtensionMismatch, RepeatedResidueRoots, SpectrumNotSplit, UnsupportedPrime
from .padic import ZERO, ExtScalar, PadicScalar, common_disc, default_prec, least_nonresidue


@dataclass
class Root:
    value: PadicScalar | ExtScalar
    d: str
    residual: float  # norm exponent of f(value); ZERO when f(value) vanishes at precision
    certified: float  # absolute precision to which f(value) is known to vanish


def horner(coeffs: list, x):
    """Value and derivative of ``sum c_i x**i`` (coefficients lowest first)."""
    f = coeffs[-1] * 1
    df = x * 0
    for c in reversed(coeffs[:-1]):
        df = df * x + f
        f = f * x + c
    return f, df


def _lower_hull(points: list[tuple[int, int]]) -> list[tuple[int, int]]:
    hull: list[tuple[int, int]] = []
    for pt in points:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop hull[-1] if it lies on or above the chord hull[-2] -> pt
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    return hull


def _poly_mod_p_gcd_degree(g: list[int], p: int) -> int:
    """Degree of gcd(g, g') over F_p (0 means squarefree)."""
    def trim(a):
        a = [c % p for c in a]
        while a and a[-1] == 0:
            a.pop()
        return a

    a = trim(g)
    b = trim([i * g[i] for i in range(1, len(g))])
    while b:
        inv = pow(b[-1], -1, p)
        while len(a) >= len(b) and a:
            f = a[-1] * inv % p
            shift = len(a) - len(b)
            for i, c in enumerate(b):
                a[shift + i] = (a[shift + i] - f * c) % p
            a = trim(a)
        a, b = b, a
    return len(a) - 1


def _eval_mod(g: list[int], y: int, p: int) -> int:
    acc = 0
    for c in reversed(g):
        acc = (acc * y + c) % p
    return acc


def _eval_fp2(g: list[int], a: int, b: int, p: int, s: int) -> tuple[int, int]:
    """Evaluate ``g`` at ``a + b*sqrt(s)`` in F_{p^2}."""
    ra, rb = 0, 0
    for c in reversed(g):
        ra, rb = (ra * a + s * rb * b + c) % p, (ra * b + rb * a) % p
    return ra, rb


def _newton(coeffs: list, x0, iterations: int):
    x = x0
    for _ in range(iterations):
        f, df = horner(coeffs, x)
        x = x - f / df
        if f.is_zero():
            break
    return x


def _certify(coeffs: list, x) -> tuple[float, float]:
    f, _ = horner(coeffs, x)
    if f.is_zero():
        return ZERO, _abs_prec(f)
    return f.norm(), f.norm()


def _abs_prec(x) -> float:
    if isinstance(x, ExtScalar):
        return min(x.a.abs_prec, x.b.abs_prec)
    return x.abs_prec


def poly_roots(coeffs: list[PadicScalar]) -> list[Root]:
    """All roots of ``sum coeffs[i] x**i`` when they are simple at the residue level.

    Raises :class:`RepeatedResidueRoots` when a residual polynomial has a
    repeated factor, and :class:`SpectrumNotSplit` when some root needs an
    extension beyond a single quadratic one (or two different quadratic ones).
    """
    p = coeffs[0].p
    if p == 2:
        raise UnsupportedPrime("root finding at p = 2 is not supported")
    coeffs = list(coeffs)
    while coeffs and coeffs[-1].is_zero():
        coeffs.pop()
    deg = len(coeffs) - 1
    if deg < 1:
        return []
    prec = max(default_prec(), max(c.prec for c in coeffs if not c.is_zero()))
    iterations = 2 * prec.bit_length() + 6
    roots: list[Root] = []

    low = 0
    while coeffs[low].is_zero():
        low += 1
    if low >= 2:
        raise RepeatedResidueRoots("zero is a repeated root")
    if low == 1:
        c0, c1 = coeffs[0], coeffs[1]
        at = _abs_prec(c0) - c1.v if not c0.is_exact_zero() else None
        zero = PadicScalar.zero(p, at)
        roots.append(Root(zero, "1", ZERO, _abs_prec(c0)))

    pts = [(i, coeffs[i].v) for i in range(low, deg + 1) if not coeffs[i].is_zero()]
    hull = _lower_hull(pts)
    unr = least_nonresidue(p)
    for (i0, v0), (i1, v1) in zip(hull, hull[1:]):
        length = i1 - i0
        slope = Fraction(v0 - v1, length)  # root valuation
        if slope.denominator == 1:
            w = int(slope)
            g = []
            for j in range(length + 1):
                c = coeffs[i0 + j]
                on_line = not c.is_zero() and c.v == v0 - w * j
                g.append(c.unit % p if on_line else 0)
            if _poly_mod_p_gcd_degree(g, p) > 0:
                raise RepeatedResidueRoots(f"residual polynomial of slope {w} has a repeated factor mod {p}")
            lin = [y for y in range(1, p) if _eval_mod(g, y, p) == 0]
            quad = []
            for a in range(p):
                for b in range(1, (p + 1) // 2):
                    if _eval_fp2(g, a, b, p, unr) == (0, 0):
                        quad.append((a, b))
            if len(lin) + 2 * len(quad) != length:
                raise SpectrumNotSplit(f"residual polynomial of degree {length} has an irreducible factor of degree >= 3")
            scale = PadicScalar(p, w, 1, prec)
            for y in lin:
                x0 = PadicScalar.from_int(y, p, prec) * scale
                roots.append(_finish(coeffs, x0, "1", iterations))
            for a, b in quad:
                x0 = ExtScalar(p, "u", PadicScalar.from_int(a, p, prec) * scale, PadicScalar.from_int(b, p, prec) * scale)
                r = _finish(coeffs, x0, "u", iterations)
                roots.append(r)
                roots.append(_conjugate(coeffs, r))
        elif slope.denominator == 2 and length == 2:
            h = slope.numerator  # odd; roots have valuation h/2 and x**2 ~ t with v(t) = h
            lead, tail = coeffs[i0 + 2], coeffs[i0]
            t = -(tail / lead)
            t0 = t.unit % p
            if pow(t0, (p - 1) // 2, p) == 1:
                d, s = "p", t0
            else:
                d, s = "pu", t0 * pow(unr, -1, p) % p
            y0 = next(y for y in range(1, p) if y * y % p == s)
            bcoef = PadicScalar(p, (h - 1) // 2, y0, prec)
            x0 = ExtScalar(p, d, PadicScalar.zero(p), bcoef)
            r = _finish(coeffs, x0, d, iterations)
            roots.append(r)
            roots.append(_conjugate(coeffs, r))
        else:
            raise SpectrumNotSplit(f"Newton polygon segment of slope {slope} and length {length} needs a larger extension")

    d_all = "1"
    for r in roots:
        try:
            d_all = common_disc(d_all, r.d)
        except ExtensionMismatch as exc:
            raise SpectrumNotSplit("roots lie in different quadratic extensions") from exc
    return roots


def _finish(coeffs: list, x0, d: str, iterations: int) -> Root:
    if d != "1":
        coeffs = [ExtScalar.embed(c, d) for c in coeffs]
    x = _newton(coeffs, x0, iterations)
    res, cert = _certify(coeffs, x)
    return Root(x, d, res, cert)


def _conjugate(coeffs: list, r: Root) -> Root:
    conj = r.value.conj()
    res, cert = _certify([ExtScalar.embed(c, r.d) for c in coeffs], conj)
    return Root(conj, r.d, res, cert)
