from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from padop import ZERO, PadicScalar
from padop.errors import RepeatedResidueRoots, SpectrumNotSplit
from padop.roots import horner, poly_roots


def poly_from_roots(roots, p):
    """Coefficients (lowest first) of prod (x - r)."""
    coeffs = [PadicScalar.one(p)]
    for r in roots:
        r = PadicScalar.from_rational(r, p)
        nxt = [PadicScalar.zero(p)] * (len(coeffs) + 1)
        for i, c in enumerate(coeffs):
            nxt[i + 1] = nxt[i + 1] + c
            nxt[i] = nxt[i] - c * r
        coeffs = nxt
    return coeffs


def P(cs, p=5):
    return [PadicScalar.from_rational(c, p) for c in cs]


def test_horner_value_and_derivative():
    f, df = horner(P([1, 0, 3]), PadicScalar.from_int(2, 5))  # 3x^2 + 1 at 2
    assert f == 13 and df == 12


@given(st.sampled_from([5, 7]), st.data())
def test_rational_roots_with_distinct_residues_and_valuations(p, data):
    k = data.draw(st.integers(1, 4))
    vals = data.draw(st.lists(st.integers(0, 2), min_size=k, max_size=k))
    keys = set()
    roots = []
    for v in vals:
        res = data.draw(st.integers(1, p - 1))
        if (v, res) in keys:
            continue
        keys.add((v, res))
        tail = data.draw(st.integers(0, 500))
        roots.append(Fraction(p**v) * (res + p * tail))
    found = poly_roots(poly_from_roots(roots, p))
    assert len(found) == len(roots)
    for r in found:
        assert r.d == "1" and r.residual == ZERO
    for q in roots:
        assert any(r.value == PadicScalar.from_rational(q, p) for r in found)


def test_unramified_pair():
    roots = poly_roots(P([-2, 0, 1]))  # x^2 - 2 over Q_5: 2 is a non-square mod 5
    assert [r.d for r in roots] == ["u", "u"]
    for r in roots:
        assert ((r.value * r.value).a - 2).is_zero()


def test_ramified_pair():
    roots = poly_roots(P([-5, 0, 1]))
    assert [r.d for r in roots] == ["p", "p"]
    assert all(r.value.norm() == Fraction(1, 2) for r in roots)


def test_zero_root():
    roots = poly_roots(P([0, -1, 1]))  # x^2 - x
    assert sorted(r.value.norm() for r in roots) == [0, ZERO]


def test_repeated_residues_rejected():
    with pytest.raises(RepeatedResidueRoots):
        poly_roots(poly_from_roots([1, 6], 5))
    with pytest.raises(RepeatedResidueRoots):
        poly_roots(P([0, 0, 1]))


def test_mixed_extensions_rejected():
    # (x^2 - 2)(x^2 - 5) over Q_5 needs both sqrt(u) and sqrt(p)
    cs = [10, 0, -7, 0, 1]
    with pytest.raises(SpectrumNotSplit):
        poly_roots(P(cs))
