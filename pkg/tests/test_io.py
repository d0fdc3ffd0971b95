import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from padop import PadicScalar, io
from padop.errors import MalformedInput
from padop.funcalc import PPolynomial
from padop.linalg import PMatrix
from padop.padic import ExtScalar
from padop.sampling import random_matrix


def canon(obj) -> str:
    return json.dumps(obj, sort_keys=True)


def test_scalar_round_trip_example():
    obj = {"p": 7, "v": 0, "digits": [3]}
    x = io.parse_scalar(obj)
    assert x == 3
    assert io.serialize_scalar(x) == obj


def test_leading_zero_digit_rejected():
    with pytest.raises(MalformedInput) as exc:
        io.parse_scalar({"p": 7, "v": 0, "digits": [0, 1]})
    assert exc.value.path == "$.digits[0]"


@pytest.mark.parametrize("bad, path", [
    ({"p": 6, "v": 0, "digits": [1]}, "$.p"),
    ({"p": 7, "v": 0, "digits": [7]}, "$.digits[0]"),
    ({"p": 7, "v": "0", "digits": [1]}, "$.v"),
    ({"p": 7, "digits": [1]}, "$"),
    ({"p": 7, "v": 0, "digits": []}, "$.digits"),
    ({"p": 7, "zero": True, "digits": [1]}, "$"),
    ([1, 2], "$"),
])
def test_malformed_scalars(bad, path):
    with pytest.raises(MalformedInput) as exc:
        io.parse_scalar(bad)
    assert exc.value.path == path


def test_zero_forms():
    assert io.parse_scalar({"p": 5, "zero": True}).is_exact_zero()
    z = io.parse_scalar({"p": 5, "zero": True, "abs_prec": 4})
    assert z.is_zero() and z.abs_prec == 4
    assert io.serialize_scalar(z) == {"p": 5, "zero": True, "abs_prec": 4}


def test_shorthand_needs_context_prime():
    assert io.parse_scalar("3/2", 5) == PadicScalar.from_rational("3/2", 5)
    with pytest.raises(MalformedInput):
        io.parse_scalar(3)


def test_matrix_round_trip_is_byte_identical(rng):
    A = random_matrix(rng, 5, 4, -2, 3)
    text = canon(io.serialize_matrix(A))
    B = io.parse_matrix(json.loads(text))
    assert B.equals(A)
    assert canon(io.serialize_matrix(B)) == text


def test_matrix_shape_errors():
    with pytest.raises(MalformedInput) as exc:
        io.parse_matrix({"p": 5, "entries": [[1, 2], [3]]})
    assert exc.value.path == "$.entries[1]"


def test_extension_round_trip():
    x = ExtScalar(7, "pu", PadicScalar.from_int(2, 7), PadicScalar.from_int(3, 7))
    obj = io.serialize_ext(x)
    assert io.parse_ext(obj) == x
    with pytest.raises(MalformedInput):
        io.parse_ext({"p": 7, "d": "q", "a": 1, "b": 0})
    with pytest.raises(MalformedInput):
        io.parse_scalar(obj)


def test_polynomial_and_table():
    S = io.parse_polynomial({"coeffs": [0, 0, 1]}, 5)
    assert isinstance(S, PPolynomial) and S.degree == 2
    assert canon(io.serialize_polynomial(io.parse_polynomial(io.serialize_polynomial(S), 5))) == \
        canon(io.serialize_polynomial(S))
    f = io.parse_function_table({"domain": "Zp", "samples": [0, 1, 4, 9]}, 5)
    assert [c.rational() for c in f.coeffs] == [0, 1, 2, 0]
    with pytest.raises(MalformedInput):
        io.parse_function_table({"domain": "Qp", "samples": [0]}, 5)


def test_derivation_round_trip():
    from padop.derivations import DerivationMap

    D = DerivationMap.ad(PMatrix.unit(5, 2, 0, 1))
    obj = io.serialize_derivation(D)
    assert obj["vec_order"] == "row-major"
    assert io.parse_derivation(obj).M.equals(D.M)
    obj["n"] = 3
    with pytest.raises(MalformedInput):
        io.parse_derivation(obj)


def test_algebra_forms():
    assert io.parse_algebra({"p": 5, "kind": "blocks", "sizes": [2, 1]}).dim == 5
    gens = {"p": 5, "generators": [[[0, 1], [0, 0]], [[0, 0], [1, 0]]]}
    assert io.parse_algebra(gens).dim == 4
    with pytest.raises(MalformedInput):
        io.parse_algebra({"p": 5, "kind": "weird"})


def test_exponent_forms():
    from fractions import Fraction

    assert io.exponent(float("inf")) == "ZERO"
    assert io.exponent(Fraction(1, 2)) == "1/2"
    assert io.exponent(Fraction(4, 2)) == 2


@given(st.sampled_from([3, 5, 7]), st.integers(-5, 5), st.lists(st.integers(0, 2), min_size=1, max_size=10),
       st.integers(1, 2))
def test_scalar_json_round_trip(p, v, tail, lead):
    obj = {"p": p, "v": v, "digits": [lead] + tail}
    assert io.serialize_scalar(io.parse_scalar(obj)) == obj
