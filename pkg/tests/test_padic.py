from fractions import Fraction

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from padop import ZERO, ExtScalar, PadicScalar, arith, norm, nth_root, sqrt
from padop.errors import (
    DivisionByZero,
    NoResidueRoot,
    PrecisionExhausted,
    PrimeMismatch,
    RamifiedCase,
    UnsupportedPrime,
)
from padop.padic import least_nonresidue, valuation_int
from padop.sampling import random_unit

PRIMES = [3, 5, 7, 11]


def Q(x, p=5):
    return PadicScalar.from_rational(x, p)


def frac_valuation(q: Fraction, p: int) -> int:
    return valuation_int(q.numerator, p) - valuation_int(q.denominator, p)


nonzero_fracs = st.fractions(max_denominator=10**6).filter(lambda q: q != 0 and abs(q.numerator) < 10**12)


# -- worked examples ---------------------------------------------------
def test_carry_raises_valuation():
    x = arith("add", Q(1), Q(4))
    assert x.norm() == 1 and x.digits[0] == 1


def test_p_times_inverse_is_one():
    x = arith("mul", Q(5), Q(Fraction(1, 5)))
    assert x.raw[0] == 0 and x == 1


def test_norm_examples():
    assert norm(Q(5) * Q(5)) == 2
    assert norm(Q(125)) == 3
    assert norm(PadicScalar.zero(5)) == ZERO
    assert norm(Q(Fraction(1, 5))) == -1


def test_sqrt_two_over_q7_has_residue_three():
    r = sqrt(Q(2, 7))
    assert r.d == "1" and r.a.residue() == 3
    assert r * r == Q(2, 7)


def test_sqrt_p_is_ramified_generator():
    r = sqrt(Q(5))
    assert r.d == "p" and r.a.is_zero() and r.b == 1
    assert (r * r - Q(5)).is_zero()


def test_sqrt_four_squared_full_precision():
    r = sqrt(Q(4))
    sq = r * r
    assert sq.d == "1" and (sq.a - Q(4)).norm() == ZERO and sq.a.prec == 32


def test_sqrt_of_nonresidue_lands_in_unramified_extension():
    r = sqrt(Q(2))
    assert r.d == "u"
    assert ((r * r).a - Q(2)).is_zero()
    assert r.norm() == 0


def test_nth_root_examples():
    assert nth_root(Q(8), 3) == 2
    for n in (2, 3, 4, 6):
        assert nth_root(Q(1, 7), n) == 1


def test_cube_roots_of_random_units(rng):
    for _ in range(50):
        x = random_unit(rng, 7)
        try:
            y = nth_root(x, 3)
        except NoResidueRoot:  # 7 = 1 mod 3, so only a third of the units are cubes
            continue
        assert (y**3 - x).norm() == ZERO


def test_nth_root_errors():
    with pytest.raises(RamifiedCase):
        nth_root(Q(5), 2)
    with pytest.raises(RamifiedCase):
        nth_root(Q(4), 5)
    with pytest.raises(UnsupportedPrime):
        sqrt(Q(3, 2))


def test_strict_cancellation_raises():
    x = Q(Fraction(1, 3))
    with pytest.raises(PrecisionExhausted):
        arith("sub", x, x)
    # operators stay non-strict and return an honest O(p^k)
    z = x - x
    assert z.is_zero() and not z.is_exact_zero() and z.abs_prec == 32


def test_division_errors():
    with pytest.raises(DivisionByZero):
        arith("div", Q(1), PadicScalar.zero(5))
    with pytest.raises(PrecisionExhausted):
        arith("div", Q(1), PadicScalar.zero(5, 10))


def test_prime_mismatch():
    with pytest.raises(PrimeMismatch):
        Q(1, 5) + Q(1, 7)


def test_rational_readout():
    for q in (Fraction(-128), Fraction(3, 2), Fraction(-1, 2), Fraction(1, 5), Fraction(7)):
        assert Q(q).rational() == q


def test_least_nonresidue():
    assert least_nonresidue(5) == 2
    assert least_nonresidue(7) == 3


# -- properties against Fraction arithmetic --------------------------------
@given(st.sampled_from(PRIMES), nonzero_fracs, nonzero_fracs)
def test_field_ops_match_fractions(p, a, b):
    x, y = Q(a, p), Q(b, p)
    assert x * y == Q(a * b, p)
    assert x / y == Q(a / b, p)
    if a + b != 0:
        assert x + y == Q(a + b, p)
        assert (x + y).norm() == frac_valuation(a + b, p)


@given(st.sampled_from(PRIMES), nonzero_fracs, nonzero_fracs)
def test_ultrametric_inequality(p, a, b):
    assume(a + b != 0)
    x, y = Q(a, p), Q(b, p)
    assert (x + y).norm() >= min(x.norm(), y.norm())
    if x.norm() != y.norm():
        assert (x + y).norm() == min(x.norm(), y.norm())


@given(st.sampled_from(PRIMES), nonzero_fracs, nonzero_fracs)
def test_norm_multiplicative(p, a, b):
    assert (Q(a, p) * Q(b, p)).norm() == Q(a, p).norm() + Q(b, p).norm()


@given(st.sampled_from([3, 5, 7]), nonzero_fracs)
def test_sqrt_squares_back(p, a):
    r = sqrt(Q(a, p))
    assert isinstance(r, ExtScalar)
    assert ((r * r).a - Q(a, p)).is_zero()
    assert (r * r).b.is_zero()


@given(st.sampled_from(PRIMES), st.integers(1, 10**9).filter(lambda n: n % 11 and n % 7 and n % 5 and n % 3))
def test_digits_round_trip(p, n):
    x = PadicScalar.from_int(n, p)
    assert PadicScalar.from_digits(p, x.raw[0], x.digits) == x


@given(st.sampled_from([5, 7]), nonzero_fracs, nonzero_fracs)
def test_extension_norm_multiplicative(p, a, b):
    for d in ("u", "p", "pu"):
        x = ExtScalar(p, d, Q(a, p), Q(b, p))
        y = ExtScalar(p, d, Q(b, p), Q(a, p))
        assert (x * y).norm() == x.norm() + y.norm()
