from fractions import Fraction

import pytest

from padop import ZERO, PadicScalar
from padop.errors import NotUnitriangular, PreconditionViolated, SeriesDiverges
from padop.funcalc import (
    ClampFunction,
    MahlerSeries,
    PPolynomial,
    binom_expand_bound,
    clamp,
    funcalc_spectral,
    funcalc_triangular,
    mahler_from_samples,
    operator_root,
    poly_eval,
    poly_norm_check,
    sup_norm_on_ball,
    to_mahler,
)
from padop.linalg import PMatrix, eig_symmetric
from padop.roots import poly_roots
from padop.sampling import distinct_spectrum, random_scalar, random_symmetric_split, random_zp


def S(p, *coeffs):
    return PPolynomial(p, [PadicScalar.from_rational(c, p) for c in coeffs])


def M(grid, p=5):
    return PMatrix.from_entries(p, grid)


def sc(x, p=5):
    return PadicScalar.from_rational(x, p)


SWAP = [[0, 1], [1, 0]]


# -- polynomial evaluation and sup norms -------------------------------------
def test_poly_eval_examples(rng):
    assert poly_eval(S(5, 0, 0, 1), M(SWAP)).equals(PMatrix.identity(5, 2))
    A = M([[1, 2], [3, 4]])
    assert poly_eval(S(5, 0, 1), A).equals(A)


def test_sup_norm_examples():
    assert sup_norm_on_ball(S(5, 0, 0, 1), 0) == 0
    assert sup_norm_on_ball(S(5, 0, 5), 0) == 1
    assert sup_norm_on_ball(S(5, 0, -1, 0, 0, 0, 1), 0) == 1  # t^5 - t vanishes mod 5
    assert sup_norm_on_ball(S(5, 0, 0, 1), -1) == 2  # |t| <= 1/5 gives |t^2| <= 1/25
    assert sup_norm_on_ball(S(5, 0, 0, 1), 1) == -2  # |t| <= 5 gives |t^2| <= 25


def test_sup_norm_against_sampling(rng):
    for _ in range(5):
        P = PPolynomial(5, [random_scalar(rng, 5, -1, 2, zero_rate=0.2) for _ in range(4)] + [random_scalar(rng, 5, 0, 1)])
        bound = sup_norm_on_ball(P, 0)
        best = ZERO
        for _ in range(10**4 // 5):
            val = P(random_zp(rng, 5)).norm()
            assert val >= bound
            best = min(best, val)
        assert best == bound


def test_mahler_coefficients_of_x5():
    assert [int(c.rational()) for c in to_mahler(S(5, 0, 0, 0, 0, 0, 1))] == [0, 1, 30, 150, 240, 120]


def test_poly_bound_on_symmetric_split(rng):
    P = S(5, 0, 5, 1)  # x^2 + p x
    done = 0
    while done < 100:
        A, _ = random_symmetric_split(rng, 5, rng.randint(2, 4), valuations=(0, 1))
        if A.norm() != 0:
            continue
        done += 1
        value = poly_eval(P, A)
        assert value.norm() >= 0
        assert poly_norm_check(P, A, value).holds


def test_poly_bound_fails_without_orthogonal_diagonalization():
    # a + d = 5, a d = 1: A = [[a, 1], [1, d]] has eigenvalues 0 and 5, but its
    # eigenbasis is not orthonormal, and (x^5 - x)(A) has norm 1 > sup = 1/5.
    a = next(r.value for r in poly_roots([sc(1), sc(-5), sc(1)]))
    A = PMatrix(5, [[a.raw, sc(1).raw], [sc(1).raw, (sc(5) - a).raw]])
    check = poly_norm_check(S(5, 0, -1, 0, 0, 0, 1), A)
    assert check.bound == 1 and check.achieved == 0 and not check.holds
    assert not eig_symmetric(A).isometric


# -- unitriangular powers ---------------------------------------------------
def test_binom_bound_examples(rng):
    I = PMatrix.identity(5, 3)
    assert binom_expand_bound(I, 7).bound == 0
    C = M([[1, 0, 0], [3, 1, 0], [1, 4, 1]])
    out = binom_expand_bound(C, 1000)
    assert out.bound == 0 and out.achieved >= 0
    for _ in range(50):
        n = rng.randint(2, 5)
        C = PMatrix.identity(5, n)
        for i in range(n):
            for j in range(i):
                C.rows[i][j] = random_scalar(rng, 5, -1, 2).raw
        k = rng.randint(1, 64)
        out = binom_expand_bound(C, k)
        assert out.achieved >= out.bound
    with pytest.raises(NotUnitriangular):
        binom_expand_bound(M([[1, 1], [1, 1]]), 2)


# -- Mahler series ------------------------------------------------------------
def test_mahler_examples():
    f = mahler_from_samples([sc(x * x) for x in range(4)], 5)
    assert [c.rational() for c in f.coeffs] == [0, 1, 2, 0]
    g = mahler_from_samples([sc(Fraction(7, 3))] * 5, 5)
    assert g.coeffs[0] == sc(Fraction(7, 3)) and all(c.is_zero() for c in g.coeffs[1:])


def test_mahler_series_interpolates_samples(rng):
    vals = [random_scalar(rng, 7, 0, 2) for _ in range(8)]
    f = mahler_from_samples(vals, 7)
    for x, y in enumerate(vals):
        assert (f(PadicScalar.from_int(x, 7)) - y).is_zero()


def test_mahler_truncation_tail_bound(rng):
    p, K = 5, 25
    f = mahler_from_samples([sc(x**p) for x in range(K + 1)], p)
    for _ in range(200):
        x = random_zp(rng, p)
        exact = x**p
        for k in range(K + 1):
            assert (exact - f(x, upto=k)).norm() >= f.tail_exponent(k)


def test_series_with_known_large_tail_diverges():
    f = MahlerSeries(5, [sc(1), sc(1)], tail=3)
    with pytest.raises(SeriesDiverges):
        funcalc_spectral(f, M([[1, 0], [0, 2]]))


# -- spectral and triangular routes ------------------------------------------
def test_spectral_examples(rng):
    A, _ = random_symmetric_split(rng, 5, 3)
    ident = mahler_from_samples([sc(0), sc(1)], 5)
    assert funcalc_spectral(ident, A).value.equals(A)
    sq = funcalc_spectral(S(7, 0, 0, 1), M(SWAP, 7))
    assert sq.value.equals(PMatrix.identity(7, 2)) and sq.check.holds
    assert sq.value.equals(poly_eval(S(7, 0, 0, 1), M(SWAP, 7)))


def test_spectral_requires_unit_ball():
    with pytest.raises(PreconditionViolated):
        funcalc_spectral(mahler_from_samples([sc(0), sc(1)], 5), M([[sc(Fraction(1, 5)), 0], [0, 1]]))


def test_triangular_route():
    # C = E = I, so the factored route reproduces S(A) exactly when S(1) = 1
    D = M([[2, 0], [0, 5]])
    for P in (S(5, 0, 0, 1), S(5, 0, -2, 2, 1)):
        out = funcalc_triangular(P, D)
        assert out.value.equals(poly_eval(P, D)) and out.discrepancy == ZERO
    assert funcalc_triangular(S(5, 1, 0, 1), D).discrepancy != ZERO
    A = M([[1, 2], [3, 4]])
    assert funcalc_triangular(S(5, 0, 1), A).value.equals(A)
    sq = funcalc_triangular(S(5, 0, 0, 1), A)
    assert sq.discrepancy != ZERO  # S(C)S(T)S(E) differs from S(CTE)
    assert sq.direct.equals(A @ A)
    assert sq.check.holds


# -- clamp -----------------------------------------------------------------
def test_clamp_examples():
    assert clamp(sc(3)) == 3
    assert clamp(sc(Fraction(1, 5))) == 1
    c = clamp(sc(Fraction(1, 25)))
    assert c == 5 and c.norm() == 1


def test_clamp_properties(rng):
    cl = ClampFunction(7)
    for v in range(-8, 9):
        t = random_scalar(rng, 7, v, v)
        c = cl(t)
        assert c.norm() >= 0
        assert (cl(c) - c).is_zero()


def test_clamp_series_is_identity_on_zp(rng):
    series = ClampFunction(5).mahler_series(10)
    assert series.coeffs[1] == 1 and all(c.is_zero() for i, c in enumerate(series.coeffs) if i != 1)
    A, _ = random_symmetric_split(rng, 5, 3)
    assert funcalc_spectral(series, A).value.equals(A)


# -- roots -----------------------------------------------------------------
def test_sqrt_of_diagonal_over_q7():
    out = operator_root(M([[4, 0], [0, 9]], 7), 2)
    assert out.B.equals(M([[2, 0], [0, 3]], 7))


def test_root_of_identity():
    for n in (2, 3):
        assert operator_root(PMatrix.identity(7, 3), n).B.equals(PMatrix.identity(7, 3))


def test_random_square_roots(rng):
    for _ in range(100):
        p = rng.choice([5, 7])
        A, _ = random_symmetric_split(rng, p, rng.randint(2, 4), valuations=(0, 1), power=2)
        out = operator_root(A, 2)
        assert (out.B @ out.B).equals(A)
        assert (out.B @ A - A @ out.B).is_zero()
        assert poly_eval(out.polynomial, A).equals(out.B)


def test_distinct_spectrum_keys(rng):
    values = distinct_spectrum(rng, 7, 5, (0, 1))
    keys = {(x.norm(), x.residue()) for x in values}
    assert len(keys) == 5
