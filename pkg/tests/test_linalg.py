from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import frac_charpoly_at, frac_det, frac_matmul
from padop import ZERO, PadicScalar
from padop.errors import NotAntisymmetric, PrecisionExhausted, Singular, SpectrumNotSplit, UnsupportedPrime
from padop.linalg import (
    PMatrix,
    block_symmetrize,
    char_poly,
    char_roots,
    det,
    eig_symmetric,
    imaginary_unit,
    ldu_decompose,
    matrix_arith,
    op_norm,
    symmetric_split,
    transpose,
)
from padop.sampling import random_matrix, random_symmetric_split


def M(grid, p=5):
    return PMatrix.from_entries(p, grid)


small_int_matrices = st.integers(1, 5).flatmap(
    lambda n: st.lists(st.lists(st.integers(-40, 40), min_size=n, max_size=n), min_size=n, max_size=n))


def test_identity_product():
    A = M([[1, 2], [3, 4]])
    assert matrix_arith("mul", PMatrix.identity(5, 2), A).equals(A)


def test_inverse_closed_form():
    inv = matrix_arith("inverse", M([[1, 2], [3, 4]]))
    assert inv.equals(M([[-2, 1], [Fraction(3, 2), Fraction(-1, 2)]]))


def test_inverse_of_singular():
    with pytest.raises(Singular):
        M([[1, 2], [2, 4]]).inverse()


def test_submultiplicative_norm(rng):
    for _ in range(1000):
        n = rng.randint(1, 5)
        A, B = random_matrix(rng, 5, n, -2, 3), random_matrix(rng, 5, n, -2, 3)
        assert (A @ B).norm() >= A.norm() + B.norm()


def test_op_norm_examples():
    assert op_norm(M([[5, 1], [25, 125]])) == 0
    assert op_norm(PMatrix.zeros(5, 3)) == ZERO


def test_op_norm_matches_unit_vector_sup(rng):
    A = random_matrix(rng, 5, 4, -1, 3)
    best = ZERO
    for _ in range(1000):
        x = random_matrix(rng, 5, 4, 0, 1, m=1)  # a column vector, norm <= 1
        x.rows[rng.randrange(4)][0] = PadicScalar.from_int(rng.randint(1, 4), 5).raw
        y = A @ x
        assert y.norm() >= op_norm(A)
        best = min(best, y.norm())
    assert best == op_norm(A)


def test_transpose_examples(rng):
    assert transpose(M([[0, 1], [0, 0]])).equals(M([[0, 0], [1, 0]]))
    S = M([[1, 2], [2, 3]])
    assert transpose(S).equals(S)
    for _ in range(1000):
        n = rng.randint(1, 4)
        A, B = random_matrix(rng, 7, n), random_matrix(rng, 7, n)
        assert (A @ B).T.equals(B.T @ A.T)


def test_symmetric_split(rng):
    S = M([[1, 2], [2, 3]])
    A1, A2 = symmetric_split(S)
    assert A1.equals(S) and A2.is_zero()
    A1, A2 = symmetric_split(M([[0, 1], [-1, 0]]))
    assert A1.is_zero() and A2.equals(M([[0, -1], [1, 0]]))
    for _ in range(1000):
        A = random_matrix(rng, 5, rng.randint(1, 5))
        A1, A2 = symmetric_split(A)
        assert (A1 - A2).equals(A) and A1.is_symmetric() and A2.is_antisymmetric()
    with pytest.raises(UnsupportedPrime):
        symmetric_split(M([[1]], 2))


def test_block_symmetrize():
    assert block_symmetrize(M([[0]])).is_zero()
    S = block_symmetrize(M([[0, 1], [-1, 0]]))
    assert S.shape == (4, 4) and S.is_symmetric() and S.norm() == 0
    with pytest.raises(NotAntisymmetric):
        block_symmetrize(M([[1, 0], [0, 0]]))


def test_imaginary_unit_squares_to_minus_one():
    i = imaginary_unit(7)
    assert (i @ i).equals(PMatrix.identity(7, 2).scale(PadicScalar.from_int(-1, 7)))


# -- decomposition -------------------------------------------------------
def test_ldu_example():
    dec = ldu_decompose(M([[1, 2], [3, 4]]))
    assert dec.row_perm == [0, 1] and dec.col_perm == [0, 1]
    assert dec.C.equals(M([[1, 0], [3, 1]]))
    assert dec.T.equals(M([[1, 0], [0, -2]]))
    assert dec.E.equals(M([[1, 2], [0, 1]]))


def test_ldu_diagonal_sorts_by_norm():
    A = M([[25, 0, 0], [0, 1, 0], [0, 0, 5]])
    dec = ldu_decompose(A)
    assert dec.C.equals(PMatrix.identity(5, 3)) and dec.E.equals(PMatrix.identity(5, 3))
    assert [dec.T[i, i].norm() for i in range(3)] == [0, 1, 2]
    assert dec.product().equals(dec.permute(A))
    assert dec.unpermute(dec.product()).equals(A)


def test_ldu_rank_deficient(rng):
    A = random_matrix(rng, 5, 4, m=2) @ random_matrix(rng, 5, 2, m=4)
    dec = ldu_decompose(A)
    assert dec.product().equals(dec.permute(A))
    assert dec.T[2, 2].is_zero() and dec.T[3, 3].is_zero()


def test_ldu_refuses_uncertified_pivot():
    x = PadicScalar.from_rational(Fraction(1, 3), 5)
    A = PMatrix(5, [[(x - x).raw, PadicScalar.from_int(5, 5).raw], [PadicScalar.from_int(5, 5).raw, (x - x).raw]])
    A.rows[0][0] = (0, 0, 0)  # O(1): nothing known
    with pytest.raises(PrecisionExhausted):
        ldu_decompose(A)


@given(small_int_matrices, st.sampled_from([3, 5, 7]))
def test_det_matches_fraction_oracle(grid, p):
    assert det(PMatrix.from_entries(p, grid)) == PadicScalar.from_rational(frac_det(grid), p)


@given(small_int_matrices, st.sampled_from([5, 7]))
def test_char_poly_matches_determinant_oracle(grid, p):
    coeffs = char_poly(PMatrix.from_entries(p, grid))
    assert len(coeffs) == len(grid) + 1
    for t in range(-2, 3):
        value = sum((c * t**k for k, c in enumerate(coeffs)), PadicScalar.zero(p))
        assert value == PadicScalar.from_rational(frac_charpoly_at(grid, t), p)


def test_fraction_oracle_cross_check():
    grid = [[1, 2], [3, 4]]
    inv = [[-2, 1], [Fraction(3, 2), Fraction(-1, 2)]]
    assert frac_matmul(grid, inv) == [[1, 0], [0, 1]]


# -- spectra -------------------------------------------------------------
def _values(roots):
    return [lam for lam, mult in roots]


def test_char_roots_diagonal():
    vals = _values(char_roots(M([[1, 0], [0, 5]])))
    assert sorted(v.a.norm() for v in vals) == [0, 1]
    assert any(v == 1 for v in vals) and any(v == 5 for v in vals)


def test_char_roots_swap():
    vals = _values(char_roots(M([[0, 1], [1, 0]])))
    assert sorted(int(v.a.rational()) for v in vals) == [-1, 1]


def test_char_roots_sqrt_two_over_q7():
    vals = _values(char_roots(M([[0, 1], [2, 0]], 7)))
    assert all(v.d == "1" for v in vals)
    assert sorted(v.a.residue() for v in vals) == [3, 4]
    for v in vals:
        assert (v.a * v.a - 2).is_zero()


def test_char_roots_ramified():
    vals = _values(char_roots(M([[0, 1], [5, 0]])))
    assert all(v.d == "p" for v in vals)
    assert all(v.norm() == Fraction(1, 2) for v in vals)


def test_char_roots_non_split():
    # x^3 - 2 over Q_7: 2 is not a cube mod 7, and a cubic residue extension is out of reach
    with pytest.raises(SpectrumNotSplit):
        char_roots(M([[0, 1, 0], [0, 0, 1], [2, 0, 0]], 7))


def test_eig_diagonal():
    A = M([[1, 0], [0, 2]])
    eig = eig_symmetric(A)
    assert eig.C.equals(PMatrix.identity(5, 2))
    assert eig.Lambda.equals(A)
    assert eig.isometric


def test_eig_swap_over_q7():
    A = M([[0, 1], [1, 0]], 7)
    eig = eig_symmetric(A)
    assert sorted(int(v.rational()) for v in eig.eigenvalues) == [-1, 1]
    assert eig.isometric
    assert (eig.C @ eig.C.T).equals(PMatrix.identity(7, 2))
    assert eig.reconstruct().equals(A)
    # rows are (1, +-1)/sqrt(2) up to sign
    for row in eig.C.entries():
        assert (row[0] * row[0] * 2 - 1).is_zero()
        assert (row[1] * row[1] * 2 - 1).is_zero()


def test_eig_reconstruction_random(rng):
    iso = 0
    for _ in range(200):
        p = rng.choice([5, 7])
        A, spectrum = random_symmetric_split(rng, p, rng.randint(2, 5))
        eig = eig_symmetric(A)
        assert eig.reconstruct().equals(A)
        iso += eig.isometric
        if eig.isometric:
            assert (eig.C @ eig.C.T).equals(PMatrix.identity(p, A.n))
    assert iso > 0
