from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from conftest import cofactor_det, rand_mat
from pclab.errors import BadPartition, DimensionMismatch, NonSquare, RankMismatch, Singular
from pclab.matrix import (
    BlockPartition,
    Mat,
    block_inverse,
    blocks,
    det,
    inverse,
    left_nullspace,
    mat_arith,
    rank,
    reassemble,
    schur_A,
    schur_D,
    similarity_normalize,
)
from pclab.scalar import Scalar


def M(rows):
    return Mat.from_rows(rows)


# -- scalars -----------------------------------------------------------------

def test_scalar_lowest_terms_and_sign():
    s = Scalar(Fraction(4, -6), Fraction(3, 9))
    assert s.re.denominator == 3 and s.re.numerator == -2
    assert s.im.denominator == 3


def test_scalar_rejects_float():
    with pytest.raises(TypeError):
        Scalar.coerce(0.5)


@given(st.fractions(max_denominator=50), st.fractions(max_denominator=50),
       st.fractions(max_denominator=50), st.fractions(max_denominator=50))
def test_scalar_field_axioms(a, b, c, d):
    x, y = Scalar(a, b), Scalar(c, d)
    assert x * y == y * x
    assert (x + y) - y == x
    if y:
        assert (x / y) * y == x
        assert y * y.inverse() == 1


def test_scalar_complex_product():
    i = Scalar(0, 1)
    assert i * i == -1
    assert str(Scalar(Fraction(1, 2), Fraction(3, 4))) == "1/2+3/4i"


# -- arithmetic ----------------------------------------------------------------

def test_identity_product():
    assert Mat.identity(2) @ Mat.identity(2) == Mat.identity(2)


def test_hand_product():
    assert M([[1, 2], [3, 4]]) @ M([[0, 1], [1, 0]]) == M([[2, 1], [4, 3]])
    # transpose identity as a second check
    assert (M([[1, 2], [3, 4]]) @ M([[0, 1], [1, 0]])).T == M([[0, 1], [1, 0]]) @ M([[1, 3], [2, 4]])


def test_sub_self_is_zero(rnd):
    a = rand_mat(rnd, 3)
    assert mat_arith(a, a, "sub").is_zero()


def test_shape_mismatch():
    with pytest.raises(DimensionMismatch):
        Mat.identity(2) @ Mat.identity(3)
    with pytest.raises(DimensionMismatch):
        Mat.identity(2) + Mat.identity(3)


# -- det / inverse ------------------------------------------------------------

def test_det_small_cases():
    assert det(Mat.identity(3)) == 1
    assert det(M([[0, 1], [1, 0]])) == -1


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_det_matches_cofactor_expansion(rnd, n):
    for _ in range(5):
        a = rand_mat(rnd, n)
        assert det(a) == cofactor_det(a.rows())


def test_det_nonsquare():
    with pytest.raises(NonSquare):
        det(Mat.zeros(2, 3))


def test_inverse_cases(rnd):
    assert inverse(Mat.identity(3)) == Mat.identity(3)
    assert inverse(M([[2, 0], [0, 4]])) == M([[Fraction(1, 2), 0], [0, Fraction(1, 4)]])
    for _ in range(5):
        a = rand_mat(rnd, 3)
        if det(a):
            assert a @ inverse(a) == Mat.identity(3)
            assert inverse(a) @ a == Mat.identity(3)


def test_inverse_singular():
    with pytest.raises(Singular):
        inverse(M([[1, 2], [2, 4]]))


def test_rank():
    assert rank(M([[1, 2], [2, 4]])) == 1
    assert rank(Mat.zeros(3)) == 0
    assert rank(Mat.identity(4)) == 4


# -- blocks and Schur complements ---------------------------------------------

def test_blocks_examples():
    A, B, C, D = blocks(Mat.identity(3), BlockPartition(3, 1))
    assert A == Mat.identity(1) and B.is_zero() and C.is_zero() and D == Mat.identity(2)
    assert B.shape == (1, 2) and C.shape == (2, 1)
    A, B, C, D = blocks(M([[1, 2], [3, 4]]), BlockPartition(2, 1))
    assert (A, B, C, D) == (M([[1]]), M([[2]]), M([[3]]), M([[4]]))


def test_blocks_round_trip(rnd):
    for n in (2, 3, 4):
        for r in range(1, n):
            a = rand_mat(rnd, n)
            assert reassemble(*blocks(a, BlockPartition(n, r))) == a


def test_bad_partition():
    with pytest.raises(BadPartition):
        BlockPartition(3, 0)
    with pytest.raises(BadPartition):
        BlockPartition(2, 3)


def test_schur_examples():
    p = BlockPartition(2, 1)
    assert schur_D(M([[1, 2], [3, 4]]), p) == M([[Fraction(-1, 2)]])
    diag = reassemble(M([[5]]), Mat.zeros(1, 1), Mat.zeros(1, 1), M([[7]]))
    assert schur_D(diag, p) == M([[5]])
    assert schur_A(diag, p) == M([[7]])


def test_det_factorizations(rnd):
    for n in (2, 3, 4):
        for r in range(1, n):
            p = BlockPartition(n, r)
            a = rand_mat(rnd, n)
            A, _, _, D = blocks(a, p)
            if det(D):
                assert det(a) == det(D) * det(schur_D(a, p))
            if det(A):
                assert det(a) == det(A) * det(schur_A(a, p))


def test_block_inverse_branches(rnd):
    assert block_inverse(Mat.identity(3), BlockPartition(3, 1)) == Mat.identity(3)
    checked = 0
    while checked < 10:
        a = rand_mat(rnd, 3)
        p = BlockPartition(3, 1)
        A, _, _, D = blocks(a, p)
        if not (det(a) and det(A) and det(D)):
            continue
        inv = inverse(a)
        assert block_inverse(a, p, branch="D") == inv
        assert block_inverse(a, p, branch="A") == inv
        assert block_inverse(a, p, branch="both") == inv
        checked += 1


# -- nullspace and normalization ---------------------------------------------

def test_left_nullspace_cases():
    assert len(left_nullspace(Mat.zeros(3))) == 3
    assert left_nullspace(Mat.identity(3)) == []
    u = M([[1], [2], [3]])
    v = M([[4, 5, 6]])
    basis = left_nullspace(u @ v)
    assert len(basis) == 2
    for row in basis:
        assert (row @ (u @ v)).is_zero()
    assert rank(Mat.from_rows([b.row(0) for b in basis])) == 2


def _top_rows_zero(a, r):
    return all(not x for x in a.entries[:r * a.n_cols])


def test_similarity_normalize_postcondition(rnd):
    b0 = M([[0, 1], [0, 0]])
    Mm = similarity_normalize(b0, 1)
    assert _top_rows_zero(Mm @ b0 @ inverse(Mm), 1)
    already = M([[0, 0], [1, 2]])
    Mm = similarity_normalize(already, 1)
    assert _top_rows_zero(Mm @ already @ inverse(Mm), 1)
    for n in (2, 3, 4):
        for r in range(1, n):
            b = rand_mat(rnd, n, n - r) @ rand_mat(rnd, n - r, n)
            if rank(b) != n - r:
                continue
            Mm = similarity_normalize(b, r)
            assert _top_rows_zero(Mm @ b @ inverse(Mm), r)


def test_similarity_normalize_rank_mismatch():
    with pytest.raises(RankMismatch):
        similarity_normalize(Mat.identity(2), 1)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-5, 5), min_size=9, max_size=9))
def test_det_multiplicative_property(vals):
    a = Mat(3, 3, vals)
    b = Mat(3, 3, list(reversed(vals)))
    assert det(a @ b) == det(a) * det(b)
