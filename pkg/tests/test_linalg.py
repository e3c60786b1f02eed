from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from flopkit.linalg import Field, Matrix, QQ, block_matrix, is_prime, kernel_basis, rank, rref, solve

FIELDS = [QQ, Field(2), Field(3), Field(5), Field(7)]


@st.composite
def matrices(draw, max_dim=5, field=None):
    F = field or draw(st.sampled_from(FIELDS))
    r = draw(st.integers(0, max_dim))
    c = draw(st.integers(0, max_dim))
    data = [[draw(st.integers(-4, 4)) for _ in range(c)] for _ in range(r)]
    return Matrix(F, r, c, data)


def test_field_parse():
    assert Field.parse("q") == QQ
    assert Field.parse("p:7") == Field(7)
    assert Field.parse("F5") == Field(5)
    with pytest.raises(ValueError):
        Field.parse("p:9")
    with pytest.raises(ValueError):
        Field.parse("reals")


def test_primes():
    assert [p for p in range(30) if is_prime(p)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


@pytest.mark.parametrize("F", FIELDS[1:])
def test_prime_field_inverses(F):
    for a in F.elements():
        if a:
            assert F.mul(a, F.inv(a)) == 1
    with pytest.raises(ZeroDivisionError):
        F.inv(F.zero())


def test_rationals_are_exact():
    m = Matrix(QQ, 2, 2, [[1, 3], [3, 1]])
    x = solve(m, Matrix(QQ, 2, 1, [[1], [0]]))
    assert x[0, 0] == Fraction(-1, 8) and x[1, 0] == Fraction(3, 8)


@given(matrices(field=QQ))
def test_rank_matches_sympy_over_q(m):
    expected = sympy.Matrix(m.rows, m.cols, [x for row in m.data for x in row]).rank() if m.rows and m.cols else 0
    assert rank(m) == expected


@given(matrices())
def test_rank_nullity(m):
    K = kernel_basis(m)
    assert rank(m) + K.cols == m.cols
    assert (m @ K).is_zero()
    assert rank(K) == K.cols


@given(matrices())
def test_rank_of_transpose(m):
    assert rank(m) == rank(m.transpose())


@given(matrices(), st.data())
def test_solve_finds_solutions(a, data):
    x0 = Matrix(a.field, a.cols, 2, [[data.draw(st.integers(-3, 3)) for _ in range(2)] for _ in range(a.cols)])
    b = a @ x0
    x = solve(a, b)
    assert x is not None and a @ x == b


def test_solve_inconsistent():
    a = Matrix(QQ, 2, 1, [[1], [1]])
    assert solve(a, Matrix(QQ, 2, 1, [[1], [2]])) is None


@given(st.sampled_from(FIELDS), st.data())
@settings(max_examples=50)
def test_matmul_associative(F, data):
    n, m, k, l = (data.draw(st.integers(0, 4)) for _ in range(4))
    ent = st.integers(-5, 5)
    A = Matrix(F, n, m, [[data.draw(ent) for _ in range(m)] for _ in range(n)])
    B = Matrix(F, m, k, [[data.draw(ent) for _ in range(k)] for _ in range(m)])
    C = Matrix(F, k, l, [[data.draw(ent) for _ in range(l)] for _ in range(k)])
    assert (A @ B) @ C == A @ (B @ C)
    assert (A @ B).transpose() == B.transpose() @ A.transpose()


@given(matrices())
def test_rref_pivots_are_unit_columns(m):
    rows, piv = rref(m)
    for i, c in enumerate(piv):
        assert [r[c] for r in rows] == [1 if j == i else 0 for j in range(len(rows))]


def test_block_matrix_and_stacks():
    F = Field(3)
    I = Matrix.identity(F, 2)
    M = block_matrix(F, [[I, None], [None, I.scale(2)]], [2, 2], [2, 2])
    assert M == I.hstack(Matrix.zeros(F, 2, 2)).vstack(Matrix.zeros(F, 2, 2).hstack(I.scale(2)))
    assert M.block(2, 4, 2, 4) == I.scale(2)


def test_mixed_fields_rejected():
    with pytest.raises(ValueError):
        Matrix.identity(QQ, 2) @ Matrix.identity(Field(3), 2)
