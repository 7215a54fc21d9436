import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import Q0, QUARTER, polynomials, small_fractions
from lamina.framed_rep import strubel_matrices
from lamina.linalg import (
    Matrix,
    SingularMatrix,
    charpoly,
    det,
    is_positive_definite,
    newton_polygon,
    poly_eval_matrix,
    signature,
    solve,
)

F = Q0
x = F.x


def mat(field, strategy, n):
    return st.lists(strategy, min_size=n * n, max_size=n * n).map(
        lambda es: Matrix(field, [es[i * n:(i + 1) * n] for i in range(n)]))


def rational_invertible(n):
    return mat(F, small_fractions(), n).filter(lambda M: not det(M).is_zero())


def monomial(e):
    return F.monomial(1, e)


# examples -------------------------------------------------------------------

def test_det_examples():
    assert det(Matrix(F, [[1, 2], [3, 4]])) == -2
    assert det(Matrix.diag(F, [x, x.invert()])) == 1


@pytest.mark.parametrize("alpha", ["0", "1/4", "sqrt(2)-1"])
def test_det_of_strubel_generator(alpha):
    from lamina.valued import FieldParams

    c1, c3 = strubel_matrices(FieldParams.from_alpha(alpha))
    assert det(c1.M) == 1
    assert det(c3.M) == 1


def test_signature_examples():
    assert signature(Matrix.diag(F, [1, -1])).as_tuple() == (1, 1, 0)
    assert signature(Matrix(F, [[0, 1], [1, 0]])).as_tuple() == (1, 1, 0)
    X, Xp = Matrix.zeros(F, 2), Matrix.diag(F, [x, x**3])
    assert signature(Xp - X).as_tuple() == (2, 0, 0)
    assert signature(Matrix.diag(F, [0, 1, -x])).as_tuple() == (1, 1, 1)


def test_positive_definite_examples():
    assert is_positive_definite(Matrix.identity(F, 3))
    assert not is_positive_definite(Matrix.diag(F, [x, -x]))


def test_charpoly_examples():
    assert charpoly(Matrix.diag(F, [2, 3])) == [6, -5, 1]
    companion = Matrix(F, [[0, -2], [1, 3]])
    assert charpoly(companion) == [2, -3, 1]


def test_charpoly_of_monomial_diagonal():
    es = [-1, -2, 1, 2]
    cp = charpoly(Matrix.diag(F, [monomial(e) for e in es]))
    # oracle: expand prod (t - x^e)
    expected = [F.one]
    for e in es:
        nxt = [F.zero] * (len(expected) + 1)
        for i, c in enumerate(expected):
            nxt[i + 1] = nxt[i + 1] + c
            nxt[i] = nxt[i] - c * monomial(e)
        expected = nxt
    assert cp == expected
    assert [c.valuation() for c in cp] == [F.exponent(v) for v in (0, -2, -3, -2, 0)]
    assert sorted(newton_polygon(cp).root_valuations()) == [F.exponent(e) for e in sorted(es)]


def test_newton_polygon_sign_convention():
    assert newton_polygon([-x, F.one]).root_valuations() == [F.exponent(1)]
    roots = newton_polygon([F.one, -(x + x.invert()), F.one]).root_valuations()
    assert sorted(roots) == [F.exponent(-1), F.exponent(1)]


def test_newton_polygon_zero_roots():
    # t^2 (t - x)
    np_ = newton_polygon([F.zero, F.zero, -x, F.one])
    assert np_.zero_roots == 2
    assert np_.degree == 3


def test_solve_examples():
    b = Matrix(F, [[3], [Fraction(1, 2)]])
    assert solve(Matrix.identity(F, 2), b) == b
    A = Matrix(F, [[1, x], [0, 1]])
    assert solve(A, Matrix(F, [[1], [0]])) == Matrix(F, [[1], [0]])
    with pytest.raises(SingularMatrix):
        solve(Matrix(F, [[1, 2], [2, 4]]), b)


@given(rational_invertible(3), mat(F, small_fractions(), 3))
def test_solve_residual(A, B):
    assert A @ solve(A, B) == B


# properties -----------------------------------------------------------------

@given(mat(QUARTER, polynomials(QUARTER, 2), 4), mat(QUARTER, polynomials(QUARTER, 2), 4))
def test_det_multiplicative(A, B):
    assert det(A @ B) == det(A) * det(B)


@given(mat(F, small_fractions(), 3).map(lambda M: M + M.T()), rational_invertible(3))
def test_sylvester_law(S, P):
    assert signature(P.T() @ S @ P) == signature(S)


@given(st.lists(st.integers(-3, 3), min_size=3, max_size=3), rational_invertible(3))
def test_newton_polygon_matches_conjugated_monomials(es, P):
    D = Matrix.diag(F, [monomial(e) for e in es])
    M = P @ D @ P.inverse()
    roots = newton_polygon(charpoly(M)).root_valuations()
    assert sorted(roots) == sorted(F.exponent(e) for e in es)


@given(mat(QUARTER, polynomials(QUARTER, 2), 3))
def test_cayley_hamilton(M):
    assert poly_eval_matrix(charpoly(M), M) == Matrix.zeros(QUARTER, 3)


@given(mat(F, small_fractions(), 3))
def test_adjugate_identity(M):
    assert M @ M.adjugate() == Matrix.identity(F, 3, det(M))


def test_random_positive_definite_signature():
    from lamina.symplectic import random_positive_definite

    rng = random.Random(5)
    for _ in range(10):
        S = random_positive_definite(QUARTER, 3, rng)
        assert is_positive_definite(S)
        assert signature(-S).as_tuple() == (0, 3, 0)
