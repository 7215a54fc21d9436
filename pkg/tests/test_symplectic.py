import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import Q0, QUARTER
from lamina.linalg import Matrix, det, signature
from lamina.symplectic import (
    Lagrangian,
    NotTransverse,
    SpElement,
    apply,
    crossratio_matrix,
    crossratio_unipotent_gap,
    det_crossratio,
    det_crossratio_exceeds_one,
    det_crossratio_valuation,
    interval_member,
    is_maximal,
    is_maximal_tuple,
    is_minimal,
    maslov,
    maslov_index,
    maslov_literal,
    operator_interval_member,
    operator_less,
    random_positive_definite,
    random_sp,
    random_symmetric,
    symplectic_basis,
    transverse,
)

F = Q0
x = F.x
seeds = st.integers(0, 10**6)
fields = st.sampled_from([Q0, QUARTER])


def c1(v, f=F):
    return Lagrangian.chart(Matrix(f, [[v]]))


def increasing_charts(f, n, k, rng, exps=(0, 1, -1)):
    """``X_1 << X_2 << ... << X_k`` by positive definite increments."""
    X = random_symmetric(f, n, rng)
    out = [Lagrangian.chart(X)]
    for _ in range(k - 1):
        X = X + random_positive_definite(f, n, rng, exps)
        out.append(Lagrangian.chart(X))
    return out


def generic_lagrangians(f, n, k, rng):
    """``k`` Lagrangians in general position (charts moved by a random Sp element)."""
    g = random_sp(f, n, rng)
    return [apply(g, Lagrangian.chart(random_symmetric(f, n, rng))) for _ in range(k)]


# examples -------------------------------------------------------------------

def test_transverse_examples():
    l0, li = Lagrangian.zero(F, 2), Lagrangian.infinity(F, 2)
    assert transverse(l0, li)
    assert not transverse(l0, l0)
    assert transverse(l0, Lagrangian.chart(Matrix.diag(F, [x, x])))


def test_maslov_of_charts_and_infinity_is_signature_of_difference():
    rng = random.Random(1)
    li = Lagrangian.infinity(F, 3)
    for _ in range(20):
        X, Xp = random_symmetric(F, 3, rng), random_symmetric(F, 3, rng)
        if det(Xp - X).is_zero():
            continue
        assert maslov(Lagrangian.chart(X), Lagrangian.chart(Xp), li) == signature(Xp - X)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_standard_triple_is_maximal_and_swap_is_minimal(n):
    l0, li = Lagrangian.zero(F, n), Lagrangian.infinity(F, n)
    I = Lagrangian.chart(Matrix.identity(F, n))
    assert maslov(l0, I, li).as_tuple() == (n, 0, 0)
    assert is_maximal(l0, I, li)
    assert maslov_index(I, l0, li) == -n
    assert is_minimal(I, l0, li)


def test_literal_form_is_the_negative_of_the_normalized_form():
    rng = random.Random(2)
    for _ in range(10):
        a, b, c = generic_lagrangians(F, 2, 3, rng)
        if not (transverse(a, b) and transverse(b, c) and transverse(a, c)):
            continue
        assert signature(maslov_literal(a, b, c)) == maslov(a, b, c).flipped()


def test_interval_examples():
    assert is_maximal(c1(0), c1(1), c1(2))
    l0, D2 = Lagrangian.zero(F, 2), Lagrangian.chart(Matrix.diag(F, [2, 2]))
    Y = Lagrangian.chart(Matrix.diag(F, [1, 3]))
    assert not interval_member(l0, Y, D2)
    assert not operator_interval_member(l0.X, Y.X, D2.X)


def test_consecutive_triples_of_increasing_charts_are_maximal():
    rng = random.Random(3)
    for _ in range(100):
        ls = increasing_charts(F, 2, 4, rng)
        assert all(is_maximal(*ls[i:i + 3]) for i in range(2))
        assert is_maximal_tuple(ls)


def test_crossratio_matrix_classical_value():
    X = [0, 1, 2, 3]
    expected = Fraction((X[0] - X[2]) * (X[1] - X[3]), (X[0] - X[1]) * (X[2] - X[3]))
    R = crossratio_matrix(*(c1(v) for v in X))
    assert R == Matrix(F, [[expected]])
    assert expected == 4


def test_crossratio_with_repeated_middle_point_is_identity():
    rng = random.Random(4)
    for _ in range(10):
        a, b, d = increasing_charts(F, 2, 3, rng)
        assert crossratio_matrix(a, b, b, d) == Matrix.identity(F, 2)


def test_crossratio_matrix_is_conjugated_by_the_action():
    rng = random.Random(5)
    for _ in range(10):
        ls = increasing_charts(F, 2, 4, rng)
        g = random_sp(F, 2, rng)
        R = crossratio_matrix(*ls)
        Rg = crossratio_matrix(*(apply(g, l) for l in ls))
        assert det(R) == det(Rg)
        assert R.trace() == Rg.trace()


def test_det_crossratio_example():
    ls = [c1(0), c1(x), c1(1), c1(x.invert())]
    # oracle: the chart formula det(X2-X4) det(X1-X3) / (det(X1-X2) det(X3-X4))
    X1, X2, X3, X4 = F.zero, x, F.one, x.invert()
    oracle = ((X2 - X4) * (X1 - X3)) / ((X1 - X2) * (X3 - X4))
    assert det_crossratio(*ls) == oracle
    assert det_crossratio(*ls) == (x + 1) / x
    assert -det_crossratio_valuation(*ls) == 1


def test_crossratio_requires_transversality():
    with pytest.raises(NotTransverse):
        det_crossratio(c1(0), c1(0), c1(1), c1(2))


def test_symplectic_basis_examples():
    l0, li = Lagrangian.zero(F, 2), Lagrangian.infinity(F, 2)
    assert symplectic_basis(l0, li) == SpElement.identity(F, 2)
    rng = random.Random(6)
    for _ in range(10):
        a, b = generic_lagrangians(F, 2, 2, rng)
        if not transverse(a, b):
            continue
        M = symplectic_basis(a, b)
        assert M.is_symplectic()
        assert apply(M, li) == b and apply(M, l0) == a
        back = apply(M.inverse(), a)
        assert back.kind == "chart" and back.X == Matrix.zeros(F, 2)


def test_apply_examples():
    l0, li = Lagrangian.zero(F, 2), Lagrangian.infinity(F, 2)
    assert apply(SpElement.inversion(F, 2), l0) == li
    S = Matrix(F, [[1, 2], [2, 5]])
    X = Matrix(F, [[0, x], [x, 1]])
    moved = apply(SpElement.translation(S), Lagrangian.chart(X))
    assert moved.kind == "chart" and moved.X == X + S


def test_frame_reduces_to_chart_when_exact():
    X = Matrix(F, [[1, 2], [2, 3]])
    B = X.vstack(Matrix.identity(F, 2)) @ Matrix(F, [[2, 1], [0, 1]])
    l = Lagrangian.from_frame(B)
    assert l.kind == "chart" and l.X == X


def test_lagrangian_json_round_trip():
    rng = random.Random(7)
    for l in generic_lagrangians(QUARTER, 2, 3, rng) + [Lagrangian.infinity(QUARTER, 2)]:
        assert Lagrangian.from_json(l.to_json(), QUARTER, 2) == l


# properties -----------------------------------------------------------------

@given(fields, seeds)
def test_apply_round_trip(f, seed):
    rng = random.Random(seed)
    g = random_sp(f, 2, rng)
    l = Lagrangian.chart(random_symmetric(f, 2, rng))
    assert apply(g.inverse(), apply(g, l)) == l
    assert g.is_symplectic()


@given(fields, seeds)
def test_maslov_alternating_and_bounded(f, seed):
    rng = random.Random(seed)
    a, b, c = generic_lagrangians(f, 2, 3, rng)
    if not (transverse(a, b) and transverse(b, c) and transverse(a, c)):
        return
    t = maslov_index(a, b, c)
    assert abs(t) <= 2
    assert maslov_index(b, a, c) == -t
    assert maslov_index(a, c, b) == -t
    assert maslov_index(b, c, a) == t


@given(seeds)
def test_interval_member_matches_operator_inequalities(seed):
    rng = random.Random(seed)
    X, Xp = (l.X for l in increasing_charts(F, 2, 2, rng))
    Y = random_symmetric(F, 2, rng)
    if det(Y - X).is_zero() or det(Xp - Y).is_zero():
        return
    ops = operator_interval_member(X, Y, Xp)
    assert interval_member(Lagrangian.chart(X), Lagrangian.chart(Y), Lagrangian.chart(Xp)) == ops
    assert operator_less(X, Xp)


@given(fields, seeds)
def test_det_crossratio_invariance_flip_and_chart_independence(f, seed):
    rng = random.Random(seed)
    ls = increasing_charts(f, 2, 4, rng)
    d = det_crossratio(*ls)
    g = random_sp(f, 2, rng) @ SpElement.inversion(f, 2)
    moved = [apply(g, l) for l in ls]
    assert det_crossratio(*moved) == d
    assert det_crossratio(ls[2], ls[3], ls[0], ls[1]) == d


@given(fields, seeds)
def test_cocycle_and_maximal_exceeds_one(f, seed):
    rng = random.Random(seed)
    l1, l2, l3, l4, l5 = increasing_charts(f, 2, 5, rng)
    assert det_crossratio(l1, l2, l4, l5) == det_crossratio(l1, l2, l3, l5) * det_crossratio(l1, l3, l4, l5)
    assert det_crossratio_exceeds_one(l1, l2, l3, l4)
    tr_sign, det_sign = crossratio_unipotent_gap(l1, l2, l3, l4)
    assert tr_sign == 1
