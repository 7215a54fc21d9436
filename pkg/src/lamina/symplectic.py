"""Lagrangians in the standard symplectic space of dimension 2n.

The form is ``<(x1;y1),(x2;y2)> = x1^t y2 - y1^t x2``, i.e. ``J = [[0, I], [-I, 0]]``.
Every Lagrangian is carried by a frame ``B`` (a 2n x n matrix of rank n); the
chart ``X`` stands for the frame ``(X; I)`` and the point at infinity for
``(I; 0)``. All invariants are built from the pairing matrices
``omega(B_i, B_j) = B_i^t J B_j``, which are chart free and change by
``P^t (.) Q`` under a change of frames. For charts ``omega = X_i - X_j``.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Optional

from lamina.linalg import (
    Matrix,
    Signature,
    SingularMatrix,
    adjugate,
    det,
    exact_div,
    is_positive_definite,
    signature,
)
from lamina.valued import FieldParams, IndistinguishableFromZero, LaminaError, ValuedScalar


class NotTransverse(LaminaError, ValueError):
    pass


class NotSymplectic(LaminaError, ValueError):
    pass


def J_matrix(field: FieldParams, n: int) -> Matrix:
    I = Matrix.identity(field, n)
    Z = Matrix.zeros(field, n)
    return Matrix.block([[Z, I], [-I, Z]])


def split_frame(B: Matrix) -> tuple[Matrix, Matrix]:
    n = B.cols
    return B.submatrix(range(n), range(n)), B.submatrix(range(n, 2 * n), range(n))


def omega(B1: Matrix, B2: Matrix) -> Matrix:
    """Pairing matrix ``B1^t J B2 = X1^t Y2 - Y1^t X2``."""
    X1, Y1 = split_frame(B1)
    X2, Y2 = split_frame(B2)
    return X1.T() @ Y2 - Y1.T() @ X2


class Lagrangian:
    """A Lagrangian subspace, stored as chart, infinity, or general frame."""

    __slots__ = ("field", "n", "kind", "X", "_frame")
    __hash__ = None

    def __init__(self, field: FieldParams, n: int, kind: str, X: Optional[Matrix] = None,
                 frame: Optional[Matrix] = None):
        self.field = field
        self.n = n
        self.kind = kind
        self.X = X
        self._frame = frame

    @classmethod
    def chart(cls, X: Matrix, check: bool = True) -> "Lagrangian":
        if check and not X.is_symmetric():
            raise ValueError("chart matrix must be symmetric")
        return cls(X.field, X.rows, "chart", X=X)

    @classmethod
    def infinity(cls, field: FieldParams, n: int) -> "Lagrangian":
        return cls(field, n, "infinity")

    @classmethod
    def zero(cls, field: FieldParams, n: int) -> "Lagrangian":
        return cls.chart(Matrix.zeros(field, n), check=False)

    @classmethod
    def from_frame(cls, B: Matrix, check: bool = True, reduce: bool = True) -> "Lagrangian":
        """Wrap a frame; reduce it to a chart whenever that is exact."""
        n = B.cols
        if B.rows != 2 * n:
            raise ValueError("frame must be 2n x n")
        if check:
            w = omega(B, B)
            if any(w[i, j].terms for i in range(n) for j in range(n)):
                raise ValueError("frame is not isotropic")
        if reduce:
            Xb, Yb = split_frame(B)
            d = det(Yb)
            if not d.is_zero() and d.is_exact and len(d.terms) == 1:
                inv = d.invert()
                X = (Xb @ adjugate(Yb)) * inv
                return cls(B.field, n, "chart", X=_symmetrize(X))
            if d.is_zero() and _is_scalar_multiple_of_infinity(B):
                return cls.infinity(B.field, n)
        return cls(B.field, n, "frame", frame=B)

    @property
    def frame(self) -> Matrix:
        if self._frame is None:
            I = Matrix.identity(self.field, self.n)
            if self.kind == "chart":
                self._frame = self.X.vstack(I)
            else:
                self._frame = I.vstack(Matrix.zeros(self.field, self.n))
        return self._frame

    def chart_matrix(self, target_precision=None) -> Matrix:
        """The chart ``X`` (possibly a truncated series if the frame is not exact-reducible)."""
        if self.kind == "chart":
            return self.X
        if self.kind == "infinity":
            raise NotTransverse("the point at infinity has no chart")
        Xb, Yb = split_frame(self._frame)
        d = det(Yb)
        if d.is_zero():
            raise NotTransverse("Lagrangian is not transverse to infinity")
        return _symmetrize((Xb @ adjugate(Yb)) * d.invert(target_precision))

    def __eq__(self, other):
        if not isinstance(other, Lagrangian):
            return NotImplemented
        w = omega(self.frame, other.frame)
        return all(not w[i, j].terms for i in range(self.n) for j in range(self.n))

    def to_json(self) -> dict:
        if self.kind == "chart":
            return {"chart": self.X.to_json()}
        if self.kind == "infinity":
            return {"infinity": True}
        return {"frame": self._frame.to_json()}

    @classmethod
    def from_json(cls, obj: dict, field: FieldParams, n: Optional[int] = None) -> "Lagrangian":
        if obj.get("infinity"):
            if n is None:
                raise ValueError("dimension required for the point at infinity")
            return cls.infinity(field, n)
        if "chart" in obj:
            return cls.chart(Matrix.from_json(obj["chart"], field))
        if "frame" in obj:
            return cls.from_frame(Matrix.from_json(obj["frame"], field))
        raise ValueError(f"unrecognized Lagrangian {obj!r}")

    def __repr__(self):
        if self.kind == "chart":
            return f"Lagrangian.chart({self.X!r})"
        if self.kind == "infinity":
            return f"Lagrangian.infinity(n={self.n})"
        return f"Lagrangian.frame({self._frame!r})"


def _symmetrize(X: Matrix) -> Matrix:
    # exact reductions are already symmetric; truncated ones may differ beyond precision
    n = X.rows
    return Matrix(X.field, [[X[i, j] if i <= j else X[j, i] for j in range(n)] for i in range(n)])


def _is_scalar_multiple_of_infinity(B: Matrix) -> bool:
    _, Yb = split_frame(B)
    return all(Yb[i, j].is_zero() for i in range(Yb.rows) for j in range(Yb.cols))


# --------------------------------------------------------------------------
# symplectic group


class SpElement:
    """A 2n x 2n symplectic matrix ``[[A, B], [C, D]]``."""

    __slots__ = ("M", "n", "field")
    __hash__ = None

    def __init__(self, M: Matrix, check: bool = True):
        if M.rows != M.cols or M.rows % 2:
            raise ValueError("symplectic matrix must be 2n x 2n")
        self.M = M
        self.n = M.rows // 2
        self.field = M.field
        if check and not self.is_symplectic():
            raise NotSymplectic("M^t J M != J")

    @classmethod
    def identity(cls, field: FieldParams, n: int) -> "SpElement":
        return cls(Matrix.identity(field, 2 * n), check=False)

    @classmethod
    def from_blocks(cls, A, B, C, D, check: bool = True) -> "SpElement":
        return cls(Matrix.block([[A, B], [C, D]]), check=check)

    @classmethod
    def translation(cls, S: Matrix) -> "SpElement":
        n = S.rows
        I, Z = Matrix.identity(S.field, n), Matrix.zeros(S.field, n)
        return cls.from_blocks(I, S, Z, I, check=False)

    @classmethod
    def lower(cls, S: Matrix) -> "SpElement":
        n = S.rows
        I, Z = Matrix.identity(S.field, n), Matrix.zeros(S.field, n)
        return cls.from_blocks(I, Z, S, I, check=False)

    @classmethod
    def levi(cls, A: Matrix) -> "SpElement":
        """``diag(A, A^{-t})``."""
        Z = Matrix.zeros(A.field, A.rows)
        return cls.from_blocks(A, Z, Z, A.inverse().T(), check=False)

    @classmethod
    def inversion(cls, field: FieldParams, n: int) -> "SpElement":
        """``J`` itself; exchanges the zero chart and infinity."""
        return cls(J_matrix(field, n), check=False)

    def blocks(self):
        n = self.n
        r, s = range(n), range(n, 2 * n)
        M = self.M
        return M.submatrix(r, r), M.submatrix(r, s), M.submatrix(s, r), M.submatrix(s, s)

    def is_symplectic(self) -> bool:
        Jm = J_matrix(self.field, self.n)
        return self.M.T() @ Jm @ self.M == Jm

    def inverse(self) -> "SpElement":
        """``M^{-1} = -J M^t J``, exact."""
        Jm = J_matrix(self.field, self.n)
        return SpElement(-(Jm @ self.M.T() @ Jm), check=False)

    def __matmul__(self, other):
        if isinstance(other, SpElement):
            return SpElement(self.M @ other.M, check=False)
        return apply(self, other)

    def __mul__(self, other):
        return self.__matmul__(other)

    def __pow__(self, k: int) -> "SpElement":
        if k < 0:
            return self.inverse() ** (-k)
        out = SpElement.identity(self.field, self.n)
        base = self
        while k:
            if k & 1:
                out = out @ base
            k >>= 1
            if k:
                base = base @ base
        return out

    def __eq__(self, other):
        if not isinstance(other, SpElement):
            return NotImplemented
        return self.M == other.M

    def trace(self):
        return self.M.trace()

    def to_json(self) -> list:
        return self.M.to_json()

    def __repr__(self):
        return f"SpElement({self.M!r})"


def apply(g: SpElement, target):
    """Image of a Lagrangian (frame product) or a chart matrix (fractional linear map)."""
    if isinstance(target, Lagrangian):
        if target.kind == "chart":
            A, B, C, D = g.blocks()
            X = target.X
            top, bot = A @ X + B, C @ X + D
            return Lagrangian.from_frame(top.vstack(bot), check=False)
        return Lagrangian.from_frame(g.M @ target.frame, check=False)
    if isinstance(target, Matrix):
        A, B, C, D = g.blocks()
        num, den = A @ target + B, C @ target + D
        d = det(den)
        if d.is_zero():
            raise SingularMatrix("C Z + D is singular")
        return (num @ adjugate(den)) * d.invert()
    raise TypeError(f"cannot apply a symplectic matrix to {type(target).__name__}")


# --------------------------------------------------------------------------
# transversality, Maslov index, maximality


def _omega(l1: Lagrangian, l2: Lagrangian) -> Matrix:
    if l1.kind == "chart" and l2.kind == "chart":
        return l1.X - l2.X
    if l1.kind == "infinity" and l2.kind == "chart":
        return Matrix.identity(l1.field, l1.n)
    if l1.kind == "chart" and l2.kind == "infinity":
        return -Matrix.identity(l1.field, l1.n)
    return omega(l1.frame, l2.frame)


def pairing(l1: Lagrangian, l2: Lagrangian) -> Matrix:
    """The pairing matrix ``omega`` between the canonical frames of two Lagrangians."""
    return _omega(l1, l2)


def transverse(l1: Lagrangian, l2: Lagrangian) -> bool:
    d = det(_omega(l1, l2))
    if d.is_zero():
        return False
    if not d.terms:
        raise IndistinguishableFromZero("transversality undecidable at current precision")
    return True


def _require_transverse(*pairs):
    for a, b in pairs:
        if not transverse(a, b):
            raise NotTransverse("Lagrangians are not transverse")


def maslov_form(l1: Lagrangian, l2: Lagrangian, l3: Lagrangian) -> tuple[Matrix, int]:
    """Fraction-free representative ``(S, s)`` of the Maslov form on the frame of ``l1``.

    The form itself is ``s * S / |det omega_32|``; its signature is that of ``s * S``.
    It is normalized so that for charts ``(X, X', infinity)`` it equals ``X' - X``.
    """
    w32 = _omega(l3, l2)
    d32 = det(w32)
    if d32.is_zero():
        raise NotTransverse("second and third Lagrangians are not transverse")
    S = -(_omega(l1, l2) @ adjugate(w32) @ _omega(l3, l1))
    return S, d32.sign()


def maslov_matrix(l1: Lagrangian, l2: Lagrangian, l3: Lagrangian) -> Matrix:
    """The Maslov form as a matrix in the frame of ``l1`` (uses one scalar inverse)."""
    S, _ = maslov_form(l1, l2, l3)
    return S * det(_omega(l3, l2)).invert()


def maslov(l1: Lagrangian, l2: Lagrangian, l3: Lagrangian) -> Signature:
    """Signature of the Maslov form of a pairwise transverse triple."""
    _require_transverse((l1, l2), (l2, l3), (l1, l3))
    S, s = maslov_form(l1, l2, l3)
    S = _symmetrize(S)
    sig = signature(S)
    return sig if s > 0 else sig.flipped()


def maslov_literal(l1: Lagrangian, l2: Lagrangian, l3: Lagrangian) -> Matrix:
    """Gram matrix of ``v -> <v, v'>`` with ``v' in l3`` and ``v + v' in l2``, by direct solve.

    This is the unnormalized form; :func:`maslov_form` is its negative.
    """
    from lamina.linalg import solve

    B1, B2, B3 = l1.frame, l2.frame, l3.frame
    n = l1.n
    A = B2.hstack(-B3)
    coeffs = solve(A, B1)  # B1 = B2 a - B3 b, so v' = B3 b
    b = coeffs.submatrix(range(n, 2 * n), range(n))
    vprime = B3 @ b
    Jm = J_matrix(l1.field, n)
    G = B1.T() @ Jm @ vprime
    return _symmetrize(G)


def maslov_index(l1, l2, l3) -> int:
    return maslov(l1, l2, l3).index


def is_maximal(l1: Lagrangian, l2: Lagrangian, l3: Lagrangian) -> bool:
    return maslov_index(l1, l2, l3) == l1.n


def is_minimal(l1: Lagrangian, l2: Lagrangian, l3: Lagrangian) -> bool:
    return maslov_index(l1, l2, l3) == -l1.n


def interval_member(l: Lagrangian, m: Lagrangian, lp: Lagrangian) -> bool:
    """Whether ``m`` lies in the interval from ``l`` to ``lp``: ``(l, m, lp)`` maximal."""
    return is_maximal(l, m, lp)


def operator_less(X: Matrix, Y: Matrix) -> bool:
    """``X << Y``: ``Y - X`` positive definite."""
    return is_positive_definite(Y - X)


def operator_interval_member(X: Matrix, Y: Matrix, Xp: Matrix) -> bool:
    return operator_less(X, Y) and operator_less(Y, Xp)


def is_maximal_tuple(ls) -> bool:
    """Every cyclically consecutive triple is maximal."""
    k = len(ls)
    return all(is_maximal(ls[i], ls[(i + 1) % k], ls[(i + 2) % k]) for i in range(k))


# --------------------------------------------------------------------------
# the crossratio


def crossratio_matrix(l1, l2, l3, l4, target_precision=None) -> Matrix:
    """``R`` as an endomorphism of ``l1`` in its frame: ``w21^{-1} w24 w34^{-1} w31``.

    In charts this is ``(X1-X2)^{-1}(X2-X4)(X3-X4)^{-1}(X1-X3)``.
    """
    w21, w34 = _omega(l2, l1), _omega(l3, l4)
    d21, d34 = det(w21), det(w34)
    if d21.is_zero() or d34.is_zero():
        raise NotTransverse("crossratio needs l1, l2 and l3, l4 transverse")
    N = adjugate(w21) @ _omega(l2, l4) @ adjugate(w34) @ _omega(l3, l1)
    return N * (d21 * d34).invert(target_precision)


def det_crossratio_parts(l1, l2, l3, l4) -> tuple[ValuedScalar, ValuedScalar]:
    """``(num, den)`` with ``det R = num / den``; neither factor needs an inverse."""
    d21, d34 = det(_omega(l2, l1)), det(_omega(l3, l4))
    if d21.is_zero() or d34.is_zero():
        raise NotTransverse("crossratio needs l1, l2 and l3, l4 transverse")
    return det(_omega(l2, l4)) * det(_omega(l3, l1)), d21 * d34


def det_crossratio(l1, l2, l3, l4, target_precision=None) -> ValuedScalar:
    num, den = det_crossratio_parts(l1, l2, l3, l4)
    if num.is_exact and den.is_exact and target_precision is None:
        return exact_div(num, den)
    return num * den.invert(target_precision)


def det_crossratio_valuation(l1, l2, l3, l4):
    """Exact ``v(det R)`` from the valuations of the four pairing determinants."""
    num, den = det_crossratio_parts(l1, l2, l3, l4)
    return num.valuation() - den.valuation()


def det_crossratio_exceeds_one(l1, l2, l3, l4) -> bool:
    """``det R > 1`` decided exactly as ``(num - den) * den > 0``."""
    num, den = det_crossratio_parts(l1, l2, l3, l4)
    return (num - den).sign() * den.sign() > 0


def crossratio_unipotent_gap(l1, l2, l3, l4) -> tuple[int, int]:
    """Signs of ``tr R - n`` and (for n = 2) ``det(R - Id)``, computed fraction-free."""
    w21, w34 = _omega(l2, l1), _omega(l3, l4)
    d21, d34 = det(w21), det(w34)
    den = d21 * d34
    N = adjugate(w21) @ _omega(l2, l4) @ adjugate(w34) @ _omega(l3, l1)
    n = l1.n
    s_den = den.sign()
    tr_sign = (N.trace() - den * n).sign() * s_den
    if n == 1:
        return tr_sign, tr_sign
    if n != 2:
        return tr_sign, 0
    # det(N/den - Id) * den^2 = det N - tr N * den + den^2
    dm = det(N) - N.trace() * den + den * den
    return tr_sign, dm.sign()


# --------------------------------------------------------------------------
# normalization of transverse pairs


def symplectic_basis(l1: Lagrangian, l3: Lagrangian, target_precision=None) -> SpElement:
    """``M`` in Sp with ``M(infinity) = l3`` and ``M(zero chart) = l1``.

    Columns are the frame ``B3`` of ``l3`` followed by ``B1 w(B3, B1)^{-1}``.
    """
    B1, B3 = l1.frame, l3.frame
    w31 = omega(B3, B1)
    d = det(w31)
    if d.is_zero():
        raise NotTransverse("symplectic_basis needs transverse Lagrangians")
    N = adjugate(w31) * d.invert(target_precision)
    return SpElement(B3.hstack(B1 @ N), check=False)


# --------------------------------------------------------------------------
# random data for tests and sampling


def random_rational(rng: random.Random, lo: int = -5, hi: int = 5, den: int = 4) -> Fraction:
    return Fraction(rng.randint(lo * den, hi * den), rng.randint(1, den))


def random_symmetric(field: FieldParams, n: int, rng: random.Random, entry=None) -> Matrix:
    entry = entry or (lambda: random_rational(rng))
    rows = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            rows[i][j] = rows[j][i] = entry()
    return Matrix(field, rows)


def random_positive_definite(field: FieldParams, n: int, rng: random.Random,
                             scale_exponents=(0,)) -> Matrix:
    """``P^t diag(c_i X^{e_i}) P`` with unimodular-ish rational P and positive c_i."""
    while True:
        P = Matrix(field, [[random_rational(rng, -2, 2, 2) for _ in range(n)] for _ in range(n)])
        d = det(P)
        if not d.is_zero():
            break
    D = Matrix.diag(field, [field.monomial(Fraction(rng.randint(1, 8), rng.randint(1, 3)),
                                           rng.choice(scale_exponents)) for _ in range(n)])
    return P.T() @ D @ P


def random_sp(field: FieldParams, n: int, rng: random.Random, steps: int = 3) -> SpElement:
    """Product of random rational translations, lower translations and Levi factors."""
    g = SpElement.identity(field, n)
    for _ in range(steps):
        S = random_symmetric(field, n, rng, lambda: random_rational(rng, -2, 2, 2))
        T = random_symmetric(field, n, rng, lambda: random_rational(rng, -2, 2, 2))
        while True:
            A = Matrix(field, [[rng.randint(-2, 2) for _ in range(n)] for _ in range(n)])
            if not det(A).is_zero():
                break
        g = g @ SpElement.translation(S) @ SpElement.lower(T) @ SpElement.levi(A)
    return g
