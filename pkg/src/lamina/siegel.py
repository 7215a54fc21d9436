"""Siegel points over the Hahn field, the pseudo-distance d1, tubes and barycenters.

A Siegel point is ``Z = X + iY`` with ``X, Y`` symmetric and ``Y`` positive
definite. Distances are exponents: ``d1(Z1, Z2) = sum |v(r_j)|`` over the
generalized eigenvalues ``r_j`` of the pair after normalizing ``Z1`` to
``i Id``. Three routes compute it without matrix square roots:

* ``kernel``: the invariant ``|det(Z1 - conj Z2)|^2 / (det Y1 det Y2)``; its
  valuation is ``-d1`` for every pair, so this is the general exact route.
* ``equal_real_part``: the Newton polygon of the pencil ``det(Y2 - t Y1)``.
* ``scalar_diagonal``: ``n`` times the upper half plane formula.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from lamina.linalg import (
    Matrix,
    det,
    is_positive_definite,
    newton_polygon,
    signature,
    solve,
)
from lamina.symplectic import (
    Lagrangian,
    NotTransverse,
    SpElement,
    apply,
    crossratio_matrix,
    det_crossratio_parts,
    is_maximal_tuple,
    symplectic_basis,
)
from lamina.valued import ComplexScalar, Exponent, FieldParams, LaminaError, ValuedScalar


class NotSiegel(LaminaError, ValueError):
    pass


class ModePreconditionError(LaminaError, ValueError):
    pass


class NotInTubeInterval(LaminaError, ValueError):
    pass


class PathMismatch(LaminaError, ArithmeticError):
    pass


MODES = ("auto", "kernel", "equal_real_part", "scalar_diagonal", "hybrid_general")


# --------------------------------------------------------------------------
# points


class SiegelPoint:
    """``Z = X + iY`` with symmetric ``X``, ``Y`` and ``Y`` positive definite."""

    __slots__ = ("X", "Y")
    __hash__ = None

    def __init__(self, X: Matrix, Y: Matrix, check: bool = True):
        if X.shape != Y.shape or not X.is_square:
            raise NotSiegel("X and Y must be square of the same size")
        if check:
            if not (X.is_symmetric() and Y.is_symmetric()):
                raise NotSiegel("X and Y must be symmetric")
            if not is_positive_definite(Y):
                raise NotSiegel("imaginary part is not positive definite")
        self.X = X
        self.Y = Y

    @property
    def field(self) -> FieldParams:
        return self.X.field

    @property
    def n(self) -> int:
        return self.X.rows

    @classmethod
    def from_complex(cls, Z: Matrix, check: bool = True) -> "SiegelPoint":
        return cls(Z.real_part(), Z.imag_part(), check)

    @classmethod
    def scalar(cls, field: FieldParams, n: int, x, y) -> "SiegelPoint":
        """``(x + iy) Id``."""
        return cls(Matrix.identity(field, n, x), Matrix.identity(field, n, y))

    @classmethod
    def i_id(cls, field: FieldParams, n: int) -> "SiegelPoint":
        return cls.scalar(field, n, 0, 1)

    @property
    def Z(self) -> Matrix:
        return Matrix.complex_from(self.X, self.Y)

    def is_scalar(self) -> bool:
        return _scalar_value(self.X) is not None and _scalar_value(self.Y) is not None

    def __eq__(self, other):
        if not isinstance(other, SiegelPoint):
            return NotImplemented
        return self.X == other.X and self.Y == other.Y

    def to_json(self) -> dict:
        return {"X": self.X.to_json(), "Y": self.Y.to_json()}

    @classmethod
    def from_json(cls, obj: dict, field: FieldParams) -> "SiegelPoint":
        return cls(Matrix.from_json(obj["X"], field), Matrix.from_json(obj["Y"], field))

    def __repr__(self):
        return f"SiegelPoint(X={self.X!r}, Y={self.Y!r})"


def _scalar_value(M: Matrix):
    n = M.rows
    d = M[0, 0]
    for i in range(n):
        for j in range(n):
            e = M[i, j]
            if i == j:
                if not e == d:
                    return None
            elif not e.is_zero():
                return None
    return d


def _symmetrize(M: Matrix) -> Matrix:
    n = M.rows
    return Matrix(M.field, [[M[i, j] if i <= j else M[j, i] for j in range(n)] for i in range(n)],
                  M.is_complex)


def act(g: SpElement, z: SiegelPoint) -> SiegelPoint:
    """``g_* Z = (A Z + B)(C Z + D)^{-1}``, computed by exact division where possible."""
    A, B, C, D = g.blocks()
    Z = z.Z
    num = A @ Z + B
    den = C @ Z + D
    W = solve(den.T(), num.T()).T()
    W = _symmetrize(W)
    return SiegelPoint(W.real_part(), W.imag_part(), check=False)


# --------------------------------------------------------------------------
# distances


def _v(s: ValuedScalar):
    return s.valuation()


def s1_distance(z1: SiegelPoint, z2: SiegelPoint) -> Exponent:
    """``max(-v((x1-x2)^2/(y1 y2)), -v(y1/y2), -v(y2/y1))`` for ``n = 1``.

    The first term is dropped when ``x1 = x2``.
    """
    if z1.n != 1 or z2.n != 1:
        raise ModePreconditionError("s1_distance needs n = 1")
    x1, y1 = z1.X[0, 0], z1.Y[0, 0]
    x2, y2 = z2.X[0, 0], z2.Y[0, 0]
    vy1, vy2 = _v(y1), _v(y2)
    terms = [vy2 - vy1, vy1 - vy2]
    dx = x1 - x2
    if not dx.is_zero():
        terms.append(vy1 + vy2 - 2 * _v(dx))
    return max(terms)


def kernel_distance(Z1: SiegelPoint, Z2: SiegelPoint) -> Exponent:
    """``-v(|det(Z1 - conj Z2)|^2) + v(det Y1) + v(det Y2)``.

    The quantity is Sp-invariant and equals ``prod (1 + d_i)^2 / d_i`` on the
    normal form ``(i Id, i diag(d))``, so its negated valuation is
    ``sum |v(d_i)|``.
    """
    _same_size(Z1, Z2)
    W = Z1.Z - Z2.Z.conj()
    dW = det(W)
    if not isinstance(dW, ComplexScalar):
        dW = ComplexScalar(dW)
    return _v(det(Z1.Y)) + _v(det(Z2.Y)) - 2 * dW.abs_valuation()


def pencil_distance(Y1: Matrix, Y2: Matrix) -> Exponent:
    """``sum |v(r)|`` over the roots of ``det(Y2 - t Y1)`` via the Newton polygon."""
    coeffs = pencil_coefficients(Y1, Y2)
    poly = newton_polygon(coeffs)
    if poly.zero_roots:
        raise NotSiegel("the pencil has a zero root; Y2 is singular")
    total = None
    for r in poly.root_valuations():
        total = abs(r) if total is None else total + abs(r)
    return total if total is not None else Y1.field.wrap(Y1.field.raw_zero)


def pencil_coefficients(Y1: Matrix, Y2: Matrix) -> list:
    """Ascending coefficients of ``det(Y2 - t Y1)``, by exact interpolation at ``t = 0..n``."""
    f = Y1.field
    n = Y1.rows
    values = [det(Y2 - Y1 * k) for k in range(n + 1)]
    # Newton divided differences on the nodes 0..n, then expand
    table = list(values)
    newton = [table[0]]
    for level in range(1, n + 1):
        table = [(table[i + 1] - table[i]) * Fraction(1, level) for i in range(len(table) - 1)]
        newton.append(table[0])
    coeffs = [f.zero] * (n + 1)
    basis = [f.one]  # coefficients of prod_{k < level} (t - k)
    for level, c in enumerate(newton):
        for i, b in enumerate(basis):
            coeffs[i] = coeffs[i] + c * b
        nxt = [f.zero] * (len(basis) + 1)
        for i, b in enumerate(basis):
            nxt[i + 1] = nxt[i + 1] + b
            nxt[i] = nxt[i] - b * level
        basis = nxt
    return coeffs


def _same_size(Z1, Z2):
    if Z1.n != Z2.n:
        raise ModePreconditionError("points of different sizes")


def d1_distance(Z1: SiegelPoint, Z2: SiegelPoint, mode: str = "auto") -> Exponent:
    """The pseudo-distance ``d1`` as an exact exponent.

    ``hybrid_general`` is accepted for general pairs and routed through the
    exact kernel, which needs no square roots.
    """
    _same_size(Z1, Z2)
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "auto":
        if Z1.is_scalar() and Z2.is_scalar():
            mode = "scalar_diagonal"
        elif Z1.X == Z2.X:
            mode = "equal_real_part"
        else:
            mode = "kernel"
    if mode in ("kernel", "hybrid_general"):
        return kernel_distance(Z1, Z2)
    if mode == "equal_real_part":
        if not Z1.X == Z2.X:
            raise ModePreconditionError("equal_real_part needs X1 = X2")
        return pencil_distance(Z1.Y, Z2.Y)
    if not (Z1.is_scalar() and Z2.is_scalar()):
        raise ModePreconditionError("scalar_diagonal needs scalar multiples of Id")
    f = Z1.field
    one = lambda z: SiegelPoint(Matrix(f, [[z.X[0, 0]]]), Matrix(f, [[z.Y[0, 0]]]), check=False)
    return s1_distance(one(Z1), one(Z2)) * Z1.n


# --------------------------------------------------------------------------
# tubes and projections


@dataclass
class Tube:
    """The tube of the transverse pair ``(l, lp)``; ``normalizer`` maps it to ``(l0, l_inf)``."""

    l: Lagrangian
    lp: Lagrangian
    frame_map: SpElement
    normalizer: SpElement

    @classmethod
    def of(cls, l: Lagrangian, lp: Lagrangian, target_precision=None) -> "Tube":
        M = symplectic_basis(l, lp, target_precision)
        return cls(l, lp, M, M.inverse())

    def normalized(self, p: Lagrangian) -> Matrix:
        """Chart of the normalized image of ``p`` (transverse to both ends)."""
        q = apply(self.normalizer, p)
        if q.kind == "infinity":
            raise NotInTubeInterval("point coincides with an end of the tube")
        return q.chart_matrix()


def _interval_side(Y: Matrix) -> int:
    s = signature(Y)
    n = Y.rows
    if s.positives == n:
        return 1
    if s.negatives == n:
        return -1
    return 0


def tube_projection(t: Tube, p: Lagrangian) -> SiegelPoint:
    """Orthogonal projection of ``p`` in one of the two intervals onto the tube.

    After normalization ``p`` is the chart ``Y`` with ``Y`` definite; its
    projection is ``i |Y|``, mapped back by the inverse normalizer.
    """
    Y = t.normalized(p)
    side = _interval_side(Y)
    if side == 0:
        raise NotInTubeInterval("point lies in neither interval between the tube ends")
    f = Y.field
    base = SiegelPoint(Matrix.zeros(f, Y.rows), Y if side > 0 else -Y, check=False)
    return act(t.frame_map, base)


def standard_projection(Y: Matrix) -> SiegelPoint:
    """Projection onto the tube of ``(l0, l_inf)``: ``i Y`` or ``-i Y``."""
    side = _interval_side(Y)
    if side == 0:
        raise NotInTubeInterval("Y is not definite")
    return SiegelPoint(Matrix.zeros(Y.field, Y.rows), Y if side > 0 else -Y)


def barycenter(l1: Lagrangian, l2: Lagrangian, l3: Lagrangian) -> SiegelPoint:
    """Projection of ``l2`` onto the tube of ``(l1, l3)``."""
    return tube_projection(Tube.of(l1, l3), l2)


def barycenter_permutations(l1, l2, l3) -> list:
    return [barycenter(*p) for p in itertools.permutations((l1, l2, l3))]


@dataclass(frozen=True)
class ProjectedDistance:
    crossratio: Exponent
    projection: Exponent

    @property
    def agree(self) -> bool:
        return self.crossratio == self.projection


def projected_distance(l: Lagrangian, lp: Lagrangian, l1: Lagrangian, l2: Lagrangian,
                       strict: bool = True) -> ProjectedDistance:
    """Distance between the projections of ``l1, l2`` onto the tube of ``(l, lp)``.

    One path is ``-v(det R(l, l1, l2, lp))``; the other normalizes the tube
    and runs the pencil on the two projected imaginary parts.
    """
    if _degenerate_pair(l, lp, l1, l2):
        return ProjectedDistance(Fraction(0), Fraction(0))
    try:
        maximal = is_maximal_tuple([l, l1, l2, lp])
    except NotTransverse:
        maximal = False
    if not maximal:
        raise NotInTubeInterval("(l, l1, l2, l') must be maximal")
    num, den = det_crossratio_parts(l, l1, l2, lp)
    via_cr = den.valuation() - num.valuation()
    t = Tube.of(l, lp)
    Y1 = t.normalized(l1)
    Y2 = t.normalized(l2)
    via_pr = pencil_distance(Y1, Y2)
    out = ProjectedDistance(via_cr, via_pr)
    if strict and not out.agree:
        raise PathMismatch(f"crossratio path {via_cr} and projection path {via_pr} disagree")
    return out


def _degenerate_pair(l, lp, l1, l2) -> bool:
    return l1 == l2 and is_maximal_tuple([l, l1, lp])


def orthogonal_partner(l1: Lagrangian, l2: Lagrangian, l3: Lagrangian) -> Lagrangian:
    """The ``l4`` with ``R(l1, l2, l3, l4) = 2 Id``: normalized, ``Y`` goes to ``-Y``."""
    t = Tube.of(l1, l3)
    Y = t.normalized(l2)
    return apply(t.frame_map, Lagrangian.chart(-Y))


def tube_orthogonality_check(l1: Lagrangian, l2: Lagrangian, l3: Lagrangian, l4: Lagrangian) -> bool:
    """Exact test of ``R(l1, l2, l3, l4) = 2 Id``."""
    try:
        R = crossratio_matrix(l1, l2, l3, l4)
    except NotTransverse:
        return False
    return R == Matrix.identity(l1.field, l1.n, 2)
