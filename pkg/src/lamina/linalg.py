"""Dense linear algebra over truncated series and their complexification.

Elimination is fraction-free throughout: determinants use Bareiss with exact
series division, signatures use multiplier-free symmetric congruence, and
linear solves go through the adjugate. A series inverse is only formed where
the caller asks for one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from lamina.valued import (
    ComplexScalar,
    Exponent,
    FieldParams,
    IndistinguishableFromZero,
    LaminaError,
    ValuedScalar,
)


class SingularMatrix(LaminaError, ZeroDivisionError):
    pass


Scalar = "ValuedScalar | ComplexScalar"


def _is_exact_zero(s) -> bool:
    return s.is_zero()


def _known_nonzero(s) -> bool:
    if isinstance(s, ComplexScalar):
        return bool(s.re.terms or s.im.terms)
    return bool(s.terms)


def _undetermined(s) -> bool:
    return not _is_exact_zero(s) and not _known_nonzero(s)


class Matrix:
    """Immutable rectangular matrix of :class:`ValuedScalar` or :class:`ComplexScalar`."""

    __slots__ = ("field", "rows", "cols", "_e", "is_complex")
    __hash__ = None

    def __init__(self, field: FieldParams, entries: Sequence[Sequence], is_complex: bool | None = None):
        rows = [list(r) for r in entries]
        if not rows or not rows[0]:
            raise ValueError("matrix must be non-empty")
        cols = len(rows[0])
        if any(len(r) != cols for r in rows):
            raise ValueError("ragged matrix")
        if is_complex is None:
            is_complex = any(isinstance(e, (ComplexScalar, complex)) for r in rows for e in r)
        lift = (lambda e: _to_complex(field, e)) if is_complex else (lambda e: _to_real(field, e))
        self._e = tuple(tuple(lift(e) for e in r) for r in rows)
        self.field = field
        self.rows = len(rows)
        self.cols = cols
        self.is_complex = is_complex

    # constructors ---------------------------------------------------------
    @classmethod
    def identity(cls, field: FieldParams, n: int, scale=1) -> "Matrix":
        return cls(field, [[scale if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, field: FieldParams, r: int, c: int | None = None) -> "Matrix":
        return cls(field, [[0] * (r if c is None else c) for _ in range(r)])

    @classmethod
    def diag(cls, field: FieldParams, values: Iterable) -> "Matrix":
        vals = list(values)
        n = len(vals)
        return cls(field, [[vals[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def block(cls, blocks: Sequence[Sequence["Matrix"]]) -> "Matrix":
        field = blocks[0][0].field
        out = []
        for brow in blocks:
            for i in range(brow[0].rows):
                out.append([e for b in brow for e in b._e[i]])
        return cls(field, out)

    # access ---------------------------------------------------------------
    def __getitem__(self, ij):
        i, j = ij
        return self._e[i][j]

    def row(self, i: int) -> tuple:
        return self._e[i]

    @property
    def entries(self) -> tuple:
        return self._e

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def submatrix(self, rows: Iterable[int], cols: Iterable[int]) -> "Matrix":
        cols = list(cols)
        return Matrix(self.field, [[self._e[i][j] for j in cols] for i in rows], self.is_complex)

    def minor(self, i: int, j: int) -> "Matrix":
        return self.submatrix([r for r in range(self.rows) if r != i],
                              [c for c in range(self.cols) if c != j])

    def map(self, fn: Callable) -> "Matrix":
        return Matrix(self.field, [[fn(e) for e in r] for r in self._e])

    def hstack(self, other: "Matrix") -> "Matrix":
        return Matrix(self.field, [a + b for a, b in zip(self._e, other._e)])

    def vstack(self, other: "Matrix") -> "Matrix":
        return Matrix(self.field, list(self._e) + list(other._e))

    # arithmetic -----------------------------------------------------------
    def T(self) -> "Matrix":
        return Matrix(self.field, [list(c) for c in zip(*self._e)], self.is_complex)

    transpose = T

    def __add__(self, other: "Matrix") -> "Matrix":
        _same_shape(self, other)
        return Matrix(self.field, [[a + b for a, b in zip(r, s)] for r, s in zip(self._e, other._e)])

    def __sub__(self, other: "Matrix") -> "Matrix":
        _same_shape(self, other)
        return Matrix(self.field, [[a - b for a, b in zip(r, s)] for r, s in zip(self._e, other._e)])

    def __neg__(self) -> "Matrix":
        return Matrix(self.field, [[-a for a in r] for r in self._e], self.is_complex)

    def __mul__(self, other):
        if isinstance(other, Matrix):
            return self.matmul(other)
        return Matrix(self.field, [[a * other for a in r] for r in self._e])

    def __rmul__(self, other):
        return Matrix(self.field, [[other * a for a in r] for r in self._e])

    def __matmul__(self, other: "Matrix") -> "Matrix":
        return self.matmul(other)

    def matmul(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        cols = list(zip(*other._e))
        out = []
        for r in self._e:
            row = []
            for c in cols:
                acc = None
                for a, b in zip(r, c):
                    if a.is_zero() or b.is_zero():
                        continue
                    p = a * b
                    acc = p if acc is None else acc + p
                row.append(self.field.zero if acc is None else acc)
            out.append(row)
        return Matrix(self.field, out, self.is_complex or other.is_complex)

    def __pow__(self, k: int) -> "Matrix":
        if k < 0:
            return self.inverse() ** (-k)
        result = Matrix.identity(self.field, self.rows)
        base = self
        while k:
            if k & 1:
                result = result @ base
            k >>= 1
            if k:
                base = base @ base
        return result

    def trace(self):
        acc = self._e[0][0]
        for i in range(1, self.rows):
            acc = acc + self._e[i][i]
        return acc

    def __eq__(self, other):
        if not isinstance(other, Matrix) or self.shape != other.shape:
            return NotImplemented if not isinstance(other, Matrix) else False
        return all(a == b for r, s in zip(self._e, other._e) for a, b in zip(r, s))

    def is_symmetric(self) -> bool:
        return self.is_square and all(self._e[i][j] == self._e[j][i]
                                      for i in range(self.rows) for j in range(i + 1, self.cols))

    def conj(self) -> "Matrix":
        if not self.is_complex:
            return self
        return Matrix(self.field, [[a.conj() for a in r] for r in self._e], True)

    def real_part(self) -> "Matrix":
        return Matrix(self.field, [[a.re if isinstance(a, ComplexScalar) else a for a in r]
                                   for r in self._e], False)

    def imag_part(self) -> "Matrix":
        return Matrix(self.field, [[a.im if isinstance(a, ComplexScalar) else self.field.zero
                                    for a in r] for r in self._e], False)

    @classmethod
    def complex_from(cls, re: "Matrix", im: "Matrix") -> "Matrix":
        return cls(re.field, [[ComplexScalar(a, b) for a, b in zip(r, s)]
                              for r, s in zip(re._e, im._e)], True)

    # derived ---------------------------------------------------------------
    def det(self):
        return det(self)

    def adjugate(self) -> "Matrix":
        return adjugate(self)

    def inverse(self, target_precision=None) -> "Matrix":
        d = det(self)
        if _is_exact_zero(d):
            raise SingularMatrix("matrix is singular")
        inv = d.invert(target_precision)
        return adjugate(self) * inv

    def valuation(self):
        """Minimum entry valuation (valuations of complex entries use the absolute value)."""
        best = math.inf
        for r in self._e:
            for a in r:
                if a.is_zero():
                    continue
                v = a.abs_valuation() if isinstance(a, ComplexScalar) else a.valuation()
                if best == math.inf or v < best:
                    best = v
        return best

    def to_json(self) -> list:
        return [[a.to_json() for a in r] for r in self._e]

    @classmethod
    def from_json(cls, obj, field: FieldParams) -> "Matrix":
        def parse(e):
            if isinstance(e, dict) and "re" in e:
                return ComplexScalar(ValuedScalar.from_json(e["re"], field),
                                     ValuedScalar.from_json(e["im"], field))
            if isinstance(e, dict):
                return ValuedScalar.from_json(e, field)
            return field.const(Fraction(str(e)))
        return cls(field, [[parse(e) for e in r] for r in obj])

    def __repr__(self):
        return "Matrix([" + ",\n        ".join("[" + ", ".join(repr(a) for a in r) + "]"
                                               for r in self._e) + "])"


def _same_shape(a: Matrix, b: Matrix):
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")


def _to_real(field: FieldParams, e):
    if isinstance(e, ValuedScalar):
        return e
    if isinstance(e, ComplexScalar):
        raise TypeError("complex entry in a real matrix")
    if isinstance(e, str):
        return field.const(Fraction(e))
    return field.const(e)


def _to_complex(field: FieldParams, e):
    if isinstance(e, ComplexScalar):
        return e
    if isinstance(e, complex):
        return ComplexScalar(field.const(Fraction(e.real)), field.const(Fraction(e.imag)))
    return ComplexScalar(_to_real(field, e))


# --------------------------------------------------------------------------
# exact division


def exact_div(a: ValuedScalar, b: ValuedScalar) -> ValuedScalar:
    """``a / b`` where ``b`` is known to divide ``a``; exact when both are exact.

    Uses ascending long division on the finite supports and falls back to a
    truncated inverse when the inputs carry precision markers.
    """
    if b.is_zero():
        raise ZeroDivisionError("exact division by zero")
    if a.is_zero():
        return a
    if not (a.is_exact and b.is_exact):
        return a * b.invert()
    if len(b.terms) == 1:
        e, c = b.terms[0]
        return a.shift(-e).scale(1 / c if a.field.backend == "hybrid" else _inv(c))
    f = a.field
    top = a.terms[-1][0] - b.terms[-1][0]
    eb, cb = b.terms[0]
    inv_cb = _inv(cb) if f.backend != "hybrid" else 1.0 / cb
    q = {}
    r = a
    for _ in range(4 * (len(a.terms) + 1) * (len(b.terms) + 1) + 64):
        if r.is_zero() or (f.backend == "hybrid" and not r.terms):
            return ValuedScalar._from_dict(f, q, None)
        e, c = r.terms[0]
        qe = e - eb
        if qe > top:
            break
        qc = c * inv_cb
        q[qe] = q.get(qe, 0) + qc
        r = r - ValuedScalar(f, ((qe, qc),), None) * b
    return a * b.invert()


def _inv(c):
    from gmpy2 import mpq

    return mpq(1) / c


def _cdiv(a, b):
    if isinstance(b, ComplexScalar):
        if isinstance(a, ValuedScalar):
            a = ComplexScalar(a)
        if b.im.is_zero():
            return ComplexScalar(exact_div(a.re, b.re), exact_div(a.im, b.re))
        n = b.norm()
        num = a * b.conj()
        return ComplexScalar(exact_div(num.re, n), exact_div(num.im, n))
    if isinstance(a, ComplexScalar):
        return ComplexScalar(exact_div(a.re, b), exact_div(a.im, b))
    return exact_div(a, b)


# --------------------------------------------------------------------------
# determinant, adjugate, solve


def det(M: Matrix):
    """Determinant by fraction-free Bareiss elimination."""
    if not M.is_square:
        raise ValueError("determinant of a non-square matrix")
    n = M.rows
    a = [list(r) for r in M.entries]
    zero = ComplexScalar(M.field.zero) if M.is_complex else M.field.zero
    if n == 1:
        return a[0][0]
    if n == 2:
        return a[0][0] * a[1][1] - a[0][1] * a[1][0]
    sign = 1
    prev = None
    for k in range(n - 1):
        piv = None
        undetermined = False
        for i in range(k, n):
            if _known_nonzero(a[i][k]):
                piv = i
                break
            if _undetermined(a[i][k]):
                undetermined = True
        if piv is None:
            if undetermined:
                raise IndistinguishableFromZero("Bareiss pivot indistinguishable from zero")
            return zero
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        pk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            for j in range(k + 1, n):
                v = a[i][j] * pk - aik * a[k][j]
                a[i][j] = v if prev is None else _cdiv(v, prev)
            a[i][k] = zero
        prev = pk
    d = a[n - 1][n - 1]
    return -d if sign < 0 else d


def adjugate(M: Matrix) -> Matrix:
    """Classical adjugate, so that ``M @ adj(M) = det(M) * Id``."""
    n = M.rows
    if not M.is_square:
        raise ValueError("adjugate of a non-square matrix")
    if n == 1:
        return Matrix(M.field, [[1]], M.is_complex)
    if n == 2:
        a, b = M[0, 0], M[0, 1]
        c, d = M[1, 0], M[1, 1]
        return Matrix(M.field, [[d, -b], [-c, a]], M.is_complex)
    out = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            c = det(M.minor(i, j))
            out[j][i] = c if (i + j) % 2 == 0 else -c
    return Matrix(M.field, out, M.is_complex)


def solve_fraction_free(A: Matrix, B: Matrix):
    """Return ``(N, d)`` with ``A @ N = d * B`` and ``d = det(A)``."""
    if not A.is_square or A.rows != B.rows:
        raise ValueError("solve shape mismatch")
    d = det(A)
    if _is_exact_zero(d):
        raise SingularMatrix("singular system")
    if not _known_nonzero(d):
        raise IndistinguishableFromZero("determinant indistinguishable from zero")
    return adjugate(A) @ B, d


def solve(A: Matrix, B: Matrix, target_precision=None) -> Matrix:
    """Solve ``A @ Z = B``; exact whenever ``det(A)`` divides the adjugate product."""
    N, d = solve_fraction_free(A, B)
    if isinstance(d, ComplexScalar):
        return N.map(lambda e: _cdiv(e, d))
    return N.map(lambda e: _cdiv(e, d) if d.is_exact and e.is_exact else e * d.invert(target_precision))


# --------------------------------------------------------------------------
# signature


@dataclass(frozen=True)
class Signature:
    positives: int
    negatives: int
    zeros: int

    @property
    def n(self) -> int:
        return self.positives + self.negatives + self.zeros

    @property
    def index(self) -> int:
        """``positives - negatives``."""
        return self.positives - self.negatives

    def flipped(self) -> "Signature":
        return Signature(self.negatives, self.positives, self.zeros)

    def __add__(self, other: "Signature") -> "Signature":
        return Signature(self.positives + other.positives, self.negatives + other.negatives,
                         self.zeros + other.zeros)

    def as_tuple(self) -> tuple[int, int, int]:
        return self.positives, self.negatives, self.zeros


def signature(S: Matrix) -> Signature:
    """Signature of a symmetric matrix by symmetric congruence.

    A nonzero diagonal pivot ``d`` is eliminated multiplier-free, replacing
    the remaining block by ``d`` times its Schur complement; ``d < 0`` flips
    the remaining count. If every remaining diagonal entry vanishes, a
    hyperbolic 2x2 block contributes one positive and one negative.
    """
    if not S.is_square:
        raise ValueError("signature of a non-square matrix")
    a = [list(r) for r in S.entries]
    pos = neg = 0
    flip = False
    while a:
        m = len(a)
        k = None
        undetermined = False
        for i in range(m):
            if _known_nonzero(a[i][i]):
                k = i
                break
            if _undetermined(a[i][i]):
                undetermined = True
        if k is not None:
            d = a[k][k]
            s = d.sign()
            if (s > 0) != flip:
                pos += 1
            else:
                neg += 1
            rest = [i for i in range(m) if i != k]
            a = [[d * a[i][j] - a[i][k] * a[k][j] for j in rest] for i in rest]
            if s < 0:
                flip = not flip
            continue
        pair = None
        for i in range(m):
            for j in range(i + 1, m):
                if _known_nonzero(a[i][j]):
                    pair = (i, j)
                    break
                if _undetermined(a[i][j]):
                    undetermined = True
            if pair:
                break
        if pair is None:
            if undetermined:
                raise IndistinguishableFromZero("signature pivot indistinguishable from zero")
            return Signature(pos, neg, m)
        if undetermined:
            raise IndistinguishableFromZero("diagonal entry indistinguishable from zero")
        i, j = pair
        b = a[i][j]
        pos += 1
        neg += 1
        rest = [r for r in range(m) if r not in (i, j)]
        b2 = b * b
        a = [[b2 * a[r][s] - b * (a[r][i] * a[s][j] + a[r][j] * a[s][i]) for s in rest]
             for r in rest]
    return Signature(pos, neg, 0)


def is_positive_definite(S: Matrix) -> bool:
    sig = signature(S)
    return sig.positives == S.rows


# --------------------------------------------------------------------------
# characteristic polynomial and Newton polygon


def charpoly(M: Matrix) -> list:
    """Coefficients ``[a_0, ..., a_n]`` (ascending, monic) of ``det(t*Id - M)``.

    Faddeev-LeVerrier recursion; divisions are by integers only.
    """
    if not M.is_square:
        raise ValueError("charpoly of a non-square matrix")
    n = M.rows
    field = M.field
    coeffs = [field.zero] * (n + 1)
    coeffs[n] = field.one
    AM = M
    for k in range(1, n + 1):
        c = -AM.trace() / k
        coeffs[n - k] = c
        if k < n:
            AM = M @ (AM + Matrix.identity(field, n, c))
    return coeffs


def poly_eval_matrix(coeffs: Sequence, M: Matrix) -> Matrix:
    """Evaluate ``sum a_k M^k`` by Horner's rule."""
    n = M.rows
    acc = Matrix.identity(M.field, n, coeffs[-1])
    for c in reversed(coeffs[:-1]):
        acc = acc @ M + Matrix.identity(M.field, n, c)
    return acc


@dataclass(frozen=True)
class NewtonPolygon:
    """Lower convex hull of ``(k, v(a_k))`` for a polynomial ``sum a_k t^k``.

    ``segments`` lists ``(slope, length)``; each segment of slope ``s`` and
    horizontal length ``m`` accounts for ``m`` roots of valuation ``-s``.
    """

    points: tuple
    hull: tuple
    segments: tuple
    zero_roots: int = 0

    def root_valuations(self) -> list:
        out = []
        for slope, length in self.segments:
            out.extend([-slope] * length)
        out.extend([math.inf] * self.zero_roots)
        return out

    @property
    def degree(self) -> int:
        return sum(m for _, m in self.segments) + self.zero_roots


def newton_polygon(coeffs: Sequence) -> NewtonPolygon:
    """Newton polygon of ``sum coeffs[k] t^k`` with exact exponent slopes.

    Coefficients known only up to ``O(X^p)`` are allowed as long as the point
    ``(k, p)`` lies on or above the hull of the known points.

    >>> from lamina.valued import FieldParams
    >>> F = FieldParams.from_alpha("0")
    >>> newton_polygon([-F.x, F.one]).root_valuations()
    [Exponent(1)]
    """
    coeffs = list(coeffs)
    while coeffs and _is_exact_zero(coeffs[-1]):
        coeffs.pop()
    if not coeffs:
        raise ValueError("Newton polygon of the zero polynomial")
    if not _known_nonzero(coeffs[-1]):
        raise IndistinguishableFromZero("leading coefficient indistinguishable from zero")
    shift = 0
    while _is_exact_zero(coeffs[shift]):
        shift += 1
    if not _known_nonzero(coeffs[shift]):
        raise IndistinguishableFromZero("constant coefficient indistinguishable from zero")
    pts = []
    pending = []
    for k in range(shift, len(coeffs)):
        c = coeffs[k]
        if _known_nonzero(c):
            v = c.abs_valuation() if isinstance(c, ComplexScalar) else c.valuation()
            pts.append((k - shift, v))
        elif not _is_exact_zero(c):
            pending.append((k - shift, c.precision))
    hull: list = []
    for p in pts:
        while len(hull) >= 2 and _slope(hull[-2], hull[-1]) >= _slope(hull[-1], p):
            hull.pop()
        hull.append(p)
    segs = tuple((_slope(p, q), q[0] - p[0]) for p, q in zip(hull, hull[1:]))
    for k, prec in pending:
        for p, q in zip(hull, hull[1:]):
            if p[0] <= k <= q[0]:
                line = p[1] + _slope(p, q) * (k - p[0])
                if prec < line:
                    raise IndistinguishableFromZero(
                        f"coefficient of t^{k + shift} unknown below the hull")
    return NewtonPolygon(tuple(pts), tuple(hull), segs, shift)


def _slope(p, q) -> Exponent:
    return (q[1] - p[1]) / (q[0] - p[0])
