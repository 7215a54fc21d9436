"""Representations of the thrice-punctured sphere group into Sp(2n) over a Hahn field.

A representation is given by the images of ``c1`` and ``c3``; the image of
``c2`` is forced by ``c3 c2 c1 = e``. Words are evaluated letter by letter
(``"ab"`` maps to ``rho(a) @ rho(b)``).

Eigenvalue valuations come from the Newton polygon of the characteristic
polynomial, so lengths need no eigenvectors. The attracting Lagrangian of a
Shilov hyperbolic image is found by iterating its action on frames.
"""

from __future__ import annotations

import itertools
import random
import re
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from lamina.fuchsian import (
    BoundaryPoint,
    GroupWord,
    enumerate_words,
    evaluate_mobius,
    orientation,
)
from lamina.linalg import Matrix, adjugate, charpoly, det, newton_polygon
from lamina.symplectic import (
    Lagrangian,
    SpElement,
    apply,
    det_crossratio_parts,
    maslov_index,
    random_symmetric,
)
from lamina.valued import (
    Exponent,
    FieldParams,
    IndistinguishableFromZero,
    LaminaError,
    ValuedScalar,
)


class ZeroSlope(LaminaError, ValueError):
    """The image has an eigenvalue of valuation zero; Shilov hyperbolicity cannot be certified."""


class NoConvergence(LaminaError, RuntimeError):
    pass


class RelationViolated(LaminaError, ValueError):
    pass


# --------------------------------------------------------------------------
# entry parsing for explicit matrices


_MONO = re.compile(
    r"^(?P<c>[+-]?\d+(?:/\d+)?)?\*?(?:(?P<v>[xy])(?:\^\(?(?P<e>[+-]?\d+(?:/\d+)?)\)?)?)?$")


def parse_entry(field: FieldParams, obj) -> ValuedScalar:
    """Parse a scalar: JSON series, number, or a sum of monomials like ``"2 - 4*x^-1 + y^2"``.

    ``x`` is the infinitesimal and ``y`` stands for ``x**alpha``.
    """
    if isinstance(obj, ValuedScalar):
        return obj
    if isinstance(obj, dict):
        return ValuedScalar.from_json(obj, field)
    if isinstance(obj, (int, Fraction)):
        return field.const(obj)
    s = str(obj).replace(" ", "")
    if not s:
        raise ValueError("empty entry")
    # split on +/- not inside an exponent
    parts, cur, depth = [], "", 0
    for i, ch in enumerate(s):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch in "+-" and i > 0 and depth == 0 and s[i - 1] not in "^(*":
            parts.append(cur)
            cur = ch
        else:
            cur += ch
    parts.append(cur)
    total = field.zero
    for p in parts:
        total = total + _parse_monomial(field, p)
    return total


def _parse_monomial(field: FieldParams, text: str) -> ValuedScalar:
    sign = 1
    body = text
    if body.startswith("+"):
        body = body[1:]
    elif body.startswith("-"):
        sign, body = -1, body[1:]
    coef = Fraction(1)
    a = Fraction(0)
    b = Fraction(0)
    for factor in body.split("*") if body else []:
        if not factor:
            raise ValueError(f"bad monomial {text!r}")
        if "/" in factor and factor[0] in "xy":
            # x/2 style is not supported; coefficients go first
            raise ValueError(f"bad monomial {text!r}")
        m = re.fullmatch(r"([xy])(?:\^\(?([+-]?\d+(?:/\d+)?)\)?)?", factor)
        if m:
            e = Fraction(m.group(2)) if m.group(2) else Fraction(1)
            if m.group(1) == "x":
                a += e
            else:
                b += e
            continue
        m = re.fullmatch(r"(\d+(?:/\d+)?)/([xy])(?:\^\(?([+-]?\d+(?:/\d+)?)\)?)?", factor)
        if m:
            coef *= Fraction(m.group(1))
            e = Fraction(m.group(3)) if m.group(3) else Fraction(1)
            if m.group(2) == "x":
                a -= e
            else:
                b -= e
            continue
        coef *= Fraction(factor)
    return field.monomial(sign * coef, a, b)


def parse_matrix(field: FieldParams, rows) -> Matrix:
    if isinstance(rows, Matrix):
        return rows
    return Matrix(field, [[parse_entry(field, e) for e in r] for r in rows])


# --------------------------------------------------------------------------
# Shilov data


@dataclass
class ShilovData:
    """Attracting and repelling Lagrangians of a Shilov hyperbolic image."""

    plus: Lagrangian
    minus: Lagrangian
    eigen_valuations: list
    iterations: int = 0
    precision: Optional[Exponent] = None


def eigen_valuations(g: SpElement) -> list:
    """Valuations of the eigenvalues of ``g`` with multiplicity, ascending."""
    vals = newton_polygon(charpoly(g.M)).root_valuations()
    return sorted(vals)


def is_shilov_regular(g: SpElement) -> bool:
    return all(v != 0 for v in eigen_valuations(g))


def length_of(g: SpElement) -> Exponent:
    """``-2 * sum`` of the n most negative eigenvalue valuations (twice the positive slopes)."""
    poly = newton_polygon(charpoly(g.M))
    total = g.field.exponent(0)
    for slope, mult in poly.segments:
        if slope > 0:
            total = total + slope * mult
    return total * 2


def trace_invariant_T(g: SpElement) -> ValuedScalar:
    """``(tr g)^2 - tr(g^2) - 4`` for g in Sp(4)."""
    if g.n != 2:
        raise ValueError("the T invariant is defined for Sp(4)")
    t = g.trace()
    return t * t - (g.M @ g.M).trace() - 4


def _minors(n: int):
    return list(itertools.combinations(range(2 * n), n))


def _normalize_frame(B: Matrix, pivot=None, rel=None):
    """Right-multiply ``B`` so that the rows ``pivot`` form the identity.

    When ``pivot`` is ``None`` the minor of least valuation is used; then all
    normalized entries have nonnegative valuation.
    """
    n = B.cols
    if pivot is None:
        best = None
        for rows in _minors(n):
            d = det(B.submatrix(rows, range(n)))
            if d.is_zero() or not d.terms:
                continue
            v = d.valuation()
            if best is None or v < best[0]:
                best = (v, rows)
        if best is None:
            raise IndistinguishableFromZero("frame has no determinable nonzero minor")
        pivot = best[1]
    P = B.submatrix(pivot, range(n))
    d = det(P)
    if d.is_zero() or not d.terms:
        raise IndistinguishableFromZero("pivot minor vanished")
    if len(d.terms) == 1 and d.is_exact:
        inv = d.invert()
    else:
        inv = d.invert(rel)
    N = (B @ adjugate(P)) * inv
    rows = []
    for i in range(B.rows):
        if i in pivot:
            k = pivot.index(i)
            rows.append([1 if j == k else 0 for j in range(n)])
        else:
            rows.append(list(N.row(i)))
    return Matrix(B.field, rows), pivot


def _strip(B: Matrix, p) -> Matrix:
    """Exact polynomial truncation below absolute exponent ``p`` (markers dropped)."""
    def st(e: ValuedScalar):
        return ValuedScalar(e.field, tuple(t for t in e.terms if t[0] < p), None)
    return B.map(st)


def _mark(B: Matrix, p) -> Matrix:
    return B.map(lambda e: e.truncate_raw(p))


def _truncate_relative(M: Matrix, rel):
    """Truncate every entry at ``v_min(M) + rel`` (with a precision marker)."""
    v = None
    for r in M.entries:
        for e in r:
            if e.terms:
                t = e.terms[0][0]
                v = t if v is None or t < v else v
    if v is None:
        return M
    cut = v + rel
    return M.map(lambda e: e.truncate_raw(cut))


def _min_marker(B: Matrix):
    return min((e.prec for r in B.entries for e in r if e.prec is not None), default=None)


def _diff_valuation(A: Matrix, B: Matrix):
    dv = None
    for r in (A - B).entries:
        for e in r:
            if e.terms:
                v = e.terms[0][0]
                dv = v if dv is None or v < dv else dv
    return dv


def attracting_lagrangian(g: SpElement, precision=None, max_iters: int = 64, seed: int = 0):
    """Power iteration of ``g`` on frames; returns ``(Lagrangian, iterations, precision)``.

    The frame is renormalized at its dominant minor after each step, so its
    entries have nonnegative valuation. The iterating matrix is squared
    between steps (``g, g^2, g^4, ...``) and kept to a relative precision that
    grows whenever the normalized frame would lose its precision marker.
    Near the attracting fixed point the action contracts, so the valuation of
    the last step's difference bounds the error; the result is truncated
    there.
    """
    f = g.field
    target = f.raw(f.default_precision if precision is None else Fraction(precision))
    work = target + f.raw(4)
    n = g.n
    rng = random.Random(seed)
    S = random_symmetric(f, n, rng, lambda: Fraction(rng.randint(-3, 3), rng.randint(1, 3)))
    B0, pivot0 = _normalize_frame(Matrix.identity(f, n).vstack(S))
    rel = work + f.raw(8)
    powers = [g.M]
    B, pivot = B0, pivot0
    k = 0
    it = 0
    while it < max_iters:
        it += 1
        h = powers[k]
        try:
            Bn, pn = _normalize_frame(h @ B, None, work)
        except IndistinguishableFromZero:
            # every minor cancelled inside the truncation of the power
            rel = rel * 2
            powers = [g.M]
            for _ in range(k):
                powers.append(_truncate_relative(powers[-1] @ powers[-1], rel))
            continue
        marker = _min_marker(Bn)
        if marker is not None and marker < target:
            # the truncated power lost too much; rebuild the chain more precisely
            rel = rel + (target - marker) + f.raw(4)
            powers = [g.M]
            for _ in range(k):
                powers.append(_truncate_relative(powers[-1] @ powers[-1], rel))
            continue
        if pn == pivot:
            dv = _diff_valuation(Bn, B)
            bound = marker if dv is None else (dv if marker is None or dv < marker else marker)
            if bound is None:
                return Lagrangian.from_frame(Bn, check=False), it, None
            if not bound < target:
                return Lagrangian.from_frame(_mark(Bn, target), check=False), it, f.wrap(target)
        B, pivot = _strip(Bn, work), pn
        if k + 1 >= len(powers):
            powers.append(_truncate_relative(powers[-1] @ powers[-1], rel))
        k += 1
    raise NoConvergence(f"power iteration did not converge in {max_iters} iterations")


def quadratic_fixed_points(g: SpElement, precision=None) -> tuple[Lagrangian, Lagrangian]:
    """For SL(2): ``(attracting, repelling)`` chart points solving ``c t^2 + (d - a) t - b = 0``."""
    if g.n != 1:
        raise ValueError("quadratic solve is for n = 1")
    f = g.field
    a, b = g.M[0, 0], g.M[0, 1]
    c, d = g.M[1, 0], g.M[1, 1]
    rel = f.default_precision if precision is None else Fraction(precision)
    if c.is_zero():
        fin = Lagrangian.chart(Matrix(f, [[b / (d - a) if not b.is_zero() else f.zero]]))
        inf = Lagrangian.infinity(f, 1)
        # t -> (a/d) t + b/d; infinity attracts iff v(a) < v(d)
        return (inf, fin) if a.valuation() < d.valuation() else (fin, inf)
    tr = a + d
    disc = tr * tr - 4
    root = disc.sqrt(rel + 2 * max(0, -float(c.valuation())) + 4)
    inv2c = (c * 2).invert(rel + 8)
    roots = [((a - d) + root) * inv2c, ((a - d) - root) * inv2c]
    attract = []
    for t in roots:
        ct_d = c * t + d
        attract.append(float(ct_d.valuation()) < 0)
    if attract[0] == attract[1]:
        raise ZeroSlope("cannot separate attracting from repelling fixed point")
    if attract[1]:
        roots.reverse()
    return tuple(Lagrangian.chart(Matrix(f, [[t]])) for t in roots)


# --------------------------------------------------------------------------
# representations


class Representation:
    """A homomorphism from the free group on ``c1, c2`` into Sp(2n), with a framing cache."""

    def __init__(self, c1: SpElement, c3: SpElement, kind: str = "explicit", params: dict | None = None,
                 seed: int = 0, check: bool = True, orientation: int | None = None):
        if c1.n != c3.n:
            raise ValueError("generator images of different rank")
        self.field = c1.field
        self.n = c1.n
        self.kind = kind
        self.params = dict(params or {})
        self.seed = seed
        if check:
            for name, g in (("c1", c1), ("c3", c3)):
                if not g.is_symplectic():
                    raise ValueError(f"image of {name} is not symplectic")
        self.c1, self.c3 = c1, c3
        self.c2 = c3.inverse() @ c1.inverse()
        self._gens = {"a": c1, "A": c1.inverse(), "b": self.c2, "B": self.c2.inverse()}
        self._cache: dict = {}
        self._frames: dict = {}
        self._lock = threading.Lock()
        if orientation not in (None, 1, -1):
            raise ValueError("orientation must be +1, -1 or None")
        self._orientation = orientation
        if check:
            rel = c3 @ self.c2 @ c1
            if rel != SpElement.identity(self.field, self.n):
                raise RelationViolated("c3 c2 c1 != Id")

    # evaluation -----------------------------------------------------------
    def image(self, letter: str) -> SpElement:
        return self._gens[letter]

    def evaluate(self, w) -> SpElement:
        if isinstance(w, str):
            w = GroupWord.parse(w)
        key = w.letters
        with self._lock:
            hit = self._cache.get(key)
        if hit is not None:
            return hit
        if not key:
            g = SpElement.identity(self.field, self.n)
        elif len(key) == 1:
            g = self._gens[key]
        else:
            half = len(key) // 2
            g = self.evaluate(GroupWord(key[:half])) @ self.evaluate(GroupWord(key[half:]))
        with self._lock:
            self._cache[key] = g
        return g

    __call__ = evaluate

    # invariants -----------------------------------------------------------
    def T(self, w) -> ValuedScalar:
        return trace_invariant_T(self.evaluate(w))

    def length(self, w) -> Exponent:
        return length_of(self.evaluate(w))

    def eigen_valuations(self, w) -> list:
        return eigen_valuations(self.evaluate(w))

    def is_shilov_regular(self, w) -> bool:
        return is_shilov_regular(self.evaluate(w))

    # framings -------------------------------------------------------------
    def shilov_data(self, w, precision=None, max_iters: int = 64) -> ShilovData:
        if isinstance(w, str):
            w = GroupWord.parse(w)
        g = self.evaluate(w)
        vals = eigen_valuations(g)
        if any(v == 0 for v in vals):
            raise ZeroSlope(f"word {w} has an eigenvalue of valuation zero")
        plus, it1, p1 = self._attracting(w, precision, max_iters)
        minus, it2, p2 = self._attracting(w.inverse(), precision, max_iters)
        prec = p1 if p2 is None or (p1 is not None and p1 <= p2) else p2
        return ShilovData(plus, minus, vals, it1 + it2, prec)

    def _attracting(self, w: GroupWord, precision, max_iters):
        f = self.field
        p = Fraction(f.default_precision if precision is None else precision)
        key = (w.letters, p)
        with self._lock:
            hit = self._frames.get(key)
        if hit is not None:
            return hit
        g = self.evaluate(w)
        if any(v == 0 for v in eigen_valuations(g)):
            raise ZeroSlope(f"word {w} has an eigenvalue of valuation zero")
        if self.n == 1:
            plus, _ = quadratic_fixed_points(g, p)
            res = (plus, 0, None)
        else:
            res = attracting_lagrangian(g, p, max_iters, seed=self.seed)
        with self._lock:
            self._frames[key] = res
        return res

    def framing(self, w, precision=None) -> Lagrangian:
        """``phi`` at the attracting fixed point of the reference image of ``w``."""
        if isinstance(w, str):
            w = GroupWord.parse(w)
        return self._attracting(w, precision, 64)[0]

    def framing_point(self, x: "FramedPoint", precision=None) -> Lagrangian:
        """Framing of a framed boundary point; translates use ``rho(h) phi(base)``."""
        if x.base is None:
            return self.framing(x.word, precision)
        p = Fraction(self.field.default_precision if precision is None else precision)
        key = ("translate", x.base.letters, x.by.letters, p)
        with self._lock:
            hit = self._frames.get(key)
        if hit is None:
            hit = apply(self.evaluate(x.by), self.framing(x.base, precision))
            with self._lock:
                self._frames[key] = hit
        return hit

    @property
    def orientation(self) -> int:
        """``+1`` if positively oriented triples go to maximal triples, ``-1`` if to minimal ones.

        Detected on first use from one triple of attracting fixed points when
        not given explicitly.
        """
        if self._orientation is None:
            self._orientation = detect_orientation(self)
        return self._orientation

    def to_json(self) -> dict:
        out = {"kind": self.kind, **self.params}
        if self.kind == "explicit" or not self.params:
            out.update({"n": self.n, "c1": self.c1.M.to_json(), "c3": self.c3.M.to_json()})
        return out


# --------------------------------------------------------------------------
# families


def strubel_matrices(field: FieldParams) -> tuple[SpElement, SpElement]:
    """The unipotent Sp(4) family in the parameters ``x`` and ``y = x**alpha``."""
    f = field
    x = f.x
    xi = f.monomial(1, -1)
    y = f.y
    y2x = f.monomial(1, -1, 2)
    one = f.one
    c1 = Matrix(f, [[1, xi * 4, 0, 0],
                    [0, 1, 0, 0],
                    [2, xi * 4, 1, 0],
                    [xi * -4, 2, xi * -4, 1]])
    c3 = Matrix(f, [[one - y, x, -2, -x - y2x],
                    [-y2x, one + y, x + y2x, -2],
                    [0, 0, one + y, y2x],
                    [0, 0, -x, one - y]])
    return SpElement(c1, check=False), SpElement(c3, check=False)


def strubel_unipotent(alpha="0", precision=48, seed: int = 0, backend: str = "exact") -> Representation:
    f = FieldParams.from_alpha(alpha, default_precision=precision, backend=backend)
    c1, c3 = strubel_matrices(f)
    # this family sends positively oriented triples of the reference circle to minimal triples
    return Representation(c1, c3, kind="strubel_unipotent", params={"alpha": str(f.alpha)}, seed=seed,
                          orientation=-1)


def strubel_triple(field: FieldParams) -> tuple[Matrix, Matrix, Matrix]:
    """Chart triple ``(X1, X2, X3)`` of the unipotent family, ``y = x**alpha``."""
    f = field
    x, y = f.x, f.y
    xi = f.monomial(1, -1)
    X1 = Matrix(f, [[1, xi * 4], [0, 1]])
    X2 = Matrix(f, [[y - 3, -x], [(y - 2) * (y - 2) * xi, f.one - y]])
    X3 = Matrix(f, [[f.one + y, f.monomial(1, -1, 2)], [-x, f.one - y]])
    return X1, X2, X3


def rho_from_triple(X1: Matrix, X2: Matrix, X3: Matrix, inverse=None) -> tuple[SpElement, SpElement]:
    """Images of ``c1`` and ``c3`` built blockwise from a triple in the parameter domain."""
    inv = inverse or (lambda M: M.inverse())
    Z = Matrix.zeros(X1.field, X1.rows)
    X1i, X2i, X3ti = inv(X1), inv(X2), inv(X3.T())
    c1 = Matrix.block([[X1, Z], [X1 + X2i @ X3.T(), inv(X1.T())]])
    c3 = Matrix.block([[X3ti, -X3ti - X1i @ X2.T()], [Z, X3]])
    return SpElement(c1), SpElement(c3)


def triple_conditions(X1: Matrix, X2: Matrix, X3: Matrix) -> dict:
    """Unipotency of ``X1, -X2, X3`` and the value of ``X3 X2^{-t} X1``."""
    n = X1.rows
    I = Matrix.identity(X1.field, n)
    Z = Matrix.zeros(X1.field, n)

    def unipotent(M):
        return (M - I) ** n == Z

    prod = X3 @ X2.T().inverse() @ X1
    return {
        "X1_unipotent": unipotent(X1),
        "minus_X2_unipotent": unipotent(-X2),
        "X3_unipotent": unipotent(X3),
        "product": prod,
        "product_is_identity": prod == I,
    }


def sl2_from_generators(c1: Matrix, c2: Matrix, seed: int = 0, kind="sl2", params=None) -> Representation:
    g1 = SpElement(c1)
    g2 = SpElement(c2)
    c3 = (g2 @ g1).inverse()
    return Representation(g1, c3, kind=kind, params=params, seed=seed)


def sl2_unipotent(field: FieldParams, s) -> Representation:
    """``c1 -> [[1, s], [0, 1]]``, ``c2 -> [[1, 0], [-s, 1]]``; maximal for ``s > 2``."""
    s = parse_entry(field, s)
    c1 = Matrix(field, [[1, s], [0, 1]])
    c2 = Matrix(field, [[1, 0], [-s, 1]])
    return sl2_from_generators(c1, c2, params={"s": repr(s)})


def diagonal_element(field: FieldParams, exponents) -> SpElement:
    """``diag(x^e_1, ..., x^e_n, x^-e_1, ..., x^-e_n)``."""
    vals = [field.monomial(1, e) for e in exponents] + [field.monomial(1, -Fraction(e)) for e in exponents]
    return SpElement(Matrix.diag(field, vals), check=False)


def detect_orientation(rho: Representation, max_len: int = 4, precision=None) -> int:
    """Sign of the Maslov index on the first positively oriented triple of framed points."""
    pts = []
    for w in enumerate_words(max_len, cyclic=True, canonical=True):
        m = evaluate_mobius(w)
        if m.classify() != "hyperbolic" or not rho.is_shilov_regular(w):
            continue
        pts.append(FramedPoint.attracting(w))
        if len(pts) == 3:
            break
    if len(pts) < 3:
        raise ValueError("not enough Shilov-regular words to detect the orientation")
    a, b, c = pts
    o = orientation(a.point, b.point, c.point)
    if o == 0:
        raise ValueError("coincident reference points")
    if o < 0:
        b, c = c, b
    tau = maslov_index(*(rho.framing_point(x, precision) for x in (a, b, c)))
    if abs(tau) != rho.n:
        raise ValueError(f"reference triple has Maslov index {tau}; representation is not maximal")
    return 1 if tau > 0 else -1


def representation_from_config(cfg: dict, precision=48, seed: int = 0) -> Representation:
    rep = _build_representation(cfg, precision, seed)
    if cfg.get("orientation") is not None:
        o = int(cfg["orientation"])
        if o not in (1, -1):
            raise ValueError("orientation must be +1 or -1")
        rep._orientation = o
    return rep


def _build_representation(cfg: dict, precision, seed: int) -> Representation:
    kind = cfg.get("kind")
    if kind == "strubel_unipotent":
        return strubel_unipotent(cfg.get("alpha", "0"), precision=precision, seed=seed,
                                 backend=cfg.get("backend", "exact"))
    f = FieldParams.from_alpha(cfg.get("alpha", "0"), default_precision=precision,
                               backend=cfg.get("backend", "exact"))
    if kind == "sl2":
        ent = cfg.get("entries")
        if ent is None and "s" in cfg:
            rep = sl2_unipotent(f, cfg["s"])
            rep.seed = seed
            return rep
        if not isinstance(ent, dict):
            raise ValueError("sl2 entries must be an object with c1 and c2 (or c3)")
        c1 = parse_matrix(f, ent["c1"])
        if "c2" in ent:
            return sl2_from_generators(c1, parse_matrix(f, ent["c2"]), seed=seed, params={"entries": ent})
        g1 = SpElement(c1)
        return Representation(g1, SpElement(parse_matrix(f, ent["c3"])), kind="sl2",
                              params={"entries": ent}, seed=seed)
    if kind == "explicit":
        c1 = parse_matrix(f, cfg["c1"])
        c3 = parse_matrix(f, cfg["c3"])
        if "n" in cfg and c1.rows != 2 * int(cfg["n"]):
            raise ValueError("matrix size does not match n")
        return Representation(SpElement(c1), SpElement(c3), kind="explicit", seed=seed)
    raise ValueError(f"unknown representation kind {kind!r}")


# --------------------------------------------------------------------------
# framed boundary points and the crossratio


@dataclass(frozen=True)
class FramedPoint:
    """A boundary point realized as the attracting fixed point of a hyperbolic word."""

    word: GroupWord
    point: BoundaryPoint
    base: GroupWord | None = None
    by: GroupWord | None = None

    @classmethod
    def attracting(cls, w) -> "FramedPoint":
        if isinstance(w, str):
            w = GroupWord.parse(w)
        return cls(w, evaluate_mobius(w).attracting())

    @classmethod
    def repelling(cls, w) -> "FramedPoint":
        if isinstance(w, str):
            w = GroupWord.parse(w)
        return cls(w.inverse(), evaluate_mobius(w).repelling())

    def translate(self, h) -> "FramedPoint":
        """``h * point`` realized by the conjugate word ``h w h^{-1}``."""
        if isinstance(h, str):
            h = GroupWord.parse(h)
        base = self.word if self.base is None else self.base
        by = h if self.by is None else h * self.by
        return FramedPoint(self.word.conjugate(h), evaluate_mobius(h).act(self.point), base, by)

    def direct(self) -> "FramedPoint":
        """The same point, framed by power iteration on its own word."""
        return FramedPoint(self.word, self.point)

    def __str__(self):
        return f"{self.word}+"


def framing_crossratio(rho: Representation, x1, x2, x3, x4, precision=None,
                       max_precision=None):
    """``-v(det R)`` of the framed quadruple, as an exact exponent.

    Only valuations of four pairing determinants are needed. If one of them
    cancels below the working precision, the framings are recomputed at
    doubled precision.
    """
    pts = [x1, x2, x3, x4]
    for i in range(4):
        for j in range(i + 1, 4):
            if pts[i].point == pts[j].point:
                raise ValueError("framing crossratio of a repeated point")
    f = rho.field
    p = Fraction(f.default_precision if precision is None else precision)
    cap = Fraction(max_precision) if max_precision is not None else 4 * p
    while True:
        try:
            ls = [rho.framing_point(x, p) for x in pts]
            return crossratio_exponent(*ls)
        except IndistinguishableFromZero:
            if p >= cap:
                raise
            p = min(2 * p, cap)


def crossratio_exponent(l1, l2, l3, l4) -> Exponent:
    """``-v(det R(l1, l2, l3, l4)) = v(det w21) + v(det w34) - v(det w24) - v(det w31)``."""
    num, den = det_crossratio_parts(l1, l2, l3, l4)
    return den.valuation() - num.valuation()
