"""Truncated generalized power series over an ordered field with valuation.

Elements live in a Hahn-type field: finite sums ``sum c_e X^e`` with exact
rational coefficients and exponents in the group ``Q + alpha*Q``. The formal
variable ``X`` is a positive infinitesimal, so an element is positive iff its
leading coefficient is positive and its valuation is the leading exponent.

Every element carries a precision marker: it is known modulo ``O(X^p)``.
Exact elements (polynomials) have ``p = +inf``. Predicates on an element whose
known terms have all cancelled raise :class:`IndistinguishableFromZero`
instead of guessing.

>>> F = FieldParams.from_alpha("1/4")
>>> x, y = F.x, F.y
>>> (1 + x) * (1 - x) == 1 - x**2
True
>>> (y * x).valuation()
Exponent(5/4)
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Iterator, Union

import flint as _flint
import gmpy2
from gmpy2 import mpq

Rational = Union[int, Fraction, "mpq"]

EXACT = "exact"
HYBRID = "hybrid"
HYBRID_GUARD = 1e-9


class LaminaError(Exception):
    """Base class for computational errors raised by this package."""


class IndistinguishableFromZero(LaminaError, ArithmeticError):
    """An element has no known nonzero term at its current precision."""


class NonSquareLeadingCoefficient(LaminaError, ValueError):
    """Square root requested of an element whose leading coefficient is not a rational square."""


class ExponentOverflow(LaminaError, OverflowError):
    pass


class FieldMismatch(LaminaError, TypeError):
    pass


def to_mpq(c) -> mpq:
    if isinstance(c, str):
        return mpq(Fraction(c))
    if isinstance(c, Fraction):
        return mpq(c.numerator, c.denominator)
    return mpq(c)


def _sign(q) -> int:
    return (q > 0) - (q < 0)


def sign_surd(p, q, d: int) -> int:
    """Exact sign of ``p + q*sqrt(d)`` for rationals p, q and square-free d > 1."""
    sp, sq = _sign(p), _sign(q)
    if sq == 0 or d == 0:
        return sp
    if sp == 0 or sp == sq:
        return sq
    return sp if p * p > q * q * d else sq


def _squarefree_part(n: int) -> tuple[int, int]:
    """Return (s, k) with n = k^2 * s and s square-free."""
    k, s, f = 1, 1, 2
    m = n
    while f * f <= m:
        e = 0
        while m % f == 0:
            m //= f
            e += 1
        k *= f ** (e // 2)
        if e % 2:
            s *= f
        f += 1
    return s * m, k


# --------------------------------------------------------------------------
# alpha and exponents


@dataclass(frozen=True)
class Alpha:
    """The real parameter ``alpha = u + w*sqrt(d)`` (rational when ``w == 0``)."""

    u: Fraction
    w: Fraction = Fraction(0)
    d: int = 1

    def __post_init__(self):
        if self.w != 0:
            if self.d < 2:
                raise ValueError("surd alpha needs square-free d >= 2")
            s, k = _squarefree_part(self.d)
            if k != 1:
                raise ValueError(f"d={self.d} is not square-free")

    @property
    def is_rational(self) -> bool:
        return self.w == 0

    def __float__(self) -> float:
        return float(self.u) + float(self.w) * math.sqrt(self.d)

    def sign_of(self, a, b) -> int:
        """Exact sign of ``a + b*alpha``."""
        u, w = to_mpq(self.u), to_mpq(self.w)
        return sign_surd(a + b * u, b * w, self.d)

    @classmethod
    def parse(cls, text) -> "Alpha":
        """Parse ``"1/4"``, ``"-1"``, ``"sqrt(2)-1"``, ``"-1+sqrt(2)"``, ``"1/2*sqrt(3)"``."""
        if isinstance(text, Alpha):
            return text
        if isinstance(text, dict):
            return cls(Fraction(str(text.get("u", 0))), Fraction(str(text.get("w", 0))),
                       int(text.get("d", 1)))
        if isinstance(text, (int, Fraction)):
            return cls(Fraction(text))
        s = str(text).replace(" ", "")
        m = re.fullmatch(r"([+-]?\d+(?:/\d+)?)", s)
        if m:
            return cls(Fraction(s))
        surd = r"([+-]?)(?:(\d+(?:/\d+)?)\*?)?sqrt\((\d+)\)"
        for pat, order in ((rf"{surd}([+-]\d+(?:/\d+)?)?", "sr"),
                           (rf"([+-]?\d+(?:/\d+)?)?{surd}", "rs")):
            m = re.fullmatch(pat, s)
            if not m:
                continue
            if order == "sr":
                sgn, coef, d, rat = m.groups()
            else:
                rat, sgn, coef, d = m.groups()
                if rat is not None and sgn == "":
                    continue
            w = Fraction(coef) if coef else Fraction(1)
            if sgn == "-":
                w = -w
            u = Fraction(rat) if rat else Fraction(0)
            sq, k = _squarefree_part(int(d))
            w *= k
            if sq == 1:
                return cls(u + w)
            return cls(u, w, sq)
        raise ValueError(f"cannot parse alpha {text!r}")

    def __str__(self) -> str:
        if self.is_rational:
            return str(self.u)
        w = "" if self.w == 1 else ("-" if self.w == -1 else f"{self.w}*")
        s = f"{w}sqrt({self.d})"
        if self.u:
            s = f"{s}{'+' if self.u > 0 else '-'}{abs(self.u)}"
        return s


class _SurdExp:
    """Raw exponent ``a + b*alpha`` for irrational alpha; total order is exact."""

    __slots__ = ("a", "b", "f", "alpha")

    def __init__(self, a, b, alpha: Alpha, f=None):
        self.a = a
        self.b = b
        self.alpha = alpha
        self.f = float(a) + float(b) * _alpha_float(alpha) if f is None else f

    def __add__(self, other):
        if not isinstance(other, _SurdExp):
            other = _SurdExp(to_mpq(other), mpq(0), self.alpha)
        return _SurdExp(self.a + other.a, self.b + other.b, self.alpha, self.f + other.f)

    __radd__ = __add__

    def __neg__(self):
        return _SurdExp(-self.a, -self.b, self.alpha, -self.f)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, k):
        k = to_mpq(k)
        return _SurdExp(self.a * k, self.b * k, self.alpha)

    __rmul__ = __mul__

    def __truediv__(self, k):
        k = to_mpq(k)
        return _SurdExp(self.a / k, self.b / k, self.alpha)

    def _cmp(self, other) -> int:
        if not isinstance(other, _SurdExp):
            other = _SurdExp(to_mpq(other), mpq(0), self.alpha)
        if self.a == other.a and self.b == other.b:
            return 0
        diff = self.f - other.f
        if abs(diff) > 1e-9 * (1.0 + abs(self.f) + abs(other.f)):
            return 1 if diff > 0 else -1
        return self.alpha.sign_of(self.a - other.a, self.b - other.b)

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __eq__(self, other):
        if isinstance(other, _SurdExp):
            return self.a == other.a and self.b == other.b
        return self.b == 0 and self.a == other

    def __hash__(self):
        return hash((self.a, self.b))

    def __float__(self):
        return self.f

    def __repr__(self):
        return f"_SurdExp({self.a}, {self.b})"


_ALPHA_FLOATS: dict = {}


def _alpha_float(alpha: Alpha) -> float:
    f = _ALPHA_FLOATS.get(alpha)
    if f is None:
        f = _ALPHA_FLOATS[alpha] = float(alpha)
    return f


@dataclass(frozen=True, eq=False)
class Exponent:
    """An element ``a + b*alpha`` of the exponent group, totally ordered."""

    a: Fraction
    b: Fraction
    alpha: Alpha

    @classmethod
    def of(cls, raw, alpha: Alpha) -> "Exponent":
        if isinstance(raw, Exponent):
            return raw
        if isinstance(raw, _SurdExp):
            return cls(Fraction(int(raw.a.numerator), int(raw.a.denominator)),
                       Fraction(int(raw.b.numerator), int(raw.b.denominator)), alpha)
        r = to_mpq(raw)
        return cls(Fraction(int(r.numerator), int(r.denominator)), Fraction(0), alpha)

    @property
    def raw(self):
        if self.alpha.is_rational:
            return to_mpq(self.a + self.b * self.alpha.u)
        return _SurdExp(to_mpq(self.a), to_mpq(self.b), self.alpha)

    def _coerce(self, other) -> "Exponent":
        if isinstance(other, Exponent):
            if other.alpha != self.alpha:
                raise FieldMismatch("exponents over different alpha")
            return other
        return Exponent(Fraction(other), Fraction(0), self.alpha)

    def _canon(self) -> tuple[Fraction, Fraction]:
        if self.alpha.is_rational:
            return self.a + self.b * self.alpha.u, Fraction(0)
        return self.a, self.b

    def __add__(self, other):
        o = self._coerce(other)
        return Exponent(self.a + o.a, self.b + o.b, self.alpha)

    __radd__ = __add__

    def __neg__(self):
        return Exponent(-self.a, -self.b, self.alpha)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, k):
        k = Fraction(k)
        return Exponent(self.a * k, self.b * k, self.alpha)

    __rmul__ = __mul__

    def __truediv__(self, k):
        k = Fraction(k)
        return Exponent(self.a / k, self.b / k, self.alpha)

    def sign(self) -> int:
        a, b = self._canon()
        return self.alpha.sign_of(to_mpq(a), to_mpq(b))

    def _cmp(self, other) -> int:
        if other == math.inf:
            return -1
        if other == -math.inf:
            return 1
        return (self - self._coerce(other)).sign()

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __eq__(self, other):
        if isinstance(other, (Exponent, int, Fraction)):
            try:
                o = self._coerce(other)
            except FieldMismatch:
                return False
            return self._canon() == o._canon()
        return NotImplemented

    def __hash__(self):
        return hash(self._canon())

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __float__(self):
        a, b = self._canon()
        return float(a) + float(b) * _alpha_float(self.alpha)

    @property
    def is_rational(self) -> bool:
        return self._canon()[1] == 0

    def as_fraction(self) -> Fraction:
        a, b = self._canon()
        if b:
            raise ValueError(f"{self} is not rational")
        return a

    def pair(self) -> tuple[Fraction, Fraction]:
        """The canonical ``(a, b)`` pair (``b == 0`` whenever alpha is rational)."""
        return self._canon()

    def to_json(self) -> dict:
        a, b = self._canon()
        return {"a": str(a), "b": str(b)}

    @classmethod
    def from_json(cls, obj, alpha: Alpha) -> "Exponent":
        return cls(Fraction(obj["a"]), Fraction(obj.get("b", "0")), alpha)

    def exact_str(self) -> str:
        a, b = self._canon()
        if b == 0:
            return str(a)
        bs = {1: "alpha", -1: "-alpha"}.get(b, f"{b}*alpha")
        if a == 0:
            return bs
        return f"{a}{bs}" if bs.startswith("-") else f"{a}+{bs}"

    def decimal(self, digits: int = 12) -> str:
        return f"{float(self):.{digits}g}"

    def __str__(self):
        return self.exact_str()

    def __repr__(self):
        return f"Exponent({self.exact_str()})"


# --------------------------------------------------------------------------
# field parameters


@dataclass(frozen=True)
class FieldParams:
    """Shared parameters of a Hahn-type field: alpha, default precision, backend.

    ``default_precision`` is a relative precision: inversion and square roots
    are carried this many exponent units beyond the leading term.
    """

    alpha: Alpha = dc_field(default_factory=lambda: Alpha(Fraction(0)))
    default_precision: Fraction = Fraction(48)
    backend: str = EXACT
    exponent_bound: Fraction = Fraction(10**6)

    def __post_init__(self):
        if self.backend not in (EXACT, HYBRID):
            raise ValueError(f"unknown backend {self.backend!r}")

    @classmethod
    def from_alpha(cls, alpha="0", **kw) -> "FieldParams":
        kw = {k: (Fraction(v) if k in ("default_precision", "exponent_bound") else v)
              for k, v in kw.items()}
        return cls(alpha=Alpha.parse(alpha), **kw)

    # raw exponent helpers -------------------------------------------------
    def raw(self, a, b=0):
        if isinstance(a, _SurdExp) and b == 0:
            return a
        if isinstance(a, Exponent) and b == 0:
            return a.raw
        a, b = to_mpq(a), to_mpq(b)
        if self.alpha.is_rational:
            return a + b * to_mpq(self.alpha.u)
        return _SurdExp(a, b, self.alpha)

    def wrap(self, raw) -> Exponent:
        return Exponent.of(raw, self.alpha)

    @property
    def raw_zero(self):
        return self.raw(0)

    def exponent(self, a, b=0) -> Exponent:
        return self.wrap(self.raw(a, b))

    def coef(self, c):
        if self.backend == HYBRID:
            return float(c)
        return to_mpq(c)

    # element constructors -------------------------------------------------
    def const(self, c) -> "ValuedScalar":
        c = self.coef(c)
        if c == 0:
            return ValuedScalar(self, (), None)
        return ValuedScalar(self, ((self.raw_zero, c),), None)

    def monomial(self, c, a, b=0) -> "ValuedScalar":
        c = self.coef(c)
        if c == 0:
            return self.zero
        return ValuedScalar(self, ((self.raw(a, b), c),), None)

    @property
    def zero(self) -> "ValuedScalar":
        return ValuedScalar(self, (), None)

    @property
    def one(self) -> "ValuedScalar":
        return self.const(1)

    @property
    def x(self) -> "ValuedScalar":
        return self.monomial(1, 1)

    @property
    def y(self) -> "ValuedScalar":
        """``x**alpha``."""
        return self.monomial(1, 0, 1)

    def __call__(self, value) -> "ValuedScalar":
        if isinstance(value, ValuedScalar):
            if value.field != self:
                raise FieldMismatch("element belongs to a different field")
            return value
        return self.const(value)

    def hybrid(self) -> "FieldParams":
        return FieldParams(self.alpha, self.default_precision, HYBRID, self.exponent_bound)


def _is_raw_less(a, b) -> bool:
    return a < b


def _min_raw(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return a if a <= b else b


# --------------------------------------------------------------------------
# the scalar


class ValuedScalar:
    """A truncated series ``sum c_e X^e + O(X^prec)`` (``prec=None`` means exact).

    ``terms`` is a tuple of ``(raw_exponent, coefficient)`` pairs sorted by
    exponent, all coefficients nonzero, all exponents below ``prec``.
    """

    __slots__ = ("field", "terms", "prec")
    __hash__ = None

    def __init__(self, field: FieldParams, terms=(), prec=None):
        self.field = field
        self.terms = tuple(terms)
        self.prec = prec

    # construction helpers -------------------------------------------------
    @classmethod
    def _from_dict(cls, field: FieldParams, acc: dict, prec) -> "ValuedScalar":
        items = [(e, c) for e, c in acc.items() if c]
        if field.backend == HYBRID:
            items = [(e, c) for e, c in items if c != 0.0]
        if prec is not None:
            items = [(e, c) for e, c in items if e < prec]
        items.sort(key=_sort_key(field))
        return cls(field, items, prec)

    def _lift(self, other) -> "ValuedScalar":
        if isinstance(other, ValuedScalar):
            if other.field is not self.field and other.field != self.field:
                raise FieldMismatch("scalars over different fields")
            return other
        if isinstance(other, (int, Fraction)) or type(other).__name__ == "mpq" \
                or isinstance(other, float):
            return self.field.const(other)
        return NotImplemented

    # basic predicates -----------------------------------------------------
    @property
    def is_exact(self) -> bool:
        return self.prec is None

    def is_zero(self) -> bool:
        """True only for the exact zero."""
        return not self.terms and self.prec is None

    def _lead(self):
        if not self.terms:
            if self.prec is None:
                return None
            raise IndistinguishableFromZero(
                f"element is O(X^{self.field.wrap(self.prec)}) with no known term")
        return self.terms[0]

    def valuation(self):
        """Leading exponent; ``math.inf`` for the exact zero."""
        lead = self._lead()
        if lead is None:
            return math.inf
        return self.field.wrap(lead[0])

    def raw_valuation(self):
        lead = self._lead()
        return None if lead is None else lead[0]

    def leading_coefficient(self):
        lead = self._lead()
        return 0 if lead is None else lead[1]

    def sign(self) -> int:
        lead = self._lead()
        if lead is None:
            return 0
        c = lead[1]
        if self.field.backend == HYBRID:
            scale = max(abs(t[1]) for t in self.terms)
            if abs(c) <= HYBRID_GUARD * scale:
                raise IndistinguishableFromZero("hybrid leading coefficient within guard")
        return 1 if c > 0 else -1

    def compare(self, other) -> int:
        return (self - other).sign()

    def __lt__(self, other):
        return self.compare(other) < 0

    def __le__(self, other):
        return self.compare(other) <= 0

    def __gt__(self, other):
        return self.compare(other) > 0

    def __ge__(self, other):
        return self.compare(other) >= 0

    def __eq__(self, other):
        """Equality modulo the combined precision of both operands."""
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        d = self - o
        return not d.terms

    def __bool__(self):
        if self.terms:
            return True
        if self.prec is None:
            return False
        raise IndistinguishableFromZero("truth value of an undetermined element")

    # arithmetic -----------------------------------------------------------
    def __neg__(self):
        return ValuedScalar(self.field, tuple((e, -c) for e, c in self.terms), self.prec)

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        prec = _min_raw(self.prec, o.prec)
        if not o.terms and o.prec is None:
            return self if prec == self.prec else self.truncate_raw(prec)
        if not self.terms and self.prec is None:
            return o if prec == o.prec else o.truncate_raw(prec)
        acc = dict(self.terms)
        hybrid = self.field.backend == HYBRID
        for e, c in o.terms:
            if e in acc:
                s = acc[e] + c
                if hybrid and abs(s) <= HYBRID_GUARD * max(abs(acc[e]), abs(c)):
                    s = 0.0
                acc[e] = s
            else:
                acc[e] = c
        return ValuedScalar._from_dict(self.field, acc, prec)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return o + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) or type(other).__name__ == "mpq":
            return self.scale(other)
        o = self._lift(other)
        if o is NotImplemented:
            return o
        if self.is_zero() or o.is_zero():
            return self.field.zero
        prec = None
        if self.prec is not None or o.prec is not None:
            vx = self.terms[0][0] if self.terms else self.prec
            vy = o.terms[0][0] if o.terms else o.prec
            if self.prec is not None:
                prec = self.prec + vy
            if o.prec is not None:
                p2 = o.prec + vx
                prec = p2 if prec is None or p2 < prec else prec
        acc = _mul_terms(self.terms, o.terms, prec)
        out = ValuedScalar._from_dict(self.field, acc, prec)
        out._check_bound()
        return out

    __rmul__ = __mul__

    def scale(self, k) -> "ValuedScalar":
        k = self.field.coef(k)
        if k == 0:
            return self.field.zero if self.prec is None else ValuedScalar(self.field, (), self.prec)
        return ValuedScalar(self.field, tuple((e, c * k) for e, c in self.terms), self.prec)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)) or type(other).__name__ == "mpq":
            k = self.field.coef(other)
            if k == 0:
                raise ZeroDivisionError("division by zero")
            return self.scale(1 / k) if self.field.backend == HYBRID else self.scale(mpq(1) / k)
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return self * o.invert()

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return o * self.invert()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise TypeError("integer powers only")
        if k < 0:
            return self.invert() ** (-k)
        result = self.field.one
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base if k > 1 else base
            k >>= 1
        return result

    def shift(self, e) -> "ValuedScalar":
        """Multiply by the monomial ``X^e``."""
        r = e.raw if isinstance(e, Exponent) else e
        return ValuedScalar(self.field, tuple((t + r, c) for t, c in self.terms),
                            None if self.prec is None else self.prec + r)

    def truncate_raw(self, p) -> "ValuedScalar":
        if p is None:
            return self
        if self.prec is not None and self.prec <= p:
            return self
        return ValuedScalar(self.field, tuple((e, c) for e, c in self.terms if e < p), p)

    def truncate(self, p: Exponent) -> "ValuedScalar":
        return self.truncate_raw(p.raw)

    def truncate_relative(self, rel) -> "ValuedScalar":
        """Keep terms below ``valuation + rel``."""
        v = self.raw_valuation()
        if v is None:
            return self
        r = rel.raw if isinstance(rel, Exponent) else self.field.raw(rel)
        return self.truncate_raw(v + r)

    def _check_bound(self):
        if not self.terms:
            return
        bound = self.field.exponent_bound
        for e in (self.terms[0][0], self.terms[-1][0]):
            if abs(float(e)) > bound:
                raise ExponentOverflow(f"exponent {self.field.wrap(e)} beyond bound {bound}")

    # inverse and square root ------------------------------------------------
    def _rel_target(self, target_precision):
        if target_precision is None:
            return self.field.raw(self.field.default_precision)
        if isinstance(target_precision, Exponent):
            return target_precision.raw
        return self.field.raw(target_precision)

    def _normalized(self):
        """Split ``self = c X^v (1 + t)``; returns (v, c, terms of 1+t, relative precision)."""
        lead = self._lead()
        if lead is None:
            raise ZeroDivisionError("inverse of exact zero")
        v, c = lead
        hybrid = self.field.backend == HYBRID
        inv_c = 1.0 / c if hybrid else mpq(1) / c
        unit = tuple((e - v, co * inv_c) for e, co in self.terms)
        rel = None if self.prec is None else self.prec - v
        return v, c, unit, rel

    def invert(self, target_precision=None) -> "ValuedScalar":
        """Multiplicative inverse, carried ``target_precision`` units past the leading term.

        >>> F = FieldParams.from_alpha("0")
        >>> (1 + F.x).invert(3)
        1 - X + X^2 + O(X^3)
        """
        v, c, unit, rel = self._normalized()
        R = self._rel_target(target_precision)
        if rel is not None and rel < R:
            R = rel
        f = self.field
        hybrid = f.backend == HYBRID
        inv_c = 1.0 / c if hybrid else mpq(1) / c
        if len(unit) == 1:
            # monomial: exact inverse up to the input's own precision
            terms = ((-v, inv_c),)
            prec = None if rel is None else R - v
            return ValuedScalar(f, terms, prec)
        delta = unit[1][0]
        y = ((f.raw_zero, f.coef(1)),)
        known = delta
        two = f.coef(2)
        while True:
            target = known + known
            if target > R:
                target = R
            uy = _trunc_terms(_mul_terms(unit, y, target), target, f)
            corr = dict((e, -co) for e, co in uy)
            corr[f.raw_zero] = corr.get(f.raw_zero, 0) + two
            corr_t = [(e, co) for e, co in corr.items() if co]
            corr_t.sort(key=_sort_key(f))
            y = _trunc_terms(_mul_terms(y, corr_t, target), target, f)
            known = target
            if not known < R:
                break
        terms = tuple((e - v, co * inv_c) for e, co in y)
        return ValuedScalar(f, terms, R - v)

    def sqrt(self, target_precision=None) -> "ValuedScalar":
        """Square root of a positive element, to ``target_precision`` relative units."""
        s = self.sign()
        if s < 0:
            raise ValueError("square root of a negative element")
        if s == 0:
            return self.field.zero
        v, c, unit, rel = self._normalized()
        f = self.field
        if f.backend == HYBRID:
            root_c = math.sqrt(float(c))
        else:
            rc, exact = gmpy2.iroot(c.numerator, 2), gmpy2.iroot(c.denominator, 2)
            if not (rc[1] and exact[1]):
                raise NonSquareLeadingCoefficient(
                    f"leading coefficient {c} is not a rational square; use the hybrid backend")
            root_c = mpq(rc[0], exact[0])
        half_v = v / 2
        R = self._rel_target(target_precision)
        if rel is not None and rel < R:
            R = rel
        if len(unit) == 1:
            prec = None if rel is None else R + half_v
            return ValuedScalar(f, ((half_v, root_c),), prec)
        # inverse square root z of the unit by z <- z + z(1 - u z^2)/2, then sqrt = u z
        delta = unit[1][0]
        one = f.coef(1)
        half = 0.5 if f.backend == HYBRID else mpq(1, 2)
        z = ((f.raw_zero, one),)
        known = delta
        while True:
            target = known + known
            if target > R:
                target = R
            z2 = _trunc_terms(_mul_terms(z, z, target), target, f)
            uz2 = _trunc_terms(_mul_terms(unit, z2, target), target, f)
            err = dict((e, -co) for e, co in uz2)
            err[f.raw_zero] = err.get(f.raw_zero, 0) + one
            err_t = [(e, co * half) for e, co in err.items() if co]
            err_t.sort(key=_sort_key(f))
            zc = _mul_terms(z, err_t, target)
            acc = dict(z)
            for e, co in zc.items():
                acc[e] = acc.get(e, 0) + co
            z = _trunc_terms(acc, target, f)
            known = target
            if not known < R:
                break
        root_unit = _trunc_terms(_mul_terms(unit, z, R), R, f)
        terms = tuple((e + half_v, co * root_c) for e, co in root_unit)
        return ValuedScalar(f, terms, R + half_v)

    # views ----------------------------------------------------------------
    def iter_terms(self) -> Iterator[tuple[Exponent, object]]:
        for e, c in self.terms:
            yield self.field.wrap(e), c

    def coefficient(self, e) -> object:
        r = e.raw if isinstance(e, Exponent) else self.field.raw(e)
        for t, c in self.terms:
            if t == r:
                return c
        return 0

    @property
    def precision(self):
        return None if self.prec is None else self.field.wrap(self.prec)

    def abs(self) -> "ValuedScalar":
        return -self if self.sign() < 0 else self

    def __abs__(self):
        return self.abs()

    def __float__(self):
        raise TypeError("a Hahn-series element has no real value")

    def to_json(self) -> dict:
        f = self.field
        return {
            "terms": [[f.wrap(e).to_json(), _coef_str(c)] for e, c in self.terms],
            "precision": None if self.prec is None else f.wrap(self.prec).to_json(),
        }

    @classmethod
    def from_json(cls, obj: dict, field: FieldParams) -> "ValuedScalar":
        acc = {}
        for e, c in obj["terms"]:
            r = Exponent.from_json(e, field.alpha).raw
            acc[r] = acc.get(r, 0) + field.coef(Fraction(c) if field.backend == EXACT else float(c))
        p = obj.get("precision")
        prec = None if p is None else Exponent.from_json(p, field.alpha).raw
        return cls._from_dict(field, acc, prec)

    def __repr__(self):
        if not self.terms:
            return "0" if self.prec is None else f"O(X^{self.field.wrap(self.prec)})"
        parts = []
        for e, c in self.terms:
            ex = self.field.wrap(e)
            mono = "" if ex == 0 else ("X" if ex == 1 else f"X^{_paren(ex)}")
            if mono:
                cs = "" if c == 1 else ("-" if c == -1 else f"{_coef_str(c)}*")
                parts.append(f"{cs}{mono}")
            else:
                parts.append(_coef_str(c))
        s = parts[0]
        for p in parts[1:]:
            s += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        if self.prec is not None:
            s += f" + O(X^{_paren(self.field.wrap(self.prec))})"
        return s


def _paren(e: Exponent) -> str:
    s = e.exact_str()
    return s if re.fullmatch(r"-?\d+", s) else f"({s})"


def _coef_str(c) -> str:
    if isinstance(c, float):
        return repr(c)
    c = to_mpq(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _sort_key(field: FieldParams):
    if field.alpha.is_rational:
        return lambda t: t[0]
    import functools

    return functools.cmp_to_key(lambda s, t: s[0]._cmp(t[0]))


_MPQ = type(mpq(0))
_DENSE_MIN_WORK = 256


def _mul_terms(xs, ys, prec) -> dict:
    if not xs or not ys:
        return {}
    if prec is not None:
        vx, vy = xs[0][0], ys[0][0]
        xs = [t for t in xs if t[0] + vy < prec]
        ys = [t for t in ys if t[0] + vx < prec]
        if not xs or not ys:
            return {}
    if (len(xs) * len(ys) >= _DENSE_MIN_WORK and type(xs[0][0]) is _MPQ
            and type(xs[0][1]) is _MPQ):
        out = _mul_dense(xs, ys, prec)
        if out is not None:
            return out
    acc: dict = {}
    get = acc.get
    if prec is None:
        for e1, c1 in xs:
            for e2, c2 in ys:
                e = e1 + e2
                acc[e] = get(e, 0) + c1 * c2
        return acc
    for e1, c1 in xs:
        if not e1 + ys[0][0] < prec:
            break
        for e2, c2 in ys:
            e = e1 + e2
            if not e < prec:
                break
            acc[e] = get(e, 0) + c1 * c2
    return acc


def _mul_dense(xs, ys, prec):
    """Product of rational-exponent series via dense polynomials in ``X^(1/D)``."""
    D = 1
    for e, _ in xs:
        D = gmpy2.lcm(D, e.denominator)
    for e, _ in ys:
        D = gmpy2.lcm(D, e.denominator)
    x0, y0 = xs[0][0], ys[0][0]
    spx = int((xs[-1][0] - x0) * D) + 1
    spy = int((ys[-1][0] - y0) * D) + 1
    if spx > 8 * len(xs) + 16 or spy > 8 * len(ys) + 16:
        return None
    prod = _dense_poly(xs, x0, D, spx) * _dense_poly(ys, y0, D, spy)
    base = x0 + y0
    acc = {}
    limit = None if prec is None else (prec - base) * D
    den = gmpy2.mpz(int(prod.denom()))
    for k, nk in enumerate(prod.numer().coeffs()):
        if limit is not None and not k < limit:
            break
        if nk == 0:
            continue
        acc[base + mpq(k, D)] = mpq(gmpy2.mpz(int(nk)), den)
    return acc


def _dense_poly(ts, e0, D, span):
    den = 1
    for _, c in ts:
        den = gmpy2.lcm(den, c.denominator)
    nums = [0] * span
    for e, c in ts:
        nums[int((e - e0) * D)] = int(c.numerator * (den // c.denominator))
    return _flint.fmpq_poly(nums, int(den))


def _trunc_terms(acc: dict, p, field: FieldParams):
    items = [(e, c) for e, c in acc.items() if c and e < p]
    items.sort(key=_sort_key(field))
    return tuple(items)


# --------------------------------------------------------------------------
# complex scalars


class ComplexScalar:
    """Element ``re + i*im`` of the quadratic extension ``F(sqrt(-1))``."""

    __slots__ = ("re", "im")
    __hash__ = None

    def __init__(self, re: ValuedScalar, im: ValuedScalar | None = None):
        self.re = re
        self.im = re.field.zero if im is None else im

    @property
    def field(self) -> FieldParams:
        return self.re.field

    def _lift(self, other):
        if isinstance(other, ComplexScalar):
            return other
        if isinstance(other, ValuedScalar):
            return ComplexScalar(other)
        if isinstance(other, complex):
            return ComplexScalar(self.field.const(Fraction(other.real)),
                                 self.field.const(Fraction(other.imag)))
        return ComplexScalar(self.field.const(other))

    def __add__(self, other):
        o = self._lift(other)
        return ComplexScalar(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return ComplexScalar(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) + (-self)

    def __mul__(self, other):
        o = self._lift(other)
        return ComplexScalar(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def conj(self) -> "ComplexScalar":
        return ComplexScalar(self.re, -self.im)

    def norm(self) -> ValuedScalar:
        """``re^2 + im^2``, the square of the absolute value."""
        return self.re * self.re + self.im * self.im

    def abs_valuation(self):
        """Exact ``v(|z|) = v(norm)/2 = min(v(re), v(im))``; squares never cancel.

        A part lost to precision only bounds its valuation from below, which
        still decides the minimum when the other part is known below that bound.
        """
        known = [p for p in (self.re, self.im) if p.terms or p.prec is None]
        lost = [p for p in (self.re, self.im) if not (p.terms or p.prec is None)]
        if not known:
            raise IndistinguishableFromZero("both parts are lost to precision")
        v = min(p.valuation() for p in known)
        for p in lost:
            if v > p.field.wrap(p.prec):
                raise IndistinguishableFromZero(
                    f"part is O(X^{p.field.wrap(p.prec)}) above the known valuation {v}")
        return v

    def abs(self, target_precision=None) -> ValuedScalar:
        return self.norm().sqrt(target_precision)

    def invert(self, target_precision=None) -> "ComplexScalar":
        inv = self.norm().invert(target_precision)
        return ComplexScalar(self.re * inv, -(self.im * inv))

    def __truediv__(self, other):
        o = self._lift(other)
        return self * o.invert()

    def is_zero(self) -> bool:
        return self.re.is_zero() and self.im.is_zero()

    def __eq__(self, other):
        o = self._lift(other)
        return self.re == o.re and self.im == o.im

    def to_json(self) -> dict:
        return {"re": self.re.to_json(), "im": self.im.to_json()}

    def __repr__(self):
        return f"({self.re!r}) + i*({self.im!r})"


def as_exponent_pair_str(e) -> str:
    """CSV rendering ``a|b`` of an exponent (``inf`` for the exact zero)."""
    if e == math.inf:
        return "inf"
    a, b = e.pair()
    return f"({a},{b})"
