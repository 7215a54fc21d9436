"""Crossratio oracles and the checks that stand in for the associated current.

An oracle evaluates ``[x1, x2, x3, x4]`` on positively oriented quadruples of
boundary points. The value is read as the mass of the rectangle of geodesics
with one end in ``(x4, x1)`` and the other in ``(x2, x3)``. Nothing here
builds a measure: every statement about the current goes through oracle
values, and every check returns a :class:`CheckReport` listing violations.
"""

from __future__ import annotations

import functools
import itertools
import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

from lamina.framed_rep import FramedPoint, Representation, framing_crossratio
from lamina.fuchsian import (
    BoundaryPoint,
    GroupWord,
    NotHyperbolic,
    enumerate_words,
    evaluate_mobius,
    orientation as ref_orientation,
)
from lamina.symplectic import Lagrangian, det_crossratio_parts, is_maximal_tuple
from lamina.valued import Exponent, LaminaError


class InsufficientPoints(LaminaError, ValueError):
    pass


class OrientationError(LaminaError, ValueError):
    pass


class DegenerateSplit(LaminaError, ValueError):
    pass


class NonDiscreteValues(LaminaError, ValueError):
    def __init__(self, message: str, value=None):
        super().__init__(message)
        self.value = value


# --------------------------------------------------------------------------
# values and reports


def render_value(v):
    """JSON form of an oracle value: exact pair plus decimal for exponents."""
    if isinstance(v, Exponent):
        a, b = v.pair()
        return {"a": str(a), "b": str(b), "decimal": float(v)}
    if isinstance(v, (int, Fraction)) and not isinstance(v, bool):
        return {"a": str(v), "b": "0", "decimal": float(v)}
    if isinstance(v, float):
        return {"decimal": v}
    return v


def _render_input(x):
    if isinstance(x, FramedPoint):
        return {"word": str(x.word), "point": str(x.point)}
    if isinstance(x, Lagrangian):
        return repr(x)
    return str(x)


@dataclass
class Violation:
    inputs: list
    lhs: object
    rhs: object

    def to_json(self) -> dict:
        return {"inputs": [_render_input(x) for x in self.inputs],
                "lhs": render_value(self.lhs), "rhs": render_value(self.rhs)}


@dataclass
class CheckReport:
    name: str
    samples: int = 0
    violations: list = dc_field(default_factory=list)
    informational: bool = False
    details: dict = dc_field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        out = {"name": self.name, "samples": self.samples,
               "violations": [v.to_json() for v in self.violations]}
        if self.informational:
            out["informational"] = True
        if self.details:
            out["details"] = self.details
        return out


@dataclass
class SuiteReport:
    checks: list

    def __getitem__(self, name: str) -> CheckReport:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    @property
    def passed(self) -> bool:
        """No violations outside informational checks."""
        return all(c.passed for c in self.checks if not c.informational)

    def to_json(self) -> dict:
        return {"checks": [c.to_json() for c in self.checks],
                "summary": {"checks": len(self.checks),
                            "violations": sum(len(c.violations) for c in self.checks
                                              if not c.informational),
                            "passed": self.passed}}

    def csv_rows(self) -> list:
        return [[c.name, c.samples, len(c.violations), "yes" if c.informational else "no",
                 "pass" if c.passed else "fail"] for c in self.checks]


CSV_HEADER = ["check", "samples", "violations", "informational", "status"]


def _map(fn, items, workers: int = 1):
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


# --------------------------------------------------------------------------
# oracles


class CrossratioOracle:
    """Base class: a finite domain of boundary points and an evaluator.

    Subclasses define :meth:`value`, :meth:`point_of` and :meth:`translate`.
    ``sign`` is the orientation of the boundary circle in which the oracle
    is positive (``-1`` reverses the reference order).
    """

    tolerance: float = 0.0
    sign: int = 1
    ultrametric_expected: bool = False

    def __init__(self, domain: Sequence):
        self.domain = list(domain)

    def point_of(self, x) -> BoundaryPoint:
        raise NotImplementedError

    def value(self, x1, x2, x3, x4):
        raise NotImplementedError

    def translate(self, x, h: GroupWord):
        raise NotImplementedError

    def __call__(self, x1, x2, x3, x4):
        if not self.is_positive([x1, x2, x3, x4]):
            raise OrientationError("crossratio needs a positively oriented quadruple")
        return self.value(x1, x2, x3, x4)

    # orientation -----------------------------------------------------------
    def orient(self, x, y, z) -> int:
        return self.sign * ref_orientation(self.point_of(x), self.point_of(y), self.point_of(z))

    def is_positive(self, pts) -> bool:
        """Strict positive cyclic order of distinct points."""
        k = len(pts)
        ps = [self.point_of(x) for x in pts]
        if len(set(ps)) != k:
            return False
        return all(self.orient(pts[0], pts[i], pts[i + 1]) > 0 for i in range(1, k - 1))

    def in_arc(self, x, left, right) -> bool:
        px, pl, pr = self.point_of(x), self.point_of(left), self.point_of(right)
        if px in (pl, pr):
            return False
        return self.orient(left, x, right) > 0

    def cyclic_sorted(self, pts) -> list:
        """Points in positive cyclic order, starting from the smallest in the reference order."""
        def key_cmp(x, y):
            px, py = self.point_of(x), self.point_of(y)
            if px == py:
                return 0
            return -1 if px < py else 1
        out = sorted(pts, key=functools.cmp_to_key(key_cmp))
        if self.sign < 0:
            out.reverse()
        return out

    # comparisons -----------------------------------------------------------
    def eq(self, u, v) -> bool:
        if self.tolerance:
            return abs(float(u) - float(v)) <= self.tolerance * max(1.0, abs(float(u)), abs(float(v)))
        return u == v

    def nonneg(self, u) -> bool:
        if self.tolerance:
            return float(u) >= -self.tolerance
        return u >= 0

    def leq(self, u, v) -> bool:
        if self.tolerance:
            return float(u) <= float(v) + self.tolerance * max(1.0, abs(float(v)))
        return u <= v

    def is_zero(self, u) -> bool:
        if self.tolerance:
            return abs(float(u)) <= self.tolerance
        return u == 0

    # sampling ----------------------------------------------------------------
    def sample_positive(self, rng: random.Random, k: int) -> list:
        """``k`` distinct domain points in positive cyclic order, randomly rotated."""
        pool = _distinct(self.domain, self.point_of)
        if len(pool) < k:
            raise InsufficientPoints(f"need {k} distinct evaluable points, have {len(pool)}")
        pts = self.cyclic_sorted(rng.sample(pool, k))
        r = rng.randrange(k)
        return pts[r:] + pts[:r]


def _distinct(pts, key) -> list:
    seen, out = set(), []
    for x in pts:
        p = key(x)
        if p not in seen:
            seen.add(p)
            out.append(x)
    return out


class FramingOracle(CrossratioOracle):
    """``[x1, x2, x3, x4] = -v(det R(phi x1, phi x2, phi x3, phi x4))`` for a framed representation."""

    def __init__(self, rho: Representation, domain: Sequence[FramedPoint], precision=None,
                 max_precision=None):
        super().__init__(domain)
        self.rho = rho
        self.precision = precision
        self.max_precision = max_precision
        self.sign = rho.orientation
        self.ultrametric_expected = rho.n == 1

    def point_of(self, x: FramedPoint) -> BoundaryPoint:
        return x.point

    def lagrangian(self, x: FramedPoint) -> Lagrangian:
        return self.rho.framing_point(x, self.precision)

    def value(self, x1, x2, x3, x4) -> Exponent:
        return framing_crossratio(self.rho, x1, x2, x3, x4, self.precision, self.max_precision)

    def translate(self, x: FramedPoint, h: GroupWord) -> FramedPoint:
        return x.translate(h)


class FunctionOracle(CrossratioOracle):
    """An oracle given by a plain function of the four boundary points (used for mocks)."""

    def __init__(self, fn: Callable, domain: Sequence[FramedPoint], tolerance: float = 0.0,
                 sign: int = 1):
        super().__init__(domain)
        self.fn = fn
        self.tolerance = tolerance
        self.sign = sign

    def point_of(self, x) -> BoundaryPoint:
        return x.point if isinstance(x, FramedPoint) else x

    def value(self, x1, x2, x3, x4):
        return self.fn(*(self.point_of(x) for x in (x1, x2, x3, x4)))

    def translate(self, x, h: GroupWord):
        if isinstance(x, FramedPoint):
            return x.translate(h)
        return evaluate_mobius(h).act(x)


class ChartOracle(CrossratioOracle):
    """Oracle on an explicit maximal tuple of Lagrangians, in the given cyclic order.

    Boundary positions are the indices ``0, 1, ...``; there is no group
    action, so the invariance check is not available.
    """

    def __init__(self, lagrangians: Sequence[Lagrangian], check: bool = True):
        if check and not is_maximal_tuple(list(lagrangians)):
            raise OrientationError("chart oracle needs a maximal tuple")
        super().__init__(list(range(len(lagrangians))))
        self.lagrangians = list(lagrangians)

    def point_of(self, x) -> BoundaryPoint:
        return BoundaryPoint(Fraction(x))

    def lagrangian(self, x) -> Lagrangian:
        return self.lagrangians[x]

    def value(self, x1, x2, x3, x4) -> Exponent:
        num, den = det_crossratio_parts(*(self.lagrangians[i] for i in (x1, x2, x3, x4)))
        return den.valuation() - num.valuation()

    def translate(self, x, h):
        raise NotImplementedError("chart oracles carry no group action")


def liouville(a: BoundaryPoint, b: BoundaryPoint, c: BoundaryPoint, d: BoundaryPoint) -> float:
    """Classical log crossratio ``log |(a-c)(b-d) / ((a-b)(c-d))|`` (finite points)."""
    fa, fb, fc, fd = float(a), float(b), float(c), float(d)
    return math.log(abs((fa - fc) * (fb - fd) / ((fa - fb) * (fc - fd))))


def framed_domain(rho: Representation, max_len: int = 4, translates: Iterable[str] = ("",),
                  limit: Optional[int] = None) -> list:
    """Attracting and repelling points of Shilov-regular hyperbolic words, plus translates."""
    pts = []
    for w in enumerate_words(max_len, cyclic=True, canonical=True):
        if evaluate_mobius(w).classify() != "hyperbolic" or not rho.is_shilov_regular(w):
            continue
        pts.append(FramedPoint.attracting(w))
        pts.append(FramedPoint.repelling(w))
        if limit is not None and len(pts) >= limit:
            break
    out = list(pts)
    for h in translates:
        if h:
            out.extend(p.translate(GroupWord.parse(h)) for p in pts)
    return _distinct(out, lambda x: x.point)


# --------------------------------------------------------------------------
# axiom suite


def _sample_many(oracle, rng, k, count):
    return [oracle.sample_positive(rng, k) for _ in range(count)]


def check_invariance(oracle, tuples, words, workers=1) -> CheckReport:
    rep = CheckReport("CR1")

    def one(arg):
        q, h = arg
        lhs = oracle.value(*q)
        moved = [oracle.translate(x, h) for x in q]
        return q, lhs, oracle.value(*moved)

    for q, lhs, rhs in _map(one, list(zip(tuples, words)), workers):
        rep.samples += 1
        if not oracle.eq(lhs, rhs):
            rep.violations.append(Violation(list(q), lhs, rhs))
    return rep


def check_flip(oracle, tuples, workers=1) -> CheckReport:
    rep = CheckReport("CR2")
    res = _map(lambda q: (q, oracle.value(*q), oracle.value(q[2], q[3], q[0], q[1])), tuples, workers)
    for q, lhs, rhs in res:
        rep.samples += 1
        if not oracle.eq(lhs, rhs):
            rep.violations.append(Violation(list(q), lhs, rhs))
    return rep


def check_additivity(oracle, tuples5, workers=1) -> CheckReport:
    """``[x,y,z,t] + [x,z,w,t] = [x,y,w,t]`` for positive ``(x,y,z,w,t)``."""
    rep = CheckReport("CR3")

    def one(p):
        x, y, z, w, t = p
        return p, oracle.value(x, y, z, t) + oracle.value(x, z, w, t), oracle.value(x, y, w, t)

    for p, lhs, rhs in _map(one, tuples5, workers):
        rep.samples += 1
        if not oracle.eq(lhs, rhs):
            rep.violations.append(Violation(list(p), lhs, rhs))
    return rep


def check_positivity(oracle, tuples, workers=1) -> CheckReport:
    rep = CheckReport("CR4")
    for q, v in _map(lambda q: (q, oracle.value(*q)), tuples, workers):
        rep.samples += 1
        if not oracle.nonneg(v):
            rep.violations.append(Violation(list(q), v, 0))
    return rep


def check_monotonicity(oracle, tuples8, workers=1) -> CheckReport:
    """Enlarging both sides of a rectangle does not decrease its crossratio.

    Each sample is a positive 8-tuple ``(x4', x4, x1, x1', x2', x2, x3, x3')``;
    the check is ``[x1, x2, x3, x4] <= [x1', x2', x3', x4']``.
    """
    rep = CheckReport("monotonicity")

    def one(p):
        x4p, x4, x1, x1p, x2p, x2, x3, x3p = p
        return p, oracle.value(x1, x2, x3, x4), oracle.value(x1p, x2p, x3p, x4p)

    for p, inner, outer in _map(one, tuples8, workers):
        rep.samples += 1
        if not oracle.leq(inner, outer):
            rep.violations.append(Violation(list(p), inner, outer))
    return rep


def check_ultrametric(oracle, tuples, workers=1) -> CheckReport:
    """``[a,b,c,d] * [b,c,d,a] = 0``, i.e. one of the two values vanishes."""
    rep = CheckReport("CRU", informational=not oracle.ultrametric_expected)

    def one(q):
        a, b, c, d = q
        return q, oracle.value(a, b, c, d), oracle.value(b, c, d, a)

    for q, u, v in _map(one, tuples, workers):
        rep.samples += 1
        if not (oracle.is_zero(u) or oracle.is_zero(v)):
            rep.violations.append(Violation(list(q), u, v))
    return rep


def axiom_suite(oracle: CrossratioOracle, sample_size: int, seed: int, workers: int = 1,
                translate_words: Optional[Sequence[str]] = None) -> SuiteReport:
    """CR1-CR4, monotonicity and CRU on ``sample_size`` sampled tuples each.

    CR1 is skipped for oracles without a group action.
    """
    rng = random.Random(seed)
    quads = _sample_many(oracle, rng, 4, sample_size)
    fives = _sample_many(oracle, rng, 5, sample_size)
    eights = _sample_many(oracle, rng, 8, sample_size)
    checks = []
    if not isinstance(oracle, ChartOracle):
        pool = list(translate_words or [str(w) for w in enumerate_words(2)])
        hs = [GroupWord.parse(rng.choice(pool)) for _ in quads]
        checks.append(check_invariance(oracle, quads, hs, workers))
    checks.append(check_flip(oracle, quads, workers))
    checks.append(check_additivity(oracle, fives, workers))
    checks.append(check_positivity(oracle, quads, workers))
    checks.append(check_monotonicity(oracle, eights, workers))
    checks.append(check_ultrametric(oracle, quads, workers))
    return SuiteReport(checks)


# --------------------------------------------------------------------------
# periods


def _require_hyperbolic(gamma: GroupWord):
    if evaluate_mobius(gamma).classify() != "hyperbolic":
        raise NotHyperbolic(f"{gamma} is not hyperbolic")


def axis(gamma) -> tuple[FramedPoint, FramedPoint]:
    """``(gamma_-, gamma_+)`` as framed points."""
    if isinstance(gamma, str):
        gamma = GroupWord.parse(gamma)
    _require_hyperbolic(gamma)
    return FramedPoint.repelling(gamma), FramedPoint.attracting(gamma)


def period(oracle: CrossratioOracle, gamma, x: FramedPoint):
    """``[gamma_-, x, gamma x, gamma_+]`` for ``x`` in the arc from ``gamma_-`` to ``gamma_+``."""
    if isinstance(gamma, str):
        gamma = GroupWord.parse(gamma)
    gm, gp = axis(gamma)
    if not oracle.in_arc(x, gm, gp):
        raise OrientationError(f"{x.point} is not between the fixed points of {gamma}")
    return oracle.value(gm, x, oracle.translate(x, gamma), gp)


def period_basepoints(oracle: CrossratioOracle, gamma, count: int = 3) -> list:
    """Domain points usable as period basepoints for ``gamma``."""
    if isinstance(gamma, str):
        gamma = GroupWord.parse(gamma)
    gm, gp = axis(gamma)
    out = [x for x in oracle.domain if oracle.in_arc(x, gm, gp)
           and oracle.in_arc(oracle.translate(x, gamma), gm, gp)]
    return out[:count]


def period_independence(oracle: CrossratioOracle, gamma, xs: Sequence) -> CheckReport:
    rep = CheckReport("period_independence")
    vals = [period(oracle, gamma, x) for x in xs]
    rep.samples = len(vals)
    for x, v in zip(xs[1:], vals[1:]):
        if not oracle.eq(v, vals[0]):
            rep.violations.append(Violation([gamma, xs[0], x], vals[0], v))
    rep.details["values"] = [render_value(v) for v in vals]
    return rep


@dataclass
class Bracketing:
    values: list
    period: object
    width: object
    monotone: bool
    bounded: bool


def period_bracketing(oracle: CrossratioOracle, gamma, x, x0, y0, steps: int = 4) -> Bracketing:
    """The sequence ``[gamma^-k x0, x, gamma x, gamma^k y0]`` for ``k = 1..steps``.

    ``x0`` and ``y0`` lie in the arc from ``gamma_+`` to ``gamma_-``. The
    sequence is non-decreasing and bounded by the period; the width is the
    gap between the period and its last term.
    """
    if isinstance(gamma, str):
        gamma = GroupWord.parse(gamma)
    gm, gp = axis(gamma)
    per = period(oracle, gamma, x)
    gx = oracle.translate(x, gamma)
    inv = gamma.inverse()
    vals = []
    for k in range(1, steps + 1):
        a = oracle.translate(x0, inv ** k)
        d = oracle.translate(y0, gamma ** k)
        if not oracle.is_positive([a, x, gx, d]):
            continue
        vals.append(oracle.value(a, x, gx, d))
    if not vals:
        raise OrientationError("no bracketing term is positively oriented")
    monotone = all(oracle.leq(u, v) for u, v in zip(vals, vals[1:]))
    bounded = all(oracle.leq(v, per) for v in vals)
    return Bracketing(vals, per, per - vals[-1], monotone, bounded)


# --------------------------------------------------------------------------
# rectangles


@dataclass
class RectangleMass:
    vertices: tuple
    mass: object

    def to_json(self) -> dict:
        return {"vertices": [_render_input(v) for v in self.vertices], "mass": render_value(self.mass)}


def rectangle_mass(oracle: CrossratioOracle, a, b, c, d) -> RectangleMass:
    if not oracle.is_positive([a, b, c, d]):
        raise OrientationError("rectangle vertices must be positively oriented")
    return RectangleMass((a, b, c, d), oracle.value(a, b, c, d))


def split_rectangle(oracle: CrossratioOracle, a, b, c, d, m) -> tuple:
    """The two halves of ``[a,b,c,d]`` cut at ``m`` in ``(b, c)`` or in ``(d, a)``."""
    pm = oracle.point_of(m)
    if pm in {oracle.point_of(v) for v in (a, b, c, d)}:
        raise DegenerateSplit("split point is a vertex; one half has empty interior")
    if oracle.in_arc(m, b, c):
        return (a, b, m, d), (a, m, c, d)
    if oracle.in_arc(m, d, a):
        return (m, b, c, d), (a, b, c, m)
    raise OrientationError("split point is not on a side of the rectangle")


def additivity_check(oracle: CrossratioOracle, splits: Iterable, workers: int = 1) -> CheckReport:
    """Each split ``(a, b, c, d, m)``: the whole mass equals the sum of the halves."""
    rep = CheckReport("rectangle_additivity")

    def one(s):
        a, b, c, d, m = s
        whole = rectangle_mass(oracle, a, b, c, d).mass
        r1, r2 = split_rectangle(oracle, a, b, c, d, m)
        return s, oracle.value(*r1) + oracle.value(*r2), whole

    for s, lhs, rhs in _map(one, list(splits), workers):
        rep.samples += 1
        if not oracle.eq(lhs, rhs):
            rep.violations.append(Violation(list(s), lhs, rhs))
    return rep


def sample_splits(oracle: CrossratioOracle, count: int, seed: int) -> list:
    """Random rectangles with a split point on one of the two sides."""
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        p = oracle.sample_positive(rng, 5)
        # (a, b, m, c, d) puts m in (b, c); (m, a, b, c, d) puts m in (d, a)
        if rng.random() < 0.5:
            a, b, m, c, d = p
        else:
            m, a, b, c, d = p
        out.append((a, b, c, d, m))
    return out


# --------------------------------------------------------------------------
# discreteness and atoms


@dataclass
class DiscretenessReport:
    unit: Optional[Fraction]
    values: list
    denominator_bound: Optional[int]
    within_bound: bool


def _rational_gcd(values: Iterable[Fraction]) -> Optional[Fraction]:
    """Largest ``g`` with every value in ``g Z`` (``None`` if all vanish)."""
    vals = [v for v in values if v]
    if not vals:
        return None
    den = math.lcm(*(v.denominator for v in vals))
    return Fraction(math.gcd(*(v.numerator * (den // v.denominator) for v in vals)), den)


def discreteness_precheck(oracle: CrossratioOracle, values: Iterable) -> DiscretenessReport:
    """All values rational (no irrational exponent part); unit is their gcd.

    For a rational ``alpha = p/q`` also checks the denominator bound: every
    value times ``q * (8n)!`` is an integer.
    """
    rho = getattr(oracle, "rho", None)
    if rho is not None and not rho.field.alpha.is_rational:
        raise NonDiscreteValues(f"alpha = {rho.field.alpha} is irrational, so the exponent "
                                "group Z + alpha Z is dense")
    vals = []
    for v in values:
        if isinstance(v, Exponent):
            if not v.is_rational:
                raise NonDiscreteValues(f"value {v} has an irrational exponent part; "
                                        "the value group is dense", v)
            vals.append(v.as_fraction())
        elif isinstance(v, (int, Fraction)) and not isinstance(v, bool):
            vals.append(Fraction(v))
        else:
            raise NonDiscreteValues(f"value {v!r} is not exact", v)
    unit = _rational_gcd(vals)
    bound = None
    ok = True
    if rho is not None:
        q = Fraction(rho.field.alpha.u).denominator
        bound = q * math.factorial(8 * rho.n)
        ok = all((v * bound).denominator == 1 for v in vals)
    return DiscretenessReport(unit, vals, bound, ok)


@dataclass
class AtomReport:
    candidate: GroupWord
    masses: list
    weight: Optional[Fraction]
    stabilized: bool
    unit: Optional[Fraction]
    error: Optional[str] = None

    def to_json(self) -> dict:
        return {"candidate": str(self.candidate), "masses": [render_value(m) for m in self.masses],
                "weight": None if self.weight is None else str(self.weight),
                "stabilized": self.stabilized, "unit": None if self.unit is None else str(self.unit),
                "error": self.error}


def nested_rectangles(oracle: CrossratioOracle, gamma: GroupWord, levels: int,
                      p=None, q=None) -> list:
    """Rectangles ``(gamma^-k p, gamma^k p, gamma^k q, gamma^-k q)``, ``k = 1..levels``.

    ``p`` lies in the arc from ``gamma_-`` to ``gamma_+``, ``q`` in the other
    one; the rectangles shrink to the axis of ``gamma``.
    """
    gm, gp = axis(gamma)
    if p is None:
        p = next((x for x in oracle.domain if oracle.in_arc(x, gm, gp)), None)
    if q is None:
        q = next((x for x in oracle.domain if oracle.in_arc(x, gp, gm)), None)
    if p is None or q is None:
        raise InsufficientPoints(f"no corner points on both sides of the axis of {gamma}")
    inv = gamma.inverse()
    out = []
    for k in range(1, levels + 1):
        gk, ik = gamma ** k, inv ** k
        out.append((oracle.translate(p, ik), oracle.translate(p, gk),
                    oracle.translate(q, gk), oracle.translate(q, ik)))
    return out


def atom_scan(oracle: CrossratioOracle, candidates: Sequence, depth: int = 3,
              unit: Optional[Fraction] = None, max_levels: Optional[int] = None,
              sample_values: Optional[Iterable] = None) -> list:
    """Masses of rectangles shrinking to each candidate axis.

    The unit is the gcd of ``sample_values`` (or of all computed masses) after
    the discreteness precheck. A weight is reported once the last ``depth``
    levels agree.
    """
    pre = discreteness_precheck(oracle, sample_values or [])
    if unit is None:
        unit = pre.unit
    levels = max_levels or depth + 3
    reports = []
    for c in candidates:
        g = GroupWord.parse(c) if isinstance(c, str) else c
        try:
            rects = nested_rectangles(oracle, g, levels)
            masses = []
            stable = False
            for r in rects:
                masses.append(oracle.value(*r))
                if len(masses) >= depth and all(m == masses[-1] for m in masses[-depth:]):
                    stable = True
                    break
            discreteness_precheck(oracle, masses)
            reports.append(AtomReport(g, masses, None, stable, unit))
        except (NonDiscreteValues, NotHyperbolic):
            raise
        except LaminaError as e:
            reports.append(AtomReport(g, [], None, False, unit, error=str(e)))
    if unit is None:
        allm = [m for r in reports for m in r.masses]
        unit = discreteness_precheck(oracle, allm).unit
    for r in reports:
        r.unit = unit
        if r.stabilized:
            last = r.masses[-1]
            last = last.as_fraction() if isinstance(last, Exponent) else Fraction(last)
            r.weight = Fraction(0) if last == 0 else (last / unit if unit else None)
    return reports


def monotone_masses(oracle: CrossratioOracle, masses: Sequence) -> bool:
    return all(oracle.leq(v, u) for u, v in zip(masses, masses[1:]))


# --------------------------------------------------------------------------
# lamination and barycenter checks


def lamination_4point_check(oracle: CrossratioOracle, sample: int, seed: int,
                            workers: int = 1) -> CheckReport:
    """Whether ``min([a,b,c,d], [b,c,d,a]) = 0`` on sampled quadruples (informational)."""
    rng = random.Random(seed)
    quads = _sample_many(oracle, rng, 4, sample)
    rep = check_ultrametric(oracle, quads, workers)
    rep.name = "lamination_4point"
    rep.informational = True
    rep.details["zero_minima"] = rep.samples - len(rep.violations)
    return rep


def barycenter_compatibility_check(oracle: CrossratioOracle, barycenter: Callable, distance: Callable,
                                   sample: int, seed: int, permutations: bool = True) -> CheckReport:
    """``[a,b,c,d] = d(beta(a,b,d), beta(a,c,d))`` on sampled positive quadruples.

    ``barycenter`` maps three Lagrangians to a Siegel point and ``distance``
    is an exact pseudo-distance. With ``permutations`` the six orderings of
    each barycenter triple are compared at distance zero.
    """
    rng = random.Random(seed)
    rep = CheckReport("barycenter_compatibility")
    perm_viol = []
    for _ in range(sample):
        a, b, c, d = oracle.sample_positive(rng, 4)
        la, lb, lc, ld = (oracle.lagrangian(x) for x in (a, b, c, d))
        z1 = barycenter(la, lb, ld)
        z2 = barycenter(la, lc, ld)
        lhs = oracle.value(a, b, c, d)
        rhs = distance(z1, z2)
        rep.samples += 1
        if not oracle.eq(lhs, rhs):
            rep.violations.append(Violation([a, b, c, d], lhs, rhs))
        if permutations:
            for perm in itertools.permutations((la, lb, ld)):
                dz = distance(z1, barycenter(*perm))
                if dz != 0:
                    perm_viol.append(Violation([a, b, d], dz, 0))
    if permutations:
        rep.details["permutation_violations"] = len(perm_viol)
        rep.violations.extend(perm_viol)
    return rep
