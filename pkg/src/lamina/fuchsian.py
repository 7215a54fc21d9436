"""The reference surface group: words, Mobius matrices, and exact boundary points.

The thrice-punctured sphere group is realized as the level-2 principal
congruence subgroup of PSL(2, Z), freely generated by

    c1 = [[1, 2], [0, 1]],   c2 = [[1, 0], [-2, 1]],   c3 = (c2 c1)^{-1}.

Fixed points of hyperbolic elements are real quadratic surds, so the cyclic
order of the boundary circle (the real line increasing, closed by infinity)
is decided exactly.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from lamina.valued import LaminaError, _squarefree_part, sign_surd

ALPHABET = "aAbB"
INVERSE = {"a": "A", "A": "a", "b": "B", "B": "b"}
# c3 = (c2 c1)^{-1} = c1^{-1} c2^{-1}
EXPAND = {"c": "AB", "C": "ba"}


class NotHyperbolic(LaminaError, ValueError):
    pass


class CoincidentPoints(LaminaError, ValueError):
    pass


# --------------------------------------------------------------------------
# words


def free_reduce(letters: str) -> str:
    out: list[str] = []
    for ch in letters:
        if out and out[-1] == INVERSE[ch]:
            out.pop()
        else:
            out.append(ch)
    return "".join(out)


@dataclass(frozen=True)
class GroupWord:
    """Freely reduced word over ``a = c1``, ``b = c2`` and their inverses ``A``, ``B``.

    The string ``l1 l2 ... lk`` denotes the product ``l1 * l2 * ... * lk``.
    Letters ``c``/``C`` are accepted on input and expanded through ``c3 = A B``.
    """

    letters: str

    def __post_init__(self):
        raw = "".join(EXPAND.get(ch, ch) for ch in self.letters)
        bad = set(raw) - set(ALPHABET)
        if bad:
            raise ValueError(f"invalid letters {sorted(bad)} in word {self.letters!r}")
        object.__setattr__(self, "letters", free_reduce(raw))

    @classmethod
    def parse(cls, text: str) -> "GroupWord":
        t = text.strip()
        if t in ("", "e", "1"):
            return cls("")
        return cls(t)

    def __len__(self):
        return len(self.letters)

    def __mul__(self, other: "GroupWord") -> "GroupWord":
        return GroupWord(self.letters + other.letters)

    def inverse(self) -> "GroupWord":
        return GroupWord("".join(INVERSE[ch] for ch in reversed(self.letters)))

    def __pow__(self, k: int) -> "GroupWord":
        if k < 0:
            return self.inverse() ** (-k)
        return GroupWord(self.letters * k)

    def conjugate(self, u: "GroupWord") -> "GroupWord":
        """``u w u^{-1}``."""
        return u * self * u.inverse()

    def is_cyclically_reduced(self) -> bool:
        w = self.letters
        return len(w) <= 1 or w[0] != INVERSE[w[-1]]

    def cyclic_reduction(self) -> tuple["GroupWord", "GroupWord"]:
        """``(core, u)`` with ``self = u core u^{-1}`` and ``core`` cyclically reduced."""
        w = self.letters
        k = 0
        while len(w) - 2 * k > 1 and w[k] == INVERSE[w[len(w) - 1 - k]]:
            k += 1
        return GroupWord(w[k:len(w) - k]), GroupWord(w[:k])

    def canonical(self) -> "GroupWord":
        """Least rotation among the cyclic reductions of the word and its inverse."""
        core, _ = self.cyclic_reduction()
        cands = []
        for w in (core.letters, core.inverse().letters):
            cands.extend(w[i:] + w[:i] for i in range(max(1, len(w))))
        return GroupWord(min(cands, key=lambda s: (len(s), s)))

    def __str__(self):
        return self.letters or "e"


def enumerate_words(max_len: int, cyclic: bool = False, canonical: bool = False,
                    min_len: int = 1) -> list[GroupWord]:
    """All freely reduced words with ``min_len <= length <= max_len``, in shortlex order.

    ``cyclic`` keeps only cyclically reduced words; ``canonical`` keeps one
    representative per conjugacy-and-inversion class.
    """
    out: list[GroupWord] = []
    seen: set[str] = set()
    frontier = [""]
    for length in range(1, max_len + 1):
        nxt = []
        for w in frontier:
            for ch in ALPHABET:
                if w and w[-1] == INVERSE[ch]:
                    continue
                nxt.append(w + ch)
        frontier = nxt
        if length < min_len:
            continue
        for w in frontier:
            g = GroupWord(w)
            if cyclic and not g.is_cyclically_reduced():
                continue
            if canonical:
                key = g.canonical().letters
                if key in seen:
                    continue
                seen.add(key)
            out.append(g)
    return out


def random_word(rng: random.Random, length: int) -> GroupWord:
    w = ""
    while len(w) < length:
        ch = rng.choice(ALPHABET)
        if w and w[-1] == INVERSE[ch]:
            continue
        w += ch
    return GroupWord(w)


# --------------------------------------------------------------------------
# boundary points


@dataclass(frozen=True)
class BoundaryPoint:
    """A point of the circle ``R u {inf}``: either infinity or ``p + q*sqrt(d)``."""

    p: Fraction = Fraction(0)
    q: Fraction = Fraction(0)
    d: int = 1
    infinite: bool = False

    def __post_init__(self):
        if self.infinite:
            object.__setattr__(self, "p", Fraction(0))
            object.__setattr__(self, "q", Fraction(0))
            object.__setattr__(self, "d", 1)
            return
        q, d = Fraction(self.q), int(self.d)
        p = Fraction(self.p)
        if q and d > 1:
            s, k = _squarefree_part(d)
            q, d = q * k, s
        if d == 1:
            p, q = p + q, Fraction(0)
        if q == 0:
            d = 1
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "d", d)

    @classmethod
    def inf(cls) -> "BoundaryPoint":
        return cls(infinite=True)

    @classmethod
    def rational(cls, r) -> "BoundaryPoint":
        return cls(Fraction(r))

    @property
    def is_rational(self) -> bool:
        return not self.infinite and self.q == 0

    def conjugate(self) -> "BoundaryPoint":
        if self.infinite:
            return self
        return BoundaryPoint(self.p, -self.q, self.d)

    def __float__(self):
        if self.infinite:
            return math.inf
        return float(self.p) + float(self.q) * math.sqrt(self.d)

    def _sub_sign(self, other: "BoundaryPoint") -> int:
        """Exact sign of ``self - other`` for finite points."""
        if self.infinite or other.infinite:
            raise ValueError("difference with infinity")
        A = self.p - other.p
        if self.d == other.d or self.q == 0 or other.q == 0:
            d = self.d if self.q else other.d
            return sign_surd(A, self.q - other.q if self.d == other.d else (self.q or -other.q), d)
        return _sign3(A, self.q, self.d, -other.q, other.d)

    def __lt__(self, other: "BoundaryPoint") -> bool:
        """Order on the real line; infinity is largest."""
        if self.infinite:
            return False
        if other.infinite:
            return True
        return self._sub_sign(other) < 0

    def __le__(self, other):
        return self == other or self < other

    def __gt__(self, other):
        return other < self

    def __ge__(self, other):
        return other <= self

    def __str__(self):
        if self.infinite:
            return "inf"
        if self.q == 0:
            return str(self.p)
        s = f"{self.q}*sqrt({self.d})" if self.q not in (1, -1) else \
            ("" if self.q == 1 else "-") + f"sqrt({self.d})"
        if self.p:
            return f"{self.p}{'+' if self.q > 0 else ''}{s}"
        return s

    def to_json(self):
        if self.infinite:
            return {"infinity": True}
        return {"p": str(self.p), "q": str(self.q), "d": self.d}

    @classmethod
    def from_json(cls, obj) -> "BoundaryPoint":
        if isinstance(obj, (int, str)) and str(obj) in ("inf", "infinity"):
            return cls.inf()
        if isinstance(obj, (int, str, float)):
            return cls(Fraction(str(obj)))
        if obj.get("infinity"):
            return cls.inf()
        return cls(Fraction(obj.get("p", "0")), Fraction(obj.get("q", "0")), int(obj.get("d", 1)))


def _sign3(A, B, m, C, n) -> int:
    """Exact sign of ``A + B sqrt(m) + C sqrt(n)``, distinct square-free m, n > 1."""
    u_sign = sign_surd(A, B, m)
    w_sign = -_sign(C)  # the value to compare with is -C sqrt(n)
    # A + B sqrt(m) + C sqrt(n) = u - w, w = -C sqrt(n)
    if u_sign != w_sign:
        return u_sign if u_sign != 0 else -w_sign
    if u_sign == 0:
        return 0
    # same sign: compare squares u^2 - w^2 = A^2 + m B^2 - n C^2 + 2AB sqrt(m)
    s = sign_surd(A * A + m * B * B - n * C * C, 2 * A * B, m)
    return s if u_sign > 0 else -s


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def orientation(a: BoundaryPoint, b: BoundaryPoint, c: BoundaryPoint) -> int:
    """Cyclic orientation of three distinct points (+1 for increasing ``a < b < c`` on R)."""
    if a == b or b == c or a == c:
        raise CoincidentPoints("orientation of coincident points")
    if b.infinite:
        return orientation(b, c, a)
    if c.infinite:
        return orientation(c, a, b)
    if a.infinite:
        return c._sub_sign(b)
    return b._sub_sign(a) * c._sub_sign(b) * c._sub_sign(a)


def in_interval(x: BoundaryPoint, left: BoundaryPoint, right: BoundaryPoint) -> bool:
    """``x`` in the open positively oriented arc from ``left`` to ``right``."""
    if x == left or x == right:
        return False
    return orientation(left, x, right) > 0


def cyclic_sort_key(x: BoundaryPoint):
    # increasing along R, then infinity
    return (1, 0.0) if x.infinite else (0, float(x))


def is_cyclically_ordered(points: Iterable[BoundaryPoint]) -> bool:
    """Whether the points occur in positive cyclic order (every consecutive triple positive)."""
    pts = list(points)
    k = len(pts)
    if k < 3:
        return len(set(pts)) == k
    return all(orientation(pts[i], pts[(i + 1) % k], pts[(i + 2) % k]) > 0 for i in range(k))


# --------------------------------------------------------------------------
# Mobius matrices


@dataclass(frozen=True)
class MobiusElement:
    """2x2 rational matrix of determinant one acting by ``t -> (a t + b) / (c t + d)``."""

    a: Fraction
    b: Fraction
    c: Fraction
    d: Fraction

    def __post_init__(self):
        for k in "abcd":
            object.__setattr__(self, k, Fraction(getattr(self, k)))
        if self.a * self.d - self.b * self.c != 1:
            raise ValueError("Mobius matrix must have determinant one")

    @classmethod
    def identity(cls) -> "MobiusElement":
        return cls(1, 0, 0, 1)

    def __matmul__(self, o: "MobiusElement") -> "MobiusElement":
        return MobiusElement(self.a * o.a + self.b * o.c, self.a * o.b + self.b * o.d,
                             self.c * o.a + self.d * o.c, self.c * o.b + self.d * o.d)

    __mul__ = __matmul__

    def inverse(self) -> "MobiusElement":
        return MobiusElement(self.d, -self.b, -self.c, self.a)

    @property
    def trace(self) -> Fraction:
        return self.a + self.d

    def matrix(self) -> tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]:
        return ((self.a, self.b), (self.c, self.d))

    def equals_projectively(self, o: "MobiusElement") -> bool:
        return self == o or self == MobiusElement(-o.a, -o.b, -o.c, -o.d)

    def act(self, t: BoundaryPoint) -> BoundaryPoint:
        a, b, c, d = self.a, self.b, self.c, self.d
        if t.infinite:
            return BoundaryPoint.inf() if c == 0 else BoundaryPoint(a / c)
        # (a t + b) / (c t + d) with t = p + q sqrt(s)
        np_, nq = a * t.p + b, a * t.q
        dp, dq = c * t.p + d, c * t.q
        if dp == 0 and (dq == 0 or t.d == 1):
            return BoundaryPoint.inf()
        norm = dp * dp - dq * dq * t.d
        if norm == 0:
            return BoundaryPoint.inf()
        p = (np_ * dp - nq * dq * t.d) / norm
        q = (nq * dp - np_ * dq) / norm
        return BoundaryPoint(p, q, t.d)

    def __call__(self, t: BoundaryPoint) -> BoundaryPoint:
        return self.act(t)

    def classify(self) -> str:
        t = abs(self.trace)
        if t > 2:
            return "hyperbolic"
        if t == 2:
            return "identity" if self.b == 0 and self.c == 0 else "parabolic"
        return "elliptic"

    def hyperbolic_length(self) -> float:
        """Translation length ``2 arccosh(|tr| / 2)`` (float report only)."""
        return 2.0 * math.acosh(abs(float(self.trace)) / 2.0)

    def fixed_points(self) -> tuple[BoundaryPoint, BoundaryPoint]:
        """``(repelling, attracting)`` fixed points of a hyperbolic element."""
        if self.classify() != "hyperbolic":
            raise NotHyperbolic(f"{self} is not hyperbolic")
        a, b, c, d = self.a, self.b, self.c, self.d
        if c == 0:
            finite = BoundaryPoint(b / (d - a))
            # t -> a^2 t + a b: infinity attracts iff a^2 > 1
            return (finite, BoundaryPoint.inf()) if a * a > 1 else (BoundaryPoint.inf(), finite)
        disc = (a - d) ** 2 + 4 * b * c
        num, den = disc.numerator, disc.denominator
        s, k = _squarefree_part(num * den)
        # sqrt(disc) = k sqrt(s) / den
        root = Fraction(k, den)
        base = (a - d) / (2 * c)
        r1 = BoundaryPoint(base, root / (2 * c), s)
        r2 = BoundaryPoint(base, -root / (2 * c), s)
        return (r2, r1) if self._attracts(r1) else (r1, r2)

    def _attracts(self, t: BoundaryPoint) -> bool:
        # derivative 1/(ct+d)^2, attracting iff |ct+d| > 1
        vp, vq = self.c * t.p + self.d, self.c * t.q
        return sign_surd(vp - 1, vq, t.d) > 0 or sign_surd(vp + 1, vq, t.d) < 0

    def attracting(self) -> BoundaryPoint:
        return self.fixed_points()[1]

    def repelling(self) -> BoundaryPoint:
        return self.fixed_points()[0]

    def __str__(self):
        return f"[[{self.a}, {self.b}], [{self.c}, {self.d}]]"


C1 = MobiusElement(1, 2, 0, 1)
C2 = MobiusElement(1, 0, -2, 1)
C3 = (C2 @ C1).inverse()
GENERATORS = {"a": C1, "A": C1.inverse(), "b": C2, "B": C2.inverse()}


def evaluate_mobius(w: GroupWord | str) -> MobiusElement:
    if isinstance(w, str):
        w = GroupWord.parse(w)
    m = MobiusElement.identity()
    for ch in w.letters:
        m = m @ GENERATORS[ch]
    return m


def classify(m: MobiusElement) -> str:
    return m.classify()


def fixed_points(m: MobiusElement) -> tuple[BoundaryPoint, BoundaryPoint]:
    return m.fixed_points()


def axes_link(m1: MobiusElement, m2: MobiusElement) -> bool:
    """Whether the axes of two hyperbolic elements cross (endpoints strictly interleave)."""
    p, q = m1.fixed_points()
    r, s = m2.fixed_points()
    if len({p, q, r, s}) < 4:
        return False
    return in_interval(r, p, q) != in_interval(s, p, q)
