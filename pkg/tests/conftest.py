import os
import sys
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from lamina.valued import FieldParams

settings.register_profile(
    "default", max_examples=int(os.environ.get("LAMINA_EXAMPLES", "40")), deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

Q0 = FieldParams.from_alpha("0")
QUARTER = FieldParams.from_alpha("1/4")
SURD = FieldParams.from_alpha("sqrt(2)-1")


@pytest.fixture
def q0():
    return Q0


def small_fractions(max_den=4, bound=6):
    return st.builds(Fraction, st.integers(-bound * max_den, bound * max_den),
                     st.integers(1, max_den))


def exponents(field, bound=4):
    """Raw exponent ``a + b alpha`` with small integer-over-2 parts."""
    return st.builds(lambda a, b: field.raw(Fraction(a, 2), Fraction(b, 2)),
                     st.integers(-2 * bound, 2 * bound), st.integers(-2, 2))


def polynomials(field, max_terms=4, allow_zero=True):
    """Exact finite series with small rational coefficients."""
    term = st.tuples(st.builds(lambda a, b: (Fraction(a, 2), Fraction(b, 2)),
                               st.integers(-6, 6), st.integers(-2, 2)),
                     small_fractions().filter(bool))

    def build(ts):
        out = field.zero
        for (a, b), c in ts:
            out = out + field.monomial(c, a, b)
        return out

    s = st.lists(term, min_size=0 if allow_zero else 1, max_size=max_terms).map(build)
    if not allow_zero:
        s = s.filter(lambda z: not z.is_zero())
    return s


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(results[n])
