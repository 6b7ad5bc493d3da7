import random
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from sublevel.polyparse import Polynomial, PolynomialMap


def random_map(rng, n, m, degree, terms=4, coeff=5):
    """Random polynomial map with small integer coefficients and a nonconstant support."""
    while True:
        comps = []
        for _ in range(m):
            t = {}
            for _ in range(rng.randint(1, terms)):
                mono = tuple(rng.randint(0, degree) for _ in range(n))
                while sum(mono) > degree:
                    j = rng.randrange(n)
                    if mono[j]:
                        mono = mono[:j] + (mono[j] - 1,) + mono[j + 1:]
                c = rng.randint(-coeff, coeff) or 1
                t[mono] = c
            comps.append(Polynomial(t, n))
        f = PolynomialMap(tuple(comps))
        if any(any(m) for m in f.support()):
            return f


@st.composite
def polynomials(draw, n=2, degree=4, max_terms=5):
    k = draw(st.integers(0, max_terms))
    terms = {}
    for _ in range(k):
        mono = tuple(draw(st.integers(0, degree)) for _ in range(n))
        num = draw(st.integers(-9, 9))
        den = draw(st.integers(1, 5))
        terms[mono] = Fraction(num, den)
    return Polynomial(terms, n)


@pytest.fixture
def rng():
    return random.Random(20240611)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(results):
        terminalreporter.write_line(results[k])
