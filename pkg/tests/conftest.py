from fractions import Fraction

import pytest
from hypothesis import strategies as st

from mnvbench.algebra import GaussRational, RationalFn, SparsePoly
from mnvbench.solution import build_solution


@pytest.fixture(scope="session")
def bundle():
    return build_solution()


def u_direct(x, y, s):
    """The solution U typed straight from its closed form, in plain Fractions."""
    x, y, s = Fraction(x), Fraction(y), Fraction(s)
    q = (
        (x * x + y * y) ** 3
        + 3 * (x**4 + y**4)
        + 18 * x * x * y * y
        + 9 * (x * x + y * y)
        + 9 * s * s
        + (6 * x**3 - 18 * x * y * y - 18 * x) * s
    )
    return -3 * ((x * x + y * y + 3) * (x * x - y * y) - 6 * x * s) / q


def q_direct(x, y, s):
    x, y, s = Fraction(x), Fraction(y), Fraction(s)
    return (
        (x * x + y * y) ** 3
        + 3 * (x**4 + y**4)
        + 18 * x * x * y * y
        + 9 * (x * x + y * y)
        + 9 * s * s
        + (6 * x**3 - 18 * x * y * y - 18 * x) * s
    )


small_ints = st.integers(min_value=-4, max_value=4)
gauss = st.builds(lambda a, b: GaussRational(a, b), small_ints, small_ints)
exponent = st.integers(min_value=0, max_value=3)
monomial = st.tuples(exponent, exponent, exponent)


@st.composite
def polys(draw, max_terms=4, complex_coeffs=True):
    n = draw(st.integers(min_value=0, max_value=max_terms))
    terms = {}
    for _ in range(n):
        c = draw(gauss) if complex_coeffs else GaussRational(draw(small_ints))
        terms[draw(monomial)] = c
    return SparsePoly(terms)


@st.composite
def rational_fns(draw):
    num = draw(polys(max_terms=3))
    den = draw(polys(max_terms=3))
    if den.is_zero():
        den = SparsePoly.const(1)
    return RationalFn(num, den)


rationals = st.fractions(min_value=-3, max_value=3, max_denominator=7)
