from fractions import Fraction

import pytest
from hypothesis import strategies as st

from negjacobi.gaussian import GaussianRational
from negjacobi.series import QZSeries

small = st.integers(-5, 5)


@st.composite
def gaussians(draw):
    return GaussianRational(Fraction(draw(small), draw(st.integers(1, 4))), draw(small))


@st.composite
def series(draw, prec=Fraction(6), unit=False):
    """Small series with q-exponents in (1/2)Z, zeta-exponents in (1/2)Z and finite prec."""
    terms = {}
    for _ in range(draw(st.integers(0, 6))):
        q = Fraction(draw(st.integers(0, 9)), 2)
        z = Fraction(draw(st.integers(-4, 4)), 2)
        terms[(q, z)] = draw(gaussians())
    if unit:
        terms = {k: v for k, v in terms.items() if k[0] > 0}
        terms[(Fraction(0), Fraction(draw(st.integers(-2, 2)), 2))] = GaussianRational(
            draw(st.integers(1, 3)), draw(small))
    return QZSeries(terms, prec)


@pytest.fixture
def q():
    return QZSeries.monomial(1, 1)


@pytest.fixture
def zeta():
    return QZSeries.monomial(1, 0, 1)
