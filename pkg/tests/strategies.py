"""Hypothesis strategies for group ring elements and characters."""

from fractions import Fraction

from hypothesis import strategies as st

from sigmakit import GF, QQ, ZZ, Character, GroupRingElem

RINGS = [ZZ, QQ, GF(5)]


def exponents(rank: int, spread: int = 3):
    return st.tuples(*[st.integers(-spread, spread) for _ in range(rank)])


def coefficients(ring):
    if ring.kind == "Q":
        return st.fractions(min_value=-5, max_value=5, max_denominator=4)
    return st.integers(-4, 4)


@st.composite
def elements(draw, rank: int = 1, ring=ZZ, max_terms: int = 4, spread: int = 3):
    terms = draw(st.dictionaries(exponents(rank, spread), coefficients(ring), max_size=max_terms))
    return GroupRingElem(terms, ring, rank)


@st.composite
def nonzero_elements(draw, rank: int = 1, ring=ZZ, max_terms: int = 4, spread: int = 3):
    x = draw(elements(rank, ring, max_terms, spread))
    if not x:
        x = GroupRingElem.monomial(draw(exponents(rank, spread)), 1, ring)
    return x


@st.composite
def characters(draw, rank: int = 1):
    coeffs = draw(st.lists(st.integers(-5, 5), min_size=rank, max_size=rank).filter(any))
    return Character(coeffs)


@st.composite
def rational_characters(draw, rank: int = 2):
    coeffs = draw(st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=5), min_size=rank, max_size=rank).filter(any))
    return Character([Fraction(c) for c in coeffs])
