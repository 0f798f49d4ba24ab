from fractions import Fraction

from hypothesis import strategies as st

from hsjet.ratpoly import Poly, mono, var


def polys(bases=(1, 2), orders=(0, 1), max_deg=4, max_terms=5):
    """Hypothesis strategy for small exact polynomials."""
    variables = [var(b, o) for b in bases for o in orders]
    coeff = st.builds(Fraction, st.integers(-6, 6), st.integers(1, 4))
    monos = st.lists(st.sampled_from(variables), max_size=max_deg).map(mono)
    return st.dictionaries(monos, coeff, max_size=max_terms).map(Poly)


def base_polys(s=2, max_deg=4, max_terms=4):
    return polys(bases=tuple(range(1, s + 1)), orders=(0,), max_deg=max_deg, max_terms=max_terms)
