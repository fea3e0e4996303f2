import random
from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from geokow.algebra import GaussianRational, MultiPoly
from geokow.pencil import PencilSpec

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def to_sympy(p: MultiPoly):
    """Independent sympy expression for a MultiPoly."""
    syms = sp.symbols(p.variables) if p.variables else ()
    if len(p.variables) == 1:
        syms = (syms,) if not isinstance(syms, tuple) else syms
    expr = 0
    for exps, c in p.terms.items():
        if isinstance(c, GaussianRational):
            coef = sp.Rational(c.re.numerator, c.re.denominator) + sp.I * sp.Rational(c.im.numerator, c.im.denominator)
        else:
            c = Fraction(c)
            coef = sp.Rational(c.numerator, c.denominator)
        term = coef
        for s, e in zip(syms, exps):
            term *= s ** e
        expr += term
    return sp.expand(expr)


def spec_sym(spec: PencilSpec):
    return [sp.Rational(Fraction(a).numerator, Fraction(a).denominator) for a in spec.as_tuple()]


small_rationals = st.fractions(min_value=-6, max_value=6, max_denominator=5)
specs = st.lists(small_rationals, min_size=6, max_size=6).map(lambda v: PencilSpec(*v))
normalized_specs = st.lists(small_rationals, min_size=5, max_size=5).map(lambda v: PencilSpec(-2, *v))


@pytest.fixture
def rng():
    return random.Random(20240611)
