import random
from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given

from geokow.algebra import det, discriminant, discriminant_half, symbols
from geokow.pencil import (PencilSpec, curve_pair, darboux_forward, darboux_inverse, jacobi_identity_check,
                           kowalevski_fundamental_check, kowalevski_params, kowalevski_spec, pencil_F_darboux,
                           pencil_F_xyz, pencil_matrix, poly_J, poly_P, tabulated_H, tabulated_K)
from geokow.pencil import differential_ratio

from conftest import spec_sym, specs, to_sympy

KOW = PencilSpec.parse("-2,0,3,-2,2,0")
GENERIC = PencilSpec.parse("-2,1,3,1/2,5,2")


def sympy_pencil(spec):
    a0, a1, a2, a3, a4, a5 = spec_sym(spec)
    s, x1, x2 = sp.symbols("s x1 x2")
    z = [1, (x1 + x2) / 2, x1 * x2]
    M = sp.Matrix([[0, *z], [z[0], a0, a1, a5 - 2 * s], [z[1], a1, a2 + s, a3], [z[2], a5 - 2 * s, a3, a4]])
    return sp.expand(M.det())


@given(specs)
def test_F_matches_independent_determinant(spec):
    assert sp.expand(to_sympy(pencil_F_darboux(spec).F) - sympy_pencil(spec)) == 0


@given(specs)
def test_F_structure(spec):
    polys = pencil_F_darboux(spec)
    x1, x2 = symbols(("x1", "x2"))
    assert polys.L == ((x1 - x2) ** 2).align(polys.L.variables)
    assert polys.K.coeff("x1", 2).coeff("x2", 2).constant_value() == -spec.a0
    assert polys.H == polys.H.swap("x1", "x2")
    assert polys.K == polys.K.swap("x1", "x2")
    assert polys.F == polys.F.swap("x1", "x2")
    assert polys.K == tabulated_K(spec).align(polys.K.variables)
    assert polys.H == tabulated_H(spec, "determinant").align(polys.H.variables)


def test_literal_H_grouping_differs():
    assert tabulated_H(GENERIC, "literal") != tabulated_H(GENERIC, "determinant")


@given(specs)
def test_discriminants_separate_variables(spec):
    F = pencil_F_darboux(spec).F
    P1, P2, J = poly_P(spec, "x1"), poly_P(spec, "x2"), poly_J(spec)
    assert discriminant(F, "s") == (P1 * P2).align(discriminant(F, "s").variables)
    assert (discriminant_half(F, "x2") + J * P1 / 4).is_zero()
    assert (discriminant_half(F, "x1") + J * P2 / 4).is_zero()


def test_discriminants_against_sympy():
    F = sympy_pencil(GENERIC)
    s, x1, x2, x = sp.symbols("s x1 x2 x")
    P = to_sympy(poly_P(GENERIC))
    J = to_sympy(poly_J(GENERIC))
    assert sp.expand(sp.discriminant(F, s) - P.subs(x, x1) * P.subs(x, x2)) == 0
    assert sp.expand(sp.discriminant(F, x2) + J * P.subs(x, x1)) == 0


def test_P_and_J_examples():
    x, s = sp.symbols("x s")
    assert to_sympy(poly_P(KOW)) == sp.expand(-2 * x ** 4 + 12 * x ** 2 + 8 * x + 2)
    assert to_sympy(poly_J(KOW)) == sp.expand(-4 * s ** 3 - 12 * s ** 2 - 4 * s - 4)
    zero = PencilSpec(0, 0, 0, 0, 0, 0)
    assert poly_P(zero).is_zero()
    # the s**3 term of J comes from C2 alone and survives
    assert to_sympy(poly_J(zero)) == -4 * s ** 3


@given(specs)
def test_J_leading_coefficient(spec):
    J = poly_J(spec)
    assert J.coeff("s", 3).constant_value() == -4


def test_pencil_matrix_and_xyz():
    m = pencil_matrix(KOW)
    s, = symbols(("s",))
    assert (m[1, 3] - (-2 * s)).is_zero()
    F = pencil_F_xyz(GENERIC)
    assert F.subs({"z1": 0, "z2": 0, "z3": 0}).is_zero()
    assert F.degree("s") == 2
    assert det(m.transpose()) == det(m)


class TestDarboux:
    def test_examples(self):
        assert darboux_forward((1, 0, -1)).as_set() == {Fraction(1), Fraction(-1)}
        assert darboux_forward((1, Fraction(5, 2), 6)).as_set() == {Fraction(2), Fraction(3)}
        assert darboux_inverse(1, -1) == (1, 0, -1)
        assert darboux_inverse(Fraction(3), Fraction(3)) == (1, 3, 9)

    def test_line_at_infinity(self):
        with pytest.raises(ValueError, match="line at infinity"):
            darboux_forward((0, 1, 1))

    @given(specs)
    def test_round_trip(self, spec):
        x1, x2 = spec.a1, spec.a2
        z = darboux_inverse(x1, x2)
        assert darboux_forward(z).as_set() == {x1, x2}
        assert (x1 - x2) ** 2 == 4 * (z[1] ** 2 - z[0] * z[2])


class TestJacobi:
    @given(specs)
    def test_identity_holds(self, spec):
        rep = jacobi_identity_check(spec)
        assert rep.holds and rep.corner_is_J and rep.full_is_P_gap and rep.polar_form_ok

    def test_polar_gap_sign(self):
        assert jacobi_identity_check(GENERIC).polar_discriminant_sign == -1

    def test_degenerate_pencil(self):
        assert jacobi_identity_check(PencilSpec(0, 0, 1, 0, 0, -Fraction(1, 2))).holds


class TestCurvePair:
    def test_canonical_form(self):
        cp = curve_pair(GENERIC)
        s, m = sp.symbols("s m")
        J = to_sympy(poly_J(GENERIC))
        g2, g3 = sp.Rational(str(cp.g2)), sp.Rational(str(cp.g3))
        assert sp.expand(J.subs(s, cp.shift + cp.scale * m) - (4 * m ** 3 - g2 * m - g3)) == 0
        assert (cp.g2, cp.g3) == (Fraction(28, 3), Fraction(2563, 54))

    def test_branch_points_map_to_zeros_of_P(self):
        cp = curve_pair(GENERIC)
        assert cp.psi(None) is not None
        images = [cp.psi(r) for r in cp.canonical_roots] + [cp.psi(None)]
        for z in images:
            assert min(abs(z - r) for r in cp.P_roots) < 1e-9

    def test_differential_pushforward(self):
        cp = curve_pair(GENERIC)
        rng = random.Random(5)
        ratios = [differential_ratio(cp, complex(rng.uniform(-2, 2), rng.uniform(-2, 2))) for _ in range(10)]
        ref = ratios[0]
        for r in ratios:
            assert min(abs(r - ref), abs(r + ref)) < 1e-10 * abs(ref)

    def test_non_simple_spectrum(self):
        with pytest.raises(ValueError):
            curve_pair(PencilSpec(0, 0, 1, 0, 0, -Fraction(1, 2)))


class TestKowalevski:
    def test_dictionary(self):
        assert kowalevski_spec(1, 1, 1, 0).as_tuple() == KOW.as_tuple()

    def test_round_trip(self):
        kp = kowalevski_params(KOW)
        back = kowalevski_spec(kp.l1, kp.l, kp.c, k_squared=kp.k_squared)
        assert max(abs(complex(a) - complex(b)) for a, b in zip(back.as_tuple(), KOW.as_tuple())) < 1e-12

    def test_errors(self):
        with pytest.raises(ValueError, match="not of Kowalevski type"):
            kowalevski_params(GENERIC)

    def test_fundamental_equation(self):
        rep = kowalevski_fundamental_check()
        assert rep.pencil_equals_Q and rep.leading_is_gap_square and rep.shifted_form_ok
