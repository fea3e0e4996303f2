import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from geokow import twovalued as tv
from geokow.pencil import PencilSpec, curve_pair

from conftest import small_rationals

SPEC = PencilSpec.parse("-2,0,3,-2,2,0")


def cz(rng, spread=2.0):
    return complex(rng.uniform(-spread, spread), rng.uniform(-spread, spread))


class TestMultiVal:
    def test_order_free(self):
        assert tv.PairVal(1, 2).distance(tv.PairVal(2, 1)) == 0

    def test_infinity_matching(self):
        assert tv.PairVal(None, 1.0).distance(tv.PairVal(1.0, None)) == 0
        assert tv.PairVal(None, 1.0).distance(tv.PairVal(1.0, 1.0)) == float("inf")

    def test_exact_equality(self):
        assert tv.PairVal(Fraction(1, 3), 2).equals(tv.PairVal(2, Fraction(1, 3)))
        assert not tv.PairVal(Fraction(1, 3), 2).equals(tv.PairVal(2, Fraction(1, 4)))


class TestP2:
    def test_examples(self):
        assert tv.p2_mul(1, 1).equals(tv.PairVal(4, 0))
        assert tv.p2_mul(4, 1).equals(tv.PairVal(9, 1))

    @given(small_rationals)
    def test_unit(self, x):
        x = abs(x)
        out = tv.p2_mul(0, x)
        assert out.equals(tv.PairVal(x, x), 1e-12)

    @given(small_rationals, small_rationals)
    def test_products_are_roots_of_the_law(self, x, y):
        for z in tv.p2_mul(x, y):
            assert abs(tv.p2_poly(z, x, y)) < 1e-9 * (1 + abs(x) + abs(y)) ** 2

    @given(st.integers(0, 12), st.integers(0, 12), st.integers(0, 12))
    def test_associative_on_squares_exactly(self, a, b, c):
        left, right = tv.p2_assoc(a * a, b * b, c * c)
        assert left.equals(right)
        assert all(isinstance(v, Fraction) for v in left)

    def test_associative_numeric(self, rng):
        for _ in range(100):
            left, right = tv.p2_assoc(cz(rng, 3), cz(rng, 3), cz(rng, 3))
            assert left.distance(right) < 1e-10


class TestCoset:
    def test_two_torsion(self):
        curve = tv.Weierstrass(4, 0)
        assert curve.on_curve(tv.WPoint(1, 0)) and curve.on_curve(tv.WPoint(0, 0))
        out = tv.coset_mul(curve, tv.WPoint(1, 0), tv.WPoint(0, 0))
        assert out.equals(tv.PairVal(-1, -1))

    def test_square_contains_identity(self, rng):
        curve = tv.Weierstrass(cz(rng), cz(rng))
        P = curve.random_point(rng)
        assert any(v is None for v in tv.coset_mul(curve, P, P))

    def test_unit_in_a_slot(self, rng):
        curve = tv.Weierstrass(cz(rng), cz(rng))
        P = curve.random_point(rng)
        assert tv.coset_mul(curve, tv.INFINITY, P).equals(tv.PairVal(P.s, P.s))
        assert tv.coset_mul(curve, P, tv.INFINITY).equals(tv.PairVal(P.s, P.s))
        assert tv.coset_unit_inv_check(curve, P).ok

    def test_closed_form_matches_group_law(self):
        rng = random.Random(7)
        curve = tv.Weierstrass(cz(rng), cz(rng))
        for _ in range(200):
            P, Q = curve.random_point(rng), curve.random_point(rng)
            assert tv.coset_mul(curve, P, Q).distance(tv.coset_mul_group_law(curve, P, Q)) < 1e-10

    def test_associativity(self):
        rng = random.Random(8)
        curve = tv.Weierstrass(cz(rng), cz(rng))
        for _ in range(100):
            rep = tv.assoc_check(curve, *(curve.random_point(rng) for _ in range(3)))
            assert rep.ok(1e-8), (rep.distance, rep.oracle_distance)

    def test_random_points_on_curve(self, rng):
        curve = tv.Weierstrass(cz(rng), cz(rng))
        for _ in range(20):
            P = curve.random_point(rng)
            assert curve.on_curve(P)
            assert curve.on_curve(curve.add(P, curve.random_point(rng)), 1e-8)

    def test_neg_fixes_s(self, rng):
        curve = tv.Weierstrass(cz(rng), cz(rng))
        P = curve.random_point(rng)
        assert P.neg().s == P.s and P.neg().t == -P.t
        assert tv.INFINITY.neg() is tv.INFINITY


class TestPencilAction:
    def setup_method(self):
        self.cp = curve_pair(SPEC)
        self.roots = tv.PencilRoots(SPEC)
        self.W = tv.weierstrass_of(self.cp)

    def test_unit_gives_double_partner(self):
        act = tv.pencil_action(tv.INFINITY, 0.7 + 0.1j, self.cp, self.roots)
        assert act.darboux.equals(tv.PairVal(0.7 + 0.1j, 0.7 + 0.1j))

    def test_matches_coset_product(self, rng):
        for _ in range(50):
            P = self.W.random_point(rng)
            x = cz(rng)
            act = tv.pencil_action(P, x, self.cp, self.roots)
            X = self.cp.psi_inverse(x)
            assert act.canonical.distance(tv.coset_mul(self.W, P, self.W.lift(X)[0])) < 1e-8
            assert act.canonical.distance(act.formula) < 1e-8
            assert act.partner_residual < 1e-10

    def test_tabulated_layout_is_scaled(self, rng):
        P = self.W.random_point(rng)
        X = cz(rng)
        g2, g3 = self.W.g2, self.W.g3
        T, V, W = tv.canonical_TVW(P.s, X, g2, g3)
        Tp, Vp, Wp = tv.quoted_TVW(2 * P.s, X, g2, g3)
        for a, b in ((T, Tp), (V, Vp), (W, Wp)):
            assert b == pytest.approx(-4 * a, rel=1e-12, abs=1e-12)


class TestPoncelet:
    def setup_method(self):
        self.cp = curve_pair(SPEC)

    def test_closure_for_compatible_triple(self):
        rng = random.Random(4)
        s1, s2 = cz(rng), cz(rng)
        for which in (0, 1):
            s3 = tv.compatible_third(self.cp, s1, s2, which)
            reps, spread = tv.poncelet_scan(SPEC, s1, s2, s3, [cz(rng) for _ in range(20)])
            good = [r.defect for r in reps if not r.degenerate]
            assert len(good) >= 15
            assert max(good) < 1e-7 and spread < 1e-7

    def test_negative_control(self):
        rng = random.Random(4)
        s1, s2 = cz(rng), cz(rng)
        s3 = tv.compatible_third(self.cp, s1, s2) + 0.5
        reps, _ = tv.poncelet_scan(SPEC, s1, s2, s3, [cz(rng) for _ in range(20)])
        good = sorted(r.defect for r in reps if not r.degenerate)
        assert good[len(good) // 2] > 1e-3

    def test_branch_start_flagged(self):
        s1, s2 = 0.3 + 0.1j, -0.7 + 0.4j
        s3 = tv.compatible_third(self.cp, s1, s2)
        rep = tv.poncelet_triangle(tv.PonceletConfig(SPEC, s1, s2, s3, self.cp.P_roots[0]))
        assert rep.degenerate and "zero of P" in rep.reason
