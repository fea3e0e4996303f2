import random
from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given

from geokow import dynamics as dy
from geokow import kotter as kt
from geokow.algebra import symbols
from geokow.pencil import PencilSpec, kowalevski_spec, poly_P

from conftest import normalized_specs, to_sympy

SPEC = PencilSpec.parse("-2,0,3,-2,2,0")
GENERAL = PencilSpec.parse("-2,1/3,3,-2,2,2")


def cz(rng, spread=1.0):
    return complex(rng.uniform(-spread, spread), rng.uniform(-spread, spread))


def level(rng, spec=SPEC):
    efg = dy.efg_general(spec)
    while True:
        s = dy.level_state(efg, cz(rng), cz(rng), cz(rng))
        if abs(s.r) > 0.2 and abs(s.g) > 0.2 and abs(s.x1 - s.x2) > 0.1:
            return s


class TestIdentity:
    def test_examples(self):
        data, rep = kt.kotter_identity(SPEC)
        (s,) = symbols(("s",))
        assert (data.A0 - (2 * s + 6)).is_zero()
        assert (data.f - (2 * s ** 3 + 6 * s ** 2 + 2 * s + 2)).is_zero()
        assert rep.ok

    def test_normalization_required(self):
        with pytest.raises(ValueError, match="normalization required"):
            kt.kotter_identity(PencilSpec.parse("1,0,3,-2,2,0"))

    @given(normalized_specs)
    def test_identity_exact(self, spec):
        data, rep = kt.kotter_identity(spec)
        assert rep.identity and rep.expansion and rep.corollary_corrected

    @given(normalized_specs)
    def test_identity_sympy_oracle(self, spec):
        data = kt.kotter_polys(spec)
        expr = to_sympy(data.F) * to_sympy(data.A0) - to_sympy(data.A) ** 2 - to_sympy(data.f) * to_sympy(data.B)
        assert sp.expand(expr) == 0

    def test_unnormalized_expansion_and_quoted_corollary_fail(self):
        _, rep = kt.kotter_identity(SPEC)
        assert not rep.expansion_unnormalized
        assert not rep.corollary_quoted

    def test_pi_squared_exact(self, rng):
        data, _ = kt.kotter_identity(GENERAL)
        for _ in range(5):
            x1 = Fraction(rng.randint(-9, 9), rng.randint(1, 4))
            x2 = x1 + Fraction(rng.randint(1, 9), rng.randint(1, 4))
            assert kt.pi_squared_exact(data, x1, x2)


class TestWRoots:
    def test_vieta_and_equation(self, rng):
        F = kt.kotter_polys(GENERAL).F
        a_fn, b_fn, c_fn = (F.coeff("s", k).compile(("s", "x1", "x2")) for k in (2, 1, 0))
        for _ in range(20):
            x1, x2 = cz(rng), cz(rng)
            w1, w2 = kt.w_roots(x1, x2, GENERAL)
            a, b, c = (fn(0, x1, x2) for fn in (a_fn, b_fn, c_fn))
            assert w1 * w2 == pytest.approx(c / a, rel=1e-12, abs=1e-12)
            assert w1 + w2 == pytest.approx(-b / a, rel=1e-12, abs=1e-12)
            for w in (w1, w2):
                assert abs(a * w * w + b * w + c) < 1e-12 * (1 + abs(a * w * w) + abs(c))

    def test_discriminant_relation(self, rng):
        P = poly_P(GENERAL).compile(("x",))
        for _ in range(20):
            x1, x2 = cz(rng), cz(rng)
            w1, w2 = kt.w_roots(x1, x2, GENERAL)
            lhs = (w1 - w2) ** 2 * (x1 - x2) ** 4
            rhs = P(x1) * P(x2)
            assert abs(lhs - rhs) < 1e-10 * (1 + abs(lhs))

    def test_equal_points_rejected(self):
        with pytest.raises(ValueError, match="leading coefficient vanishes"):
            kt.w_roots(0.5, 0.5, SPEC)


class TestTrick:
    def test_constrained_samples(self, rng):
        for _ in range(30):
            rep = kt.kotter_trick_check(level(rng), SPEC)
            assert rep.residual < 1e-9

    def test_along_trajectory(self):
        rng = random.Random(9)
        s0 = level(rng)
        tr = dy.integrate(s0, dy.efg_general(SPEC), dy.AlphaBeta.named("kowalevski"), T=0.5)
        worst = max(kt.kotter_trick_check(tr.state(i), SPEC).residual for i in range(len(tr.t)))
        assert worst < 1e-8

    def test_symmetric_collapse(self):
        # e1 = e2 with x1 and x2 swapped gives the same bracket
        rng = random.Random(2)
        s = level(rng)
        rep = kt.kotter_trick_check(s, SPEC)
        swapped = dy.GenState(s.e2, s.e1, s.x2, s.x1, s.r, s.g)
        assert kt.kotter_trick_check(swapped, SPEC).residual == pytest.approx(rep.residual, abs=1e-12)

    def test_equal_points_rejected(self):
        with pytest.raises(ValueError):
            kt.kotter_trick_check(dy.GenState(1, 1, 0.5, 0.5, 1, 1), SPEC)


class TestDiagram:
    def test_paths_agree(self, rng):
        states = [level(rng) for _ in range(50)]
        rep = kt.commdiagram_check(states, SPEC)
        assert rep.checked + rep.skipped == 50 and rep.checked >= 45
        assert rep.ok(1e-8), rep.worst

    def test_zero_k(self, rng):
        efg = dy.efg_general(SPEC)
        for _ in range(5):
            x1, x2 = cz(rng), cz(rng)
            s = dy.level_state(efg, x1, x2, 0j)
            assert s.e1 * s.e2 == 0
            left, right = kt.diagram_paths(s, SPEC)
            assert left.distance(right) < 1e-8
            a, b = right.values
            assert abs(a - b) < 1e-8 * (1 + abs(a))

    def test_consistent_with_trick(self, rng):
        for _ in range(10):
            s = level(rng)
            left, right = kt.diagram_paths(s, SPEC)
            assert (left.distance(right) < 1e-8) == (kt.kotter_trick_check(s, SPEC).residual < 1e-9)


class TestPi:
    @pytest.mark.parametrize("spec", [SPEC, GENERAL], ids=["kowalevski-type", "general"])
    def test_derived_forms(self, spec, rng):
        data, _ = kt.kotter_identity(spec)
        for _ in range(20):
            x1, x2 = cz(rng), cz(rng)
            w1, w2 = kt.w_roots(x1, x2, spec)
            rep = kt.p_i_and_xyz(w1, w2, x1, x2, data)
            assert rep.ok(1e-10), rep

    def test_quoted_forms_reported(self, rng):
        data, _ = kt.kotter_identity(GENERAL)
        x1, x2 = cz(rng), cz(rng)
        w1, w2 = kt.w_roots(x1, x2, GENERAL)
        rep = kt.p_i_and_xyz(w1, w2, x1, x2, data)
        assert max(rep.quoted_match, rep.quoted_system_residual) > 1e-6

    def test_monic_fhat_has_roots_n(self):
        data, _ = kt.kotter_identity(GENERAL)
        fh = data.fhat_monic().compile(("x",))
        for n in data.n:
            assert abs(fh(n)) < 1e-10
        assert data.fhat_monic().degree("x") == 3

    def test_degenerate_spectrum(self):
        # a spectrum with fewer than three simple roots
        data, _ = kt.kotter_identity(SPEC)
        data.m = data.m[:2]
        with pytest.raises(ValueError, match="degenerate spectrum"):
            kt.p_i_and_xyz(0.1, 0.2, 0.3, 0.4, data)


class TestChangeOfVariables:
    def test_second_order(self):
        spec = kowalevski_spec(1, 1, 1, Fraction(1, 2))
        s0 = dy.level_state(dy.efg_general(spec), 0.3 + 0.2j, -0.5 + 0.1j, 0.7 + 0.1j)
        rep = kt.kow_change_check(s0, spec)
        lo, hi = rep.order_range
        assert not rep.branch_point
        assert 1.8 <= lo and hi <= 2.2, rep.orders

    def test_default_spec(self):
        s0 = dy.level_state(dy.efg_general(SPEC), 0.3 + 0.2j, -0.5 + 0.1j, 0.7 + 0.1j)
        assert kt.kow_change_check(s0, SPEC).ok()
