import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geokow import dynamics as dy
from geokow.pencil import PencilSpec, kowalevski_spec

SPEC = PencilSpec.parse("-2,0,3,-2,2,0")
DATA = dy.efg_general(SPEC)
KOW = dy.AlphaBeta.named("kowalevski")


def cz(rng, spread=1.0):
    return complex(rng.uniform(-spread, spread), rng.uniform(-spread, spread))


def level(rng, data=DATA):
    while True:
        try:
            s = dy.level_state(data, cz(rng), cz(rng), cz(rng))
        except ZeroDivisionError:
            continue
        if abs(s.r) > 0.2 and abs(s.g) > 0.2:
            return s


class TestVectorField:
    def test_equal_e_gives_opposite_rates(self, rng):
        s = dy.random_state(rng)
        s = dy.GenState(s.e1, s.e1, s.x1, s.x2, s.r, s.g)
        d = dy.vector_field(s, DATA, KOW)
        al = KOW.alpha(s)
        assert d.e1 == pytest.approx(-al * s.e1)
        assert d.e2 == pytest.approx(al * s.e1)

    def test_fixed_x(self):
        # x1 = x2 and r x1 + c g = 0 freeze both x
        s = dy.GenState(1 + 0j, 2 + 0j, 0.5 + 0j, 0.5 + 0j, 2 + 0j, -1 + 0j)
        d = dy.vector_field(s, DATA, KOW)
        assert d.x1 == 0 and d.x2 == 0

    def test_singular_states_rejected(self):
        with pytest.raises(dy.SingularStateError):
            dy.vector_field(dy.GenState(1, 1, 1, 2, 0, 1), DATA, KOW)
        with pytest.raises(dy.SingularStateError):
            dy.vector_field(dy.GenState(1, 1, 1, 2, 1, 0), DATA, KOW)

    def test_unknown_choice(self):
        with pytest.raises(ValueError):
            dy.AlphaBeta.named("D")

    def test_quoted_form_only_known_sources(self, rng):
        s = dy.random_state(rng)
        assert isinstance(dy.vector_field(s, DATA, KOW, form="quoted"), dy.GenState)
        with pytest.raises(ValueError):
            dy.vector_field(s, DATA, KOW, form="other")


def test_first_integral_is_product(rng):
    s = dy.random_state(rng)
    assert dy.first_integrals(s, DATA).I_k2 == s.e1 * s.e2


def test_level_state_zeroes_residuals(rng):
    s = level(rng)
    vals = dy.first_integrals(s, DATA).as_tuple()
    assert max(abs(v) for v in vals[1:]) < 1e-12


def test_zero_time_trajectory(rng):
    s = level(rng)
    tr = dy.integrate(s, DATA, KOW, T=0.0)
    assert tr.states.shape == (1, 6) and tr.max_drift == 0.0


class TestConservation:
    @pytest.mark.parametrize("ab", [KOW, dy.AlphaBeta.named("A"), dy.AlphaBeta.named("B", k=2.0, k1=1.0)],
                             ids=["kowalevski", "A", "B-k2"])
    def test_balanced_choices_conserve(self, ab, rng):
        for _ in range(3):
            s = level(rng)
            try:
                tr = dy.integrate(s, DATA, ab, T=0.5)
            except dy.SingularStateError:
                continue
            assert tr.max_drift < 1e-8, tr.drift

    @pytest.mark.parametrize("tag", ["B", "C"])
    def test_unbalanced_choices_lose_third(self, tag):
        rng = random.Random(5)
        ab = dy.AlphaBeta.named(tag)
        s = level(rng)
        tr = dy.integrate(s, DATA, ab, T=0.5)
        assert tr.drift["3"] > 1e-6
        assert max(v for k, v in tr.drift.items() if k != "3") < 1e-8

    @given(st.floats(0.3, 2), st.floats(0.3, 2))
    @settings(max_examples=15)
    def test_third_rate_vanishes_iff_balanced(self, k, k1):
        rng = random.Random(1)
        s = level(rng)
        ab = dy.AlphaBeta.named("B", k=k, k1=k1)
        rate = dy.third_integral_rate(s, DATA, ab)
        balanced = abs(k - 2 * k1) < 1e-12
        assert (abs(rate) < 1e-9) == balanced or abs(k - 2 * k1) < 1e-3

    def test_custom_balanced_multipliers(self, rng):
        ab = dy.AlphaBeta.custom(lambda s: 2 * s.r * (s.x1 + 1), lambda s: s.x1 + 1)
        s = level(rng)
        assert abs(dy.third_integral_rate(s, DATA, ab)) < 1e-10


class TestLevelIdentities:
    def test_lemma(self):
        rep = dy.lemma_P_check(DATA)
        assert rep.ok and rep.matches_pencil_P

    def test_identity1(self, rng):
        for _ in range(20):
            s = level(rng)
            r, scale = dy.identity1_check(s, DATA)
            assert abs(r) / scale < 1e-10

    def test_dx_formulas(self, rng):
        for _ in range(20):
            s = level(rng)
            rep = dy.dx_formulas_check(s, DATA, KOW)
            assert max(abs(rep.residual1), abs(rep.residual2)) / rep.scale < 1e-10


class TestRigid:
    def test_round_trip(self, rng):
        s = dy.random_state(rng)
        back = dy.rigid_inverse(dy.rigid_map(s, 1.5), 1.5)
        assert np.allclose(back.as_array(), s.as_array(), atol=1e-13)

    def test_zero_c_rejected(self, rng):
        with pytest.raises(ValueError):
            dy.rigid_map(dy.random_state(rng), 0)

    def test_pushforward_matches_exact_closed_form(self, rng):
        data = dy.efg_general(kowalevski_spec(1, 1, 1, 0))
        for _ in range(10):
            rs = dy.rigid_map(dy.random_state(rng))
            push = dy.rigid_field_pushforward(rs, data, KOW).as_tuple()
            closed = dy.rigid_field_closed_form(rs.as_tuple(), lambda z: 1j * z[2], lambda z: 0.5j,
                                                quoted=False)
            assert np.allclose(push, closed, atol=1e-10)

    def test_k0_r_rate(self, rng):
        s = level(rng, dy.efg_k0())
        red = dy.k0_rigid_reduction(dy.rigid_map(s))
        assert red["r_dot"] == pytest.approx(red["r_dot_closed"], abs=1e-12)

    def test_k0_constant_gamma2_rate_is_not_reproduced(self, rng):
        # the c**2 g**2 relation forces a state-dependent rate, never the constant i c
        for _ in range(5):
            s = level(rng, dy.efg_k0())
            red = dy.k0_rigid_reduction(dy.rigid_map(s))
            assert abs(red["gamma2_dot"] - red["gamma2_dot_closed"]) > 1e-3

    def test_perturbed_r_rate_carries_full_a1(self, rng):
        a1 = Fraction(1, 3)
        data = dy.efg_perturbed(a1, 2)
        for _ in range(5):
            rs = dy.rigid_map(level(rng, data))
            red = dy.perturbed_rigid_reduction(rs, a1, 2)
            p, q, r, ga, ga1, ga2 = rs.as_tuple()
            assert red["r_dot"] == pytest.approx(2 * p * q + ga1 - float(a1) * q, abs=1e-12)
            assert abs(red["r_dot"] - red["r_dot_closed"]) > 1e-6


class TestMeasure:
    C, A1, A5 = Fraction(3, 2), Fraction(1, 3), Fraction(2)

    @pytest.mark.parametrize("name", ["kowalevski", "quadratic", "vertical"])
    def test_reference_pairs(self, name, rng):
        al, be = dy.measure_pairs()[name]
        assert dy.measure_condition(al, be, self.C, self.A1, self.A5).is_zero()
        pts = [[cz(rng) for _ in range(6)] for _ in range(5)]
        assert dy.measure_oracle_gap(al, be, pts, self.C, self.A1, self.A5) < 1e-9

    def test_linear_combination(self):
        pairs = dy.measure_pairs()
        w = (Fraction(2), Fraction(-1, 3), Fraction(5, 2))
        al = sum((wi * p[0] for wi, p in zip(w[1:], list(pairs.values())[1:])), w[0] * pairs["kowalevski"][0])
        be = sum((wi * p[1] for wi, p in zip(w[1:], list(pairs.values())[1:])), w[0] * pairs["kowalevski"][1])
        assert dy.measure_condition(al, be, self.C, self.A1, self.A5).is_zero()

    def test_constant_alpha_fails(self, rng):
        poly = dy.measure_condition(1, 0, self.C, self.A1, self.A5)
        assert not poly.is_zero()
        pts = [[cz(rng) for _ in range(6)] for _ in range(5)]
        assert dy.measure_oracle_gap(1, 0, pts, self.C, self.A1, self.A5) < 1e-8


class TestFamilies:
    def test_f2(self):
        rep = dy.f2_separability()
        assert rep.ok

    def test_k0_relation_conserved(self, rng):
        data = dy.efg_k0()
        s = level(rng, data)
        tr = dy.integrate(s, data, KOW, T=0.5)
        assert tr.max_drift < 1e-8
        rel = [abs(dy.k0_relation(tr.state(i)) - dy.k0_relation(s)) for i in range(len(tr.t))]
        assert max(rel) < 1e-8

    def test_perturbed(self):
        rep = dy.perturbed_separability(Fraction(1, 3), 2)
        assert rep.ok
        phi, P = dy.perturbed_phi_P(Fraction(1, 3), 2)
        assert phi.degree("s") == 3 and P.degree("x") == 3

    def test_perturbed_conservation(self, rng):
        data = dy.efg_perturbed(Fraction(1, 3), 2)
        tr = dy.integrate(level(rng, data), data, KOW, T=0.5)
        assert tr.max_drift < 1e-8

    @pytest.mark.parametrize("tau", [-1, 0, 1])
    def test_elastic(self, tau, rng):
        consts = (Fraction(1, 2), Fraction(1, 3), Fraction(1, 5))
        assert dy.elastic_check(tau, *consts).ok
        data = dy.elastic_efg(tau, *consts)
        tr = dy.integrate(level(rng, data), data, KOW, T=0.5)
        assert tr.max_drift < 1e-8

    def test_elastic_bad_tau(self):
        with pytest.raises(ValueError):
            dy.elastic_efg(2, 1, 1, 1)
