import random
from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from geokow import discrimsep as ds
from geokow.algebra import Moebius, symbols
from geokow.pencil import PencilSpec, pencil_F_darboux

from conftest import small_rationals, specs, to_sympy

VARS = ("s", "x1", "x2")
S, X1, X2 = symbols(VARS)
GENERIC = PencilSpec.parse("-2,1,3,1/2,5,2")
P2 = (S + X1 + X2) ** 2 - 4 * (S * X1 + X1 * X2 + X2 * S)


def product_form(rng):
    """Random F = f(s) g(x1) h(x2) + ... built to be separable:
    a pencil with random rational coefficients."""
    vals = [Fraction(rng.randint(-5, 5), rng.randint(1, 3)) for _ in range(6)]
    return pencil_F_darboux(PencilSpec(*vals)).F


def test_p2_is_strongly_separable():
    rep = ds.check_separable(P2)
    assert rep.verdict == "strongly"
    x = sp.Symbol("x1")
    assert to_sympy(rep.shapes["x1"]) == x


def test_pencil_is_symmetric():
    assert ds.check_separable(pencil_F_darboux(GENERIC).F).verdict == "symmetrically"


def test_weak_example():
    assert ds.check_separable(S ** 2 * X1 * X2 + 1).verdict == "weakly"


def test_non_separable():
    F = pencil_F_darboux(GENERIC).F + S * X1 ** 2 * X2 ** 2
    assert ds.check_separable(F).verdict == "not"


@given(specs)
def test_discriminants_reconstruct_from_factors(spec):
    rep = ds.check_separable(pencil_F_darboux(spec).F)
    for v, split in rep.splits.items():
        if split is not None:
            u, w = split
            assert (u * w - rep.discriminants[v]).is_zero()


@given(specs)
def test_half_discriminant_matches_sympy(spec):
    F = pencil_F_darboux(spec).F
    s = sp.Symbol("s")
    oracle = sp.discriminant(to_sympy(F), s) / 4
    assert sp.expand(to_sympy(ds.half_discriminant(F, "s")) - oracle) == 0


def test_rank_criteria_agree_with_verdict():
    rng = random.Random(11)
    for _ in range(200):
        F = product_form(rng)
        ok, _ = ds.rank1_criterion(F)
        assert ok == (ds.check_separable(F).verdict != "not") or ds.check_separable(F).degenerate
        bad = F + Fraction(rng.randint(1, 5)) * S * X1 ** 2 * X2
        ok_bad, _ = ds.rank1_criterion(bad)
        assert ok_bad == (ds.check_separable(bad).verdict != "not")


def test_rank2_criterion():
    assert ds.rank2_criterion(S ** 2 * X1 ** 2 + 2 * S * (X1 + X2) + X2 ** 2) == (False, 3)
    assert ds.rank2_criterion(S ** 2 * X1 ** 2 + 2 * S * X1 * X2 + X2 ** 2) == (False, 1)
    with pytest.raises(ValueError):
        ds.rank2_criterion(pencil_F_darboux(GENERIC).F)


@given(specs)
def test_transpose_is_involution_and_preserves_verdict(spec):
    F = pencil_F_darboux(spec).F
    T = ds.transpose(F)
    assert ds.transpose(T) == F
    assert (ds.check_separable(T).verdict == "not") == (ds.check_separable(F).verdict == "not")


@given(specs, st.tuples(small_rationals, small_rationals, small_rationals, small_rationals))
def test_moebius_closure_preserves_verdict(spec, abcd):
    m = Moebius(*abcd)
    if m.determinant == 0:
        return
    F = pencil_F_darboux(spec).F
    G = ds.moebius_closure(F, Moebius.identity(), m, Moebius.identity())
    assert (ds.check_separable(G).verdict == "not") == (ds.check_separable(F).verdict == "not")


def test_moebius_closure_examples():
    F = pencil_F_darboux(GENERIC).F
    ident = Moebius.identity()
    assert ds.moebius_closure(F, ident, ident, ident) == F
    shifted = ds.moebius_closure(F, ident, Moebius(1, 1, 0, 1), ident)
    assert ds.check_separable(shifted).verdict != "not"
    recip = ds.moebius_closure(F, Moebius(0, 1, 1, 0), ident, ident)
    assert recip == ds.transpose(F)
    with pytest.raises(ValueError, match="degenerate"):
        ds.moebius_closure(F, Moebius(1, 1, 1, 1), ident, ident)


class TestDifferential:
    def test_pencil_passes(self):
        rep = ds.differential_separability_check(pencil_F_darboux(GENERIC).F, 100, 1e-9, seed=3)
        assert rep.ok and rep.failed == 0

    def test_frozen_variable(self):
        rep = ds.differential_separability_check(pencil_F_darboux(GENERIC).F, 50, 1e-9, seed=4, frozen="s")
        assert rep.ok

    def test_not_applicable(self):
        rep = ds.differential_separability_check(S ** 2 * X1 ** 2 * X2 + S * X1 + X2 ** 2 * X1 * S, 10)
        assert not rep.applicable


class TestFamilyFit:
    @given(specs)
    def test_round_trip(self, spec):
        fit = ds.symmetric_family_fit(pencil_F_darboux(spec).F)
        assert fit.spec is not None and fit.spec.as_tuple() == spec.as_tuple()

    def test_wrong_leading_coefficient(self):
        with pytest.raises(ValueError, match="leading coefficient"):
            ds.symmetric_family_fit(pencil_F_darboux(GENERIC).F + S ** 2 * X1 * X2)

    def test_wrong_free_term(self):
        fit = ds.symmetric_family_fit(pencil_F_darboux(GENERIC).F + X1 * X2)
        assert fit.spec is None and "free term" in fit.reason


class TestSymmetrize:
    def test_identity_accepted(self):
        res = ds.symmetrize(pencil_F_darboux(GENERIC).F)
        assert res.alpha is not None and res.residual < 1e-8

    def test_recovers_after_closure(self):
        F = pencil_F_darboux(GENERIC).F
        G = ds.moebius_closure(F, Moebius.identity(), Moebius(2, 1, 1, 3), Moebius.identity())
        res = ds.symmetrize(G)
        assert res.alpha is not None and res.residual < 1e-8

    def test_rejects_non_separable(self):
        F = pencil_F_darboux(GENERIC).F + S * X1 ** 2 * X2 ** 2
        res = ds.symmetrize(F)
        assert res.alpha is None and res.diagnostics["reason"] == "not separable"
