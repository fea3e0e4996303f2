"""Generalized Kowalevski-type system, its integrals, and rigid-body coordinates.

The state is ``(e1, e2, x1, x2, r, g)``.  A system is fixed by three
symmetric polynomials ``Ehat, Fhat, Ghat`` in ``(x1, x2)``, a constant ``c``
and a choice of multipliers ``alpha, beta``.  The level relations are

    r**2   = e1 + e2 + Ehat
    c r g  = Fhat - x2 e1 - x1 e2
    c**2 g**2 = x2**2 e1 + x1**2 e2 + Ghat

and ``k**2 = e1 e2``.  The ``e`` and ``x`` equations are fixed; ``r`` and
``g`` follow from differentiating the first and third relation.
"""
from __future__ import annotations

import cmath
import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import solve_ivp

from .algebra import I, MultiPoly, symbols, to_exact
from .discrimsep import check_separable, half_discriminant
from .pencil import PencilSpec, poly_P

log = logging.getLogger(__name__)

XV = ("x1", "x2")
SXV = ("s", "x1", "x2")
RIGID_VARS = ("p", "q", "r", "gamma", "gamma1", "gamma2")


class SingularStateError(ArithmeticError):
    """Raised when ``r``, ``g`` (or ``gamma2``) vanish where the field divides by them."""

    def __init__(self, message, state=None, t=None):
        super().__init__(message)
        self.state = state
        self.t = t


class IntegrationError(RuntimeError):
    def __init__(self, message, state=None, t=None):
        super().__init__(message)
        self.state = state
        self.t = t


# states


@dataclass(frozen=True)
class GenState:
    e1: complex
    e2: complex
    x1: complex
    x2: complex
    r: complex
    g: complex

    def as_array(self) -> np.ndarray:
        return np.array([self.e1, self.e2, self.x1, self.x2, self.r, self.g], dtype=complex)

    @classmethod
    def from_array(cls, y) -> "GenState":
        return cls(*(complex(v) for v in y))

    def __iter__(self):
        return iter((self.e1, self.e2, self.x1, self.x2, self.r, self.g))


@dataclass(frozen=True)
class RigidState:
    p: complex
    q: complex
    r: complex
    gamma: complex
    gamma1: complex
    gamma2: complex

    def as_tuple(self):
        return (self.p, self.q, self.r, self.gamma, self.gamma1, self.gamma2)


@dataclass(frozen=True)
class IntegralValues:
    """Residuals of the four level relations; all constant along the flow."""

    I_k2: complex
    I_2: complex
    I_3: complex
    I_4: complex

    def as_tuple(self):
        return (self.I_k2, self.I_2, self.I_3, self.I_4)

    NAMES = ("k2", "2", "3", "4")


# multipliers


@dataclass(frozen=True)
class AlphaBeta:
    """Multipliers ``alpha(state)``, ``beta(state)``.

    ``kowalevski``: ``alpha = i r``, ``beta = i/2``.
    ``A``: ``alpha = k r**2``, ``beta = k r / 2``.
    ``B``: ``alpha = k r g``, ``beta = k1 g``.
    ``C``: ``alpha = k r**2 g``, ``beta = k1 g``.
    """

    tag: str
    k: complex = 1.0
    k1: complex = 1.0
    alpha_fn: Optional[Callable[[GenState], complex]] = None
    beta_fn: Optional[Callable[[GenState], complex]] = None

    @classmethod
    def named(cls, tag: str, k=1.0, k1=1.0) -> "AlphaBeta":
        tag = tag.lower() if tag.lower() == "kowalevski" else tag.upper()
        if tag not in ("kowalevski", "A", "B", "C"):
            raise ValueError(f"unknown alpha/beta choice {tag!r}")
        return cls(tag, k, k1)

    @classmethod
    def custom(cls, alpha_fn, beta_fn) -> "AlphaBeta":
        return cls("custom", alpha_fn=alpha_fn, beta_fn=beta_fn)

    def alpha(self, s: GenState) -> complex:
        t = self.tag
        if t == "kowalevski":
            return 1j * s.r
        if t == "A":
            return self.k * s.r ** 2
        if t == "B":
            return self.k * s.r * s.g
        if t == "C":
            return self.k * s.r ** 2 * s.g
        return self.alpha_fn(s)

    def beta(self, s: GenState) -> complex:
        t = self.tag
        if t == "kowalevski":
            return 0.5j
        if t == "A":
            return self.k * s.r / 2
        if t in ("B", "C"):
            return self.k1 * s.g
        return self.beta_fn(s)

    def balanced(self) -> Optional[bool]:
        """Whether ``alpha == 2 r beta`` identically (known tags only)."""
        if self.tag in ("kowalevski", "A"):
            return True
        if self.tag == "B":
            return self.k == 2 * self.k1
        if self.tag == "C":
            return False
        return None


# polynomial data


@dataclass
class EFGSpec:
    Ehat: MultiPoly
    Fhat: MultiPoly
    Ghat: MultiPoly
    K: Fraction
    source: str
    params: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        self.Ehat = self.Ehat.align(XV)
        self.Fhat = self.Fhat.align(XV)
        self.Ghat = self.Ghat.align(XV)
        polys = {
            "E": self.Ehat, "E1": self.Ehat.diff("x1"), "E2": self.Ehat.diff("x2"),
            "F": self.Fhat, "F1": self.Fhat.diff("x1"), "F2": self.Fhat.diff("x2"),
            "G": self.Ghat, "G1": self.Ghat.diff("x1"), "G2": self.Ghat.diff("x2"),
        }
        self._fn = {k: p.compile(XV) for k, p in polys.items()}
        self._P = self.P_lemma("x").compile(("x",))

    def fn(self, name: str, x1, x2):
        return self._fn[name](x1, x2)

    def P_lemma(self, var: str = "x") -> MultiPoly:
        """``Ehat x**2 + 2 Fhat x + Ghat`` at ``x1 = x``; independent of ``x2`` for valid data."""
        x1 = MultiPoly.var("x1", XV)
        p = self.Ehat * x1 ** 2 + 2 * self.Fhat * x1 + self.Ghat
        if "x2" in p.used_variables():
            raise ValueError("P depends on x2")
        return p.align(("x1",)).rename({"x1": var})

    def P_value(self, x):
        return self._P(x)

    def R(self) -> MultiPoly:
        x1, x2 = symbols(XV)
        return self.Ehat * x1 * x2 + self.Fhat * (x1 + x2) + self.Ghat

    def R1(self) -> MultiPoly:
        return self.Ehat * self.Ghat - self.Fhat ** 2

    def pencil_F(self) -> MultiPoly:
        """``(x1 - x2)**2 s**2 - 2 R s - R1``."""
        s, x1, x2 = symbols(SXV)
        return ((x1 - x2) ** 2 * s ** 2 - 2 * self.R() * s - self.R1()).align(SXV)


def efg_general(spec: PencilSpec, K=1) -> EFGSpec:
    a0, a1, a2, a3, a4, a5 = spec.as_tuple()
    K = to_exact(K)
    x1, x2 = symbols(XV)
    E = -a0 * a2 - K * (x1 + x2) ** 2 - 2 * a1 * (x1 + x2)
    F = a0 * a3 / 2 + K * x1 * x2 * (x1 + x2) + a5 / 2 * (x1 + x2) + a1 * x1 * x2
    G = -a0 * a4 / 4 - K * x1 ** 2 * x2 ** 2 - a5 * x1 * x2
    return EFGSpec(E, F, G, K, "general", {"spec": spec, "a1": a1, "a5": a5})


def efg_k0() -> EFGSpec:
    return EFGSpec(MultiPoly.const(0, XV), MultiPoly.const(1, XV), MultiPoly.const(0, XV),
                   Fraction(0), "k0", {"a1": Fraction(0), "a5": Fraction(0)})


def efg_perturbed(a1, a5, k1=0, k2=1, k3=0) -> EFGSpec:
    a1, a5, k1, k2, k3 = (to_exact(v) for v in (a1, a5, k1, k2, k3))
    x1, x2 = symbols(XV)
    E = k1 - 2 * a1 * (x1 + x2)
    F = k2 + a5 / 2 * (x1 + x2) + a1 * x1 * x2
    G = k3 - a5 * x1 * x2
    return EFGSpec(E, F, G, Fraction(0), "perturbed",
                   {"a1": a1, "a5": a5, "k1": k1, "k2": k2, "k3": k3})


def _as_efg(data) -> EFGSpec:
    if isinstance(data, EFGSpec):
        return data
    if isinstance(data, PencilSpec):
        return efg_general(data)
    raise TypeError("expected EFGSpec or PencilSpec")


# vector field and integrals


def _check_state(s: GenState):
    if s.r == 0:
        raise SingularStateError("r = 0: singular state", s)
    if s.g == 0:
        raise SingularStateError("g = 0: singular state", s)


def vector_field(state: GenState, data, ab: AlphaBeta, c=1.0, form: str = "derived") -> GenState:
    """Time derivative of the state.

    ``form="derived"`` takes ``r'`` and ``g'`` from the level relations, so
    ``k**2``, the ``r**2`` and the ``g**2`` relations are conserved for any
    multipliers.  ``form="quoted"`` uses the frequently quoted closed forms
    of ``r'`` and ``g'``; it is kept for comparison.
    """
    efg = _as_efg(data)
    _check_state(state)
    e1, e2, x1, x2, r, g = state
    al, be = ab.alpha(state), ab.beta(state)
    de1 = -al * e1
    de2 = al * e2
    dx1 = -be * (r * x1 + c * g)
    dx2 = be * (r * x2 + c * g)
    lam = 2 * r * be - al
    if form == "derived":
        dE = efg.fn("E1", x1, x2) * dx1 + efg.fn("E2", x1, x2) * dx2
        dG = efg.fn("G1", x1, x2) * dx1 + efg.fn("G2", x1, x2) * dx2
        dr = (al * (e2 - e1) + dE) / (2 * r)
        dg = (lam * (e1 * x2 ** 2 - e2 * x1 ** 2) + 2 * be * c * g * (x2 * e1 - x1 * e2) + dG) / (2 * c * c * g)
    elif form == "quoted":
        dr, dg = _quoted_rg(efg, state, al, be, c)
    else:
        raise ValueError(f"unknown form {form!r}")
    return GenState(de1, de2, dx1, dx2, dr, dg)


def _quoted_rg(efg: EFGSpec, state: GenState, al, be, c):
    e1, e2, x1, x2, r, g = state
    a1 = complex(efg.params.get("a1", 0))
    a5 = complex(efg.params.get("a5", 0))
    lam_term = (2 * r * be - al) / (2 * c * c * g) * (e1 * x2 ** 2 - e2 * x1 ** 2)
    if efg.source == "general":
        dr = -be * (x2 - x1) * (x1 + x2 + a1) - al / (2 * r) * (e1 - e2)
        dg = be / (2 * c) * ((x2 - x1) * (x1 * x2 - a5) + e1 * x2 - e2 * x1) + lam_term
    elif efg.source == "k0":
        dr = -al / (2 * r) * (e1 - e2)
        dg = 2 * be * c + lam_term
    elif efg.source == "perturbed":
        dr = -al / (2 * r) * (e1 - e2) - a1 / 2 * be * (x2 - x1)
        dg = 2 * be * c + lam_term + a5 / 2 * c * be * (x2 - x1)
    else:
        raise ValueError(f"no closed form recorded for source {efg.source!r}")
    return dr, dg


def first_integrals(state: GenState, data, c=1.0) -> IntegralValues:
    efg = _as_efg(data)
    e1, e2, x1, x2, r, g = state
    return IntegralValues(
        e1 * e2,
        r * r - e1 - e2 - efg.fn("E", x1, x2),
        c * r * g + x2 * e1 + x1 * e2 - efg.fn("F", x1, x2),
        c * c * g * g - x2 ** 2 * e1 - x1 ** 2 * e2 - efg.fn("G", x1, x2),
    )


def third_integral_rate(state: GenState, data, ab: AlphaBeta, c=1.0) -> complex:
    """``d/dt`` of the ``c r g`` relation under the derived field.

    Equals ``(alpha - 2 r beta) * S / (2 c g r)`` with ``S`` collecting the
    level residuals; zero whenever ``alpha = 2 r beta``.
    """
    efg = _as_efg(data)
    d = vector_field(state, efg, ab, c)
    e1, e2, x1, x2, r, g = state
    return (c * (d.r * g + r * d.g) + d.x2 * e1 + x2 * d.e1 + d.x1 * e2 + x1 * d.e2
            - efg.fn("F1", x1, x2) * d.x1 - efg.fn("F2", x1, x2) * d.x2)


# integration


@dataclass
class Trajectory:
    t: np.ndarray
    states: np.ndarray  # shape (n, 6)
    integrals: np.ndarray  # shape (n, 4)
    drift: Dict[str, float]
    nfev: int = 0

    @property
    def max_drift(self) -> float:
        return max(self.drift.values()) if self.drift else 0.0

    def state(self, i: int) -> GenState:
        return GenState.from_array(self.states[i])


def relative_drift(values: np.ndarray) -> np.ndarray:
    """Per-column ``max |I(t) - I(0)| / max(1, |I(0)|)``."""
    base = values[0]
    return np.max(np.abs(values - base), axis=0) / np.maximum(1.0, np.abs(base))


def integrate(state0: GenState, data, ab: AlphaBeta, T: float = 1.0, rtol: float = 1e-10,
              atol: float = 1e-12, c=1.0, t_eval: Optional[Sequence[float]] = None,
              form: str = "derived", singular_tol: float = 1e-12) -> Trajectory:
    """Adaptive integration in complex arithmetic with a conservation report."""
    efg = _as_efg(data)
    _check_state(state0)
    y0 = state0.as_array()
    scale = max(1.0, float(np.max(np.abs(y0))))
    if T == 0:
        ts = np.array([0.0])
        ys = y0[None, :]
    else:
        def rhs(t, y):
            return vector_field(GenState.from_array(y), efg, ab, c, form).as_array()

        def near_r(t, y):
            return abs(y[4]) - singular_tol * scale

        def near_g(t, y):
            return abs(y[5]) - singular_tol * scale

        near_r.terminal = near_g.terminal = True
        if t_eval is None:
            t_eval = np.linspace(0.0, T, 11)
        try:
            sol = solve_ivp(rhs, (0.0, T), y0, method="DOP853", rtol=rtol, atol=atol,
                            t_eval=np.asarray(t_eval, dtype=float), events=(near_r, near_g))
        except SingularStateError as exc:
            raise SingularStateError(str(exc), exc.state) from None
        if sol.status == 1:
            t_hit = min(float(ev[0]) for ev in sol.t_events if ev.size)
            last = GenState.from_array(sol.y[:, -1]) if sol.y.size else state0
            raise SingularStateError("trajectory reached the singular set", last, t_hit)
        if sol.status != 0:
            last = GenState.from_array(sol.y[:, -1]) if sol.y.size else state0
            raise IntegrationError(f"integration failed: {sol.message}", last,
                                   float(sol.t[-1]) if sol.t.size else 0.0)
        ts, ys = sol.t, sol.y.T
        nfev = sol.nfev
    ints = np.array([first_integrals(GenState.from_array(y), efg, c).as_tuple() for y in ys])
    dr = relative_drift(ints)
    drift = dict(zip(IntegralValues.NAMES, (float(v) for v in dr)))
    return Trajectory(np.asarray(ts), np.asarray(ys), ints, drift, nfev if T else 0)


def random_state(rng: random.Random, spread: float = 1.0, min_abs: float = 0.2) -> GenState:
    """Complex state with ``|r|, |g| >= min_abs``."""
    def z():
        return complex(rng.uniform(-spread, spread), rng.uniform(-spread, spread))

    vals = [z() for _ in range(6)]
    for i in (4, 5):
        while abs(vals[i]) < min_abs:
            vals[i] = z()
    return GenState(*vals)


def level_state(data, x1, x2, e1, c=1.0, r_sign: int = 1) -> GenState:
    """State with all four level residuals zero, given ``x1, x2, e1``."""
    efg = _as_efg(data)
    L = (x1 - x2) ** 2
    R1 = efg.fn("E", x1, x2) * efg.fn("G", x1, x2) - efg.fn("F", x1, x2) ** 2
    P1, P2 = efg.P_value(x1), efg.P_value(x2)
    e2 = -(e1 * P2 + R1) / (P1 + e1 * L)
    r = r_sign * cmath.sqrt(e1 + e2 + efg.fn("E", x1, x2))
    g = (efg.fn("F", x1, x2) - x2 * e1 - x1 * e2) / (c * r)
    return GenState(complex(e1), complex(e2), complex(x1), complex(x2), complex(r), complex(g))


# exact lemma checks


@dataclass
class LemmaReport:
    P_independent: bool
    symmetric: bool
    separable: bool
    matches_pencil_P: Optional[bool]
    P: Optional[MultiPoly]
    verdict: str = ""

    @property
    def ok(self):
        return self.P_independent and self.symmetric and self.separable and self.matches_pencil_P is not False


def lemma_P_check(data) -> LemmaReport:
    """Exact checks on ``Ehat, Fhat, Ghat``.

    ``Ehat x1**2 + 2 Fhat x1 + Ghat`` is free of ``x2``; the three are
    symmetric; ``(x1-x2)**2 s**2 - 2 R s - R1`` is discriminantly separable;
    and, for pencil data with ``K = 1``, the quartic equals half the pencil
    quartic.  The last identity needs ``a0 = -2``.
    """
    efg = _as_efg(data)
    x1 = MultiPoly.var("x1", XV)
    comb = efg.Ehat * x1 ** 2 + 2 * efg.Fhat * x1 + efg.Ghat
    independent = comb.diff("x2").is_zero()
    sym = all((p - p.swap("x1", "x2")).is_zero() for p in (efg.Ehat, efg.Fhat, efg.Ghat))
    report = check_separable(efg.pencil_F())
    P = comb.align(("x1",)).rename({"x1": "x"}) if independent else None
    matches = None
    if efg.source == "general" and efg.K == 1 and P is not None:
        matches = (2 * P - poly_P(efg.params["spec"])).is_zero()
    return LemmaReport(independent, sym, report.separable, matches, P, report.verdict)


def identity1_check(state: GenState, data, c=1.0) -> Tuple[complex, float]:
    """Residual of ``e2 P(x1) + e1 P(x2) + R1 + k**2 (x1 - x2)**2`` and a scale.

    ``P`` is the lemma quartic and ``k**2 = e1 e2``.  For pencil data with
    ``a0 = -2``, ``R1`` is minus the free term of the pencil polynomial.
    """
    efg = _as_efg(data)
    e1, e2, x1, x2, r, g = state
    L = (x1 - x2) ** 2
    R1 = efg.fn("E", x1, x2) * efg.fn("G", x1, x2) - efg.fn("F", x1, x2) ** 2
    terms = (e2 * efg.P_value(x1), e1 * efg.P_value(x2), R1, e1 * e2 * L)
    return sum(terms), max(1.0, max(abs(t) for t in terms))


@dataclass
class DxReport:
    residual1: complex
    residual2: complex
    sign1: int
    sign2: int
    scale: float


def dx_formulas_check(state: GenState, data, ab: AlphaBeta, c=1.0) -> DxReport:
    """Compare ``x1', x2'`` with ``-+beta sqrt(P(x_i) + e_i (x1-x2)**2)``.

    Residuals are of the squared relations; the signs give the branch
    (``+1`` when the principal root matches the quoted sign).
    """
    efg = _as_efg(data)
    d = vector_field(state, efg, ab, c)
    e1, e2, x1, x2, r, g = state
    be = ab.beta(state)
    L = (x1 - x2) ** 2
    rad1 = efg.P_value(x1) + e1 * L
    rad2 = efg.P_value(x2) + e2 * L
    res1 = d.x1 ** 2 - be ** 2 * rad1
    res2 = d.x2 ** 2 - be ** 2 * rad2
    ref1, ref2 = -be * cmath.sqrt(rad1), be * cmath.sqrt(rad2)
    sign1 = 1 if abs(d.x1 - ref1) <= abs(d.x1 + ref1) else -1
    sign2 = 1 if abs(d.x2 - ref2) <= abs(d.x2 + ref2) else -1
    scale = max(1.0, abs(d.x1) ** 2, abs(d.x2) ** 2)
    return DxReport(res1, res2, sign1, sign2, scale)


# rigid-body coordinates


def rigid_map(state: GenState, c=1.0) -> RigidState:
    if c == 0:
        raise ValueError("c must be nonzero")
    e1, e2, x1, x2, r, g = state
    u, v = (e1 - x1 ** 2) / c, (e2 - x2 ** 2) / c  # gamma +- i gamma1
    return RigidState((x1 + x2) / 2, (x1 - x2) / 2j, r, (u + v) / 2, (u - v) / 2j, g)


def rigid_inverse(rs: RigidState, c=1.0) -> GenState:
    if c == 0:
        raise ValueError("c must be nonzero")
    p, q, r, ga, ga1, ga2 = rs.as_tuple()
    x1, x2 = p + 1j * q, p - 1j * q
    return GenState(x1 ** 2 + c * (ga + 1j * ga1), x2 ** 2 + c * (ga - 1j * ga1), x1, x2, r, ga2)


def rigid_field_pushforward(rs: RigidState, data, ab: AlphaBeta, c=1.0) -> RigidState:
    """Chain rule through :func:`rigid_map` applied to the derived field."""
    st = rigid_inverse(rs, c)
    d = vector_field(st, data, ab, c)
    x1, x2 = st.x1, st.x2
    du = (d.e1 - 2 * x1 * d.x1) / c
    dv = (d.e2 - 2 * x2 * d.x2) / c
    return RigidState((d.x1 + d.x2) / 2, (d.x1 - d.x2) / 2j, d.r, (du + dv) / 2, (du - dv) / 2j, d.g)


RigidFn = Callable[[Tuple[complex, ...]], complex]


def rigid_field_closed_form(rs: Tuple[complex, ...], alpha: RigidFn, beta: RigidFn, c=1.0,
                            a1=0.0, a5=0.0, quoted: bool = True) -> Tuple[complex, ...]:
    """Closed-form rigid field for ``K = 1``.

    ``quoted=True`` is the widely quoted form with ``q' = i beta r p`` and the
    ``gamma1`` equation carrying ``-2 i (2 beta r - alpha)(p**2 - q**2)/c`` and
    ``-2 i beta gamma2 q``.  ``quoted=False`` is the exact pushforward, with
    ``q' = i beta (r p + c gamma2)``, ``-i (2 beta r - alpha)(p**2 - q**2)/c`` and
    ``-2 i beta gamma2 p``.
    """
    p, q, r, ga, ga1, ga2 = rs
    al, be = alpha(rs), beta(rs)
    lam = 2 * be * r - al
    dp = -1j * be * r * q
    dr = 2j * be * q * (2 * p + a1) - 1j * al / r * (2 * p * q + c * ga1)
    dga = 2j * lam / c * p * q - 1j * al * ga1 + 2j * be * ga2 * q
    dga2 = (-be / c * (1j * q * a5 + 2j * c * ga * q - 2j * c * ga1 * p)
            + lam / (c * c * ga2) * (1j * c * ga1 * (p * p - q * q) - 2j * c * p * q * ga))
    if quoted:
        dq = 1j * be * r * p
        dga1 = -2j * lam / c * (p * p - q * q) + 1j * al * ga - 2j * be * ga2 * q
    else:
        dq = 1j * be * (r * p + c * ga2)
        dga1 = -1j * lam / c * (p * p - q * q) + 1j * al * ga - 2j * be * ga2 * p
    return (dp, dq, dr, dga, dga1, dga2)


def numeric_divergence(rs: Sequence[complex], alpha: RigidFn, beta: RigidFn, c=1.0, a1=0.0, a5=0.0,
                       quoted: bool = True, h: float = 1e-3) -> complex:
    """Fourth-order central-difference divergence of the closed-form field."""
    rs = list(rs)
    total = 0j
    for i in range(6):
        vals = []
        for k in (-2, -1, 1, 2):
            pt = list(rs)
            pt[i] = pt[i] + k * h
            vals.append(rigid_field_closed_form(tuple(pt), alpha, beta, c, a1, a5, quoted)[i])
        total += (vals[0] - 8 * vals[1] + 8 * vals[2] - vals[3]) / (12 * h)
    return total


def measure_coefficients(c=1, a1=0, a5=0) -> Tuple[List[MultiPoly], List[MultiPoly]]:
    """The tabulated ``A0..A6`` and ``B0..B6`` in the rigid variables."""
    p, q, r, ga, ga1, ga2 = symbols(RIGID_VARS)
    A = [
        r ** 2 * ga1 * p ** 2 + c ** 2 * ga2 ** 2 * ga1 - 2 * r ** 2 * p * q * ga
        + 2 * c * ga2 ** 2 * p * q - r ** 2 * ga1 * q ** 2,
        MultiPoly.const(0, RIGID_VARS),
        MultiPoly.const(0, RIGID_VARS),
        -2 * c * ga2 ** 2 * r * p * q - c ** 2 * ga2 ** 2 * r * ga1,
        -2 * p * q * r ** 2 * ga2 ** 2 - ga1 * r ** 2 * c * ga2 ** 2,
        -2 * r ** 2 * ga2 ** 2 * q ** 2 + ga * r ** 2 * c * ga2 ** 2 + 2 * r ** 2 * ga2 ** 2 * p ** 2,
        -r ** 2 * ga2 * ga1 * p ** 2 + 2 * r ** 2 * ga2 * p * q * ga + r ** 2 * ga2 * ga1 * q ** 2,
    ]
    B = [
        -2 * r ** 3 * ga1 * p ** 2 + 2 * r ** 3 * ga1 * q ** 2 + 4 * r ** 3 * p * q * ga,
        -c * r ** 3 * q * ga2 ** 2,
        c * r ** 3 * p * ga2 ** 2,
        4 * q * r ** 2 * c * ga2 ** 2 * p + 2 * q * r ** 2 * c * ga2 ** 2 * a1,
        2 * ga2 ** 3 * q * r ** 2 * c + 4 * p * q * r ** 3 * ga2 ** 2,
        -4 * r ** 3 * ga2 ** 2 * p ** 2 - 2 * ga2 ** 3 * q * r ** 2 * c + 4 * r ** 3 * ga2 ** 2 * q ** 2,
        (-r ** 2 * ga2 ** 2 * q * a5 - 2 * r ** 3 * ga2 * ga1 * q ** 2 - 2 * r ** 2 * ga2 ** 2 * c * ga * q
         + 2 * r ** 3 * ga2 * ga1 * p ** 2 + 2 * r ** 2 * ga2 ** 2 * c * ga1 * p - 4 * r ** 3 * ga2 * p * q * ga),
    ]
    return [a.align(RIGID_VARS) for a in A], [b.align(RIGID_VARS) for b in B]


def measure_condition(alpha: MultiPoly, beta: MultiPoly, c=1, a1=0, a5=0) -> MultiPoly:
    """``A0 alpha + sum A_i d_i alpha + B0 beta + sum B_i d_i beta`` as a polynomial.

    The result is ``-i c gamma2**2 r**2`` times the divergence of the
    closed-form field of :func:`rigid_field_closed_form` with ``quoted=True``.
    """
    A, B = measure_coefficients(c, a1, a5)
    alpha = _rigid_poly(alpha)
    beta = _rigid_poly(beta)
    total = A[0] * alpha + B[0] * beta
    for i, v in enumerate(RIGID_VARS, start=1):
        total = total + A[i] * alpha.diff(v) + B[i] * beta.diff(v)
    return total


def measure_oracle_gap(alpha: MultiPoly, beta: MultiPoly, points: Sequence[Sequence[complex]],
                       c=1, a1=0, a5=0) -> float:
    """Largest relative gap between the measure polynomial and
    ``-i c gamma2**2 r**2`` times the finite-difference divergence."""
    poly = measure_condition(alpha, beta, c, a1, a5)
    fpoly = poly.compile(poly.variables)
    al, be = _rigid_poly(alpha).compile(RIGID_VARS), _rigid_poly(beta).compile(RIGID_VARS)
    worst = 0.0
    for pt in points:
        pt = tuple(complex(v) for v in pt)
        lhs = fpoly(*pt[:len(poly.variables)]) if poly.variables else complex(poly.constant_value())
        div = numeric_divergence(pt, lambda z: al(*z), lambda z: be(*z), float(c), float(a1), float(a5))
        rhs = -1j * float(c) * pt[5] ** 2 * pt[2] ** 2 * div
        worst = max(worst, abs(lhs - rhs) / (1 + abs(lhs) + abs(rhs)))
    return worst


def _rigid_poly(x) -> MultiPoly:
    if isinstance(x, MultiPoly):
        return x.align(tuple(RIGID_VARS) + tuple(v for v in x.variables if v not in RIGID_VARS))
    return MultiPoly.const(x, RIGID_VARS)


def measure_pairs() -> Dict[str, Tuple[MultiPoly, MultiPoly]]:
    """The three reference multiplier pairs in rigid variables."""
    p, q, r, ga, ga1, ga2 = symbols(RIGID_VARS)
    return {
        "kowalevski": (I * r, MultiPoly.const(I / 2, RIGID_VARS)),
        "quadratic": (2 * r * (p ** 2 + q ** 2), p ** 2 + q ** 2),
        "vertical": (r * ga2, MultiPoly.const(0, RIGID_VARS)),
    }


# K = 0 system


def k0_system(state: GenState, c=1.0, ab: AlphaBeta = AlphaBeta("kowalevski"), form: str = "derived") -> GenState:
    return vector_field(state, efg_k0(), ab, c, form)


def k0_integrals(state: GenState, c=1.0) -> IntegralValues:
    return first_integrals(state, efg_k0(), c)


def k0_relation(state: GenState) -> complex:
    """``2 e1 x2 + 2 e2 x1 - 1 + k**2 (x1 - x2)**2`` with ``k**2 = e1 e2``."""
    e1, e2, x1, x2, r, g = state
    return 2 * e1 * x2 + 2 * e2 * x1 - 1 + e1 * e2 * (x1 - x2) ** 2


@dataclass
class F2Report:
    polynomial: MultiPoly
    separable: bool
    ds_is_product: bool
    dx_ratio: Optional[Fraction]

    @property
    def ok(self):
        return self.separable and self.ds_is_product and self.dx_ratio is not None


def f2_polynomial() -> MultiPoly:
    return efg_k0().pencil_F()


def f2_separability() -> F2Report:
    """``F2 = (x1-x2)**2 s**2 - 2 (x1+x2) s + 1``.

    The ``s``-discriminant is ``(2 x1)(2 x2)``; the ``x1``-discriminant is a
    rational multiple ``dx_ratio`` of ``(2 x2) s**3``.
    """
    F2 = f2_polynomial()
    s, x1, x2 = symbols(SXV)
    rep = check_separable(F2)
    ds = half_discriminant(F2, "s")
    ds_ok = (ds - (2 * x1) * (2 * x2)).is_zero()
    dx = half_discriminant(F2, "x1")
    target = (2 * x2 * s ** 3).align(dx.variables)
    ratio = None
    lead = dx.align(SXV).terms.get((3, 0, 1))
    if lead is not None and (dx - lead / 2 * target).is_zero():
        ratio = lead / 2
    return F2Report(F2, rep.separable, ds_ok, ratio)


def k0_rigid_reduction(rs: RigidState, c=1.0) -> Dict[str, complex]:
    """``r'`` and ``gamma2'`` at ``alpha = i r, beta = i/2`` against ``2pq + c gamma1`` and ``i c``."""
    d = rigid_field_pushforward(rs, efg_k0(), AlphaBeta("kowalevski"), c)
    p, q, r, ga, ga1, ga2 = rs.as_tuple()
    return {
        "r_dot": d.r, "r_dot_closed": 2 * p * q + c * ga1,
        "gamma2_dot": d.gamma2, "gamma2_dot_closed": 1j * c,
    }


# perturbed system


def perturbed_system(state: GenState, a1, a5, ab: AlphaBeta, k1=0, k2=1, k3=0, c=1.0,
                     form: str = "derived") -> GenState:
    return vector_field(state, efg_perturbed(a1, a5, k1, k2, k3), ab, c, form)


@dataclass
class PerturbedReport:
    separable: bool
    dx1_classical_matches: bool
    dx1_half_ratio: Optional[Fraction]
    swapped_R1_separable: bool
    phi: MultiPoly
    P: MultiPoly

    @property
    def ok(self):
        return self.separable and self.dx1_classical_matches


def perturbed_phi_P(a1, a5) -> Tuple[MultiPoly, MultiPoly]:
    """``phi(s) = (2s - a5)(2 a1 + a5 s - 2 s**2)`` and ``P(x) = 2x(2 a1 x**2 - a5 x - 2)``."""
    a1, a5 = to_exact(a1), to_exact(a5)
    (s,) = symbols("s")
    (x,) = symbols("x")
    return (2 * s - a5) * (2 * a1 + a5 * s - 2 * s ** 2), 2 * x * (2 * a1 * x ** 2 - a5 * x - 2)


def perturbed_separability(a1, a5, k1=0, k2=1, k3=0) -> PerturbedReport:
    """Exact discriminant factorization for the perturbed data.

    With ``R1 = Ehat Ghat - Fhat**2`` the classical ``x1``-discriminant
    ``b**2 - 4ac`` equals ``phi(s) P(x2)`` at ``(k1, k2, k3) = (0, 1, 0)``.
    The variant ``R1 = Ehat Fhat - Ghat**2`` is also tested.
    """
    efg = efg_perturbed(a1, a5, k1, k2, k3)
    F = efg.pencil_F()
    rep = check_separable(F)
    phi, P = perturbed_phi_P(a1, a5)
    target = (phi.align(("s",)) * P.rename({"x": "x2"})).align(("s", "x2"))
    dx1_half = half_discriminant(F, "x1").align(("s", "x2"))
    classical = (4 * dx1_half - target).is_zero()
    ratio = None
    if not target.is_zero():
        e, cf = next(iter(target.terms.items()))
        cand = dx1_half.terms.get(e, Fraction(0)) / cf
        if (dx1_half - cand * target).is_zero():
            ratio = cand
    s, x1, x2 = symbols(SXV)
    swapped = ((x1 - x2) ** 2 * s ** 2 - 2 * efg.R() * s - (efg.Ehat * efg.Fhat - efg.Ghat ** 2)).align(SXV)
    swapped_ok = check_separable(swapped).separable
    return PerturbedReport(rep.separable, classical, ratio, swapped_ok, phi, P)


def perturbed_rigid_reduction(rs: RigidState, a1, a5, c=1.0) -> Dict[str, complex]:
    """``r'`` and ``gamma2'`` at ``alpha = i r, beta = i/2`` against the closed forms
    ``2pq + c gamma1 + a1 q / 2`` and ``i c (1 + i a5 q / 2)``."""
    d = rigid_field_pushforward(rs, efg_perturbed(a1, a5), AlphaBeta("kowalevski"), c)
    p, q, r, ga, ga1, ga2 = rs.as_tuple()
    a1, a5 = complex(a1), complex(a5)
    return {
        "r_dot": d.r, "r_dot_closed": 2 * p * q + c * ga1 + a1 / 2 * q,
        "gamma2_dot": d.gamma2, "gamma2_dot_closed": 1j * c * (1 + 1j * a5 / 2 * q),
    }


# elastic deformation


def elastic_efg(tau, I1, I2, I3) -> EFGSpec:
    tau, I1, I2, I3 = (to_exact(v) for v in (tau, I1, I2, I3))
    if tau not in (-1, 0, 1):
        raise ValueError("tau must be -1, 0 or 1")
    x1, x2 = symbols(XV)
    G = -x1 ** 2 * x2 ** 2 - 2 * tau * x1 * x2 - 2 * tau * (I1 - tau) + tau ** 2 - I2
    F = (x1 * x2 + tau) * (x1 + x2) + I3
    E = -(x1 + x2) ** 2 + 2 * (I1 - tau)
    return EFGSpec(E, F, G, Fraction(1), "elastic",
                   {"tau": tau, "I1": I1, "I2": I2, "I3": I3, "a1": Fraction(0), "a5": 2 * tau})


def elastic_pencil(tau, I1, I2, I3, a0=-2) -> PencilSpec:
    tau, I1, I2, I3, a0 = (to_exact(v) for v in (tau, I1, I2, I3, a0))
    if a0 == 0:
        raise ValueError("a0 must be nonzero")
    return PencilSpec(a0, 0, 2 * (tau - I1) / a0, 2 * I3 / a0,
                      (8 * tau * (I1 - tau) + 4 * (I2 - tau ** 2)) / a0, 2 * tau)


@dataclass
class ElasticReport:
    matches_family: bool
    separable: bool
    kowalevski_type: bool

    @property
    def ok(self):
        return self.matches_family and self.separable and self.kowalevski_type


def elastic_check(tau, I1, I2, I3, a0=-2) -> ElasticReport:
    """Elastic data agree with the ``K = 1`` family of :func:`elastic_pencil`; separability;
    ``tau = 0`` gives ``a1 = a5 = 0``."""
    el = elastic_efg(tau, I1, I2, I3)
    spec = elastic_pencil(tau, I1, I2, I3, a0)
    gen = efg_general(spec)
    same = all((a - b).is_zero() for a, b in
               ((el.Ehat, gen.Ehat), (el.Fhat, gen.Fhat), (el.Ghat, gen.Ghat)))
    sep = check_separable(el.pencil_F()).separable
    kow = (spec.a1 == 0 and spec.a5 == 0) if to_exact(tau) == 0 else True
    return ElasticReport(same, sep, kow)


def elastic_integrals(state: GenState, tau, c=1.0) -> Dict[str, complex]:
    """Elastic constants read off a state through the level relations.

    ``I1 = e1 e2``; ``I2`` and ``I3`` come from the ``g**2`` and ``r g``
    relations; ``E_residual`` is the ``r**2`` relation, which involves ``I1``.
    """
    e1, e2, x1, x2, r, g = state
    tau = complex(to_exact(tau))
    I1 = e1 * e2
    I3 = c * r * g + x2 * e1 + x1 * e2 - (x1 * x2 + tau) * (x1 + x2)
    I2 = -(c * c * g * g - x2 ** 2 * e1 - x1 ** 2 * e2 + x1 ** 2 * x2 ** 2 + 2 * tau * x1 * x2
           + 2 * tau * (I1 - tau) - tau ** 2)
    E_res = r * r - e1 - e2 + (x1 + x2) ** 2 - 2 * (I1 - tau)
    return {"I1": I1, "I2": I2, "I3": I3, "E_residual": E_res}
