"""Kötter transformation: the quadratic identity ``F A0 = A**2 + f B``, the
trick relating ``(w1 +- k)(w2 -+ k)`` to the separated quartics, the
Kowalevski change of variables along trajectories, the ``P_i`` and
``X, Y, Z`` quantities, and the commutative diagram through the coset group.

Everything here assumes the normalization ``a0 = -2``.
"""
from __future__ import annotations

import cmath
import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .algebra import MultiPoly, has_simple_roots, symbols, univariate_coeffs, univariate_rem
from .dynamics import AlphaBeta, GenState, efg_general, integrate
from .pencil import PencilSpec, curve_pair, pencil_F_darboux, poly_J
from .twovalued import MultiVal, PairVal, Weierstrass, coset_mul, p2_mul

log = logging.getLogger(__name__)

SXV = ("s", "x1", "x2")


def _require_normalized(spec: PencilSpec):
    if spec.a0 != -2:
        raise ValueError("normalization required: a0 = -2")


@dataclass
class KotterData:
    spec: PencilSpec
    A0: MultiPoly
    B0: MultiPoly
    M0: MultiPoly
    A: MultiPoly
    B: MultiPoly
    f: MultiPoly
    f0: Fraction
    F: MultiPoly
    m: Tuple[complex, ...] = ()

    @property
    def shift(self):
        """``a1**2 + 2 a2``, the offset in ``n = A0(m)``."""
        return self.spec.a1 ** 2 + 2 * self.spec.a2

    @property
    def n(self) -> Tuple[complex, ...]:
        """``A0(m_i) = 2 m_i + a1**2 + 2 a2``."""
        return tuple(2 * mi + complex(self.shift) for mi in self.m)

    @property
    def n_quoted(self) -> Tuple[complex, ...]:
        return tuple(mi + complex(self.shift) for mi in self.m)

    def fhat_monic(self) -> MultiPoly:
        """``prod (x - n_i) = 4 f((x - a1**2 - 2 a2) / 2)``."""
        (x,) = symbols(("x",))
        return (4 * self.f.subs({"s": (x - self.shift) / 2})).align(("x",))

    def fhat_quoted(self) -> MultiPoly:
        """``f(x - a1**2 - 2 a2)``."""
        (x,) = symbols(("x",))
        return self.f.subs({"s": x - self.shift}).align(("x",))


@dataclass
class KotterReport:
    identity: bool
    expansion: bool
    expansion_unnormalized: bool
    corollary_quoted: bool
    corollary_corrected: bool

    @property
    def ok(self) -> bool:
        return self.identity and self.expansion and self.corollary_corrected


def kotter_polys(spec: PencilSpec) -> KotterData:
    _require_normalized(spec)
    a0, a1, a2, a3, a4, a5 = spec.as_tuple()
    s, x1, x2 = symbols(SXV)
    A0 = a1 ** 2 - a0 * a2 - s * a0
    B0 = Fraction(1, 2) * (a0 * a3 - a5 * a1 + 2 * s * a1)
    M0 = a5 * a2 - a1 * a3 + s * (a1 ** 2 + a5)
    A = A0 * (x1 * x2 - s) + B0 * (x1 + x2) + M0
    B = (x1 + x2) ** 2 + 2 * a1 * (x1 + x2) - 2 * s - 2 * a2
    f0 = a4 * a2 - a3 ** 2 - a1 * a3 * a5 + Fraction(1, 2) * (a4 * a1 ** 2 + a2 * a5 ** 2)
    f = 2 * s ** 3 + 2 * (a2 - a5) * s ** 2 + (2 * (a1 * a3 - a5 * a2) + a4 + Fraction(1, 2) * a5 ** 2) * s + f0
    F = pencil_F_darboux(spec).F.align(SXV)
    return KotterData(spec, A0.align(("s",)), B0.align(("s",)), M0.align(("s",)), A.align(SXV),
                      B.align(SXV), f.align(("s",)), f0, F)


def kotter_identity(spec: PencilSpec) -> Tuple[KotterData, KotterReport]:
    """Build the Kötter polynomials and verify the identities exactly."""
    d = kotter_polys(spec)
    F, A, B, A0, f = d.F, d.A, d.B, d.A0.align(SXV), d.f.align(SXV)
    identity = (F * A0 - A * A - f * B).is_zero()

    vs = ("s", "u", "x1", "x2")
    s, u, x1, x2 = symbols(vs)
    Fs = F.align(vs)
    Fu = F.rename({"s": "u"}).align(vs)
    dFu = Fu.diff("u")
    L = (x1 - x2) ** 2
    expansion = (Fs - Fu - (s - u) * dFu - (s - u) ** 2 * L).is_zero()
    expansion_unnormalized = (Fs - Fu - (s - u) * dFu - (s - u) ** 2).is_zero()
    # L (s1 - u)(s2 - u) = F(u) by Vieta
    corollary_quoted = (F - A * A - f * B).is_zero()
    corollary_corrected = identity
    rep = KotterReport(identity, expansion, expansion_unnormalized, corollary_quoted, corollary_corrected)

    fc = univariate_coeffs(d.f, "s")
    if has_simple_roots(fc):
        d.m = tuple(complex(r) for r in np.roots([complex(c) for c in reversed(fc)]))
    return d, rep


def pi_squared_exact(data: KotterData, x1, x2) -> bool:
    """``A0(u) F(u, x1, x2) - A(u, x1, x2)**2`` vanishes modulo ``f(u)``.

    At a root ``m`` of ``f`` this is ``(s1 - m)(s2 - m) = A(m)**2 / (A0(m) L)``.
    """
    lhs = (data.A0.align(SXV) * data.F - data.A * data.A).subs({"x1": x1, "x2": x2}).align(("s",))
    return not univariate_rem(univariate_coeffs(lhs, "s"), univariate_coeffs(data.f, "s"))


# w roots


def w_roots(x1, x2, spec: PencilSpec, tol: float = 0.0) -> Tuple[complex, complex]:
    """Roots in ``s`` of ``F(s, x1, x2) = 0``."""
    F = pencil_F_darboux(spec).F.align(SXV)
    a, b, c = (F.coeff("s", k).evaluate({"s": 0, "x1": x1, "x2": x2}) for k in (2, 1, 0))
    if abs(complex(a)) <= tol:
        raise ValueError("leading coefficient vanishes")
    a, b, c = complex(a), complex(b), complex(c)
    root = cmath.sqrt(b * b - 4 * a * c)
    if abs(b + root) < abs(b - root):
        root = -root
    q = -(b + root) / 2
    if q == 0:
        return 0j, 0j
    return q / a, c / q


class _WSolver:
    def __init__(self, spec: PencilSpec):
        F = pencil_F_darboux(spec).F.align(SXV)
        self._c = [F.coeff("s", k).compile(SXV) for k in (2, 1, 0)]

    def __call__(self, x1, x2):
        a, b, c = (fn(0.0, x1, x2) for fn in self._c)
        if a == 0:
            raise ValueError("leading coefficient vanishes")
        root = cmath.sqrt(b * b - 4 * a * c)
        if abs(b + root) < abs(b - root):
            root = -root
        q = -(b + root) / 2
        return (q / a, c / q) if q != 0 else (0j, 0j)


# the trick


@dataclass
class TrickReport:
    residual_plus: float
    residual_minus: float
    scale: float
    branch: Dict[str, int]

    @property
    def residual(self) -> float:
        return max(self.residual_plus, self.residual_minus)


def kotter_trick_check(state: GenState, spec: PencilSpec) -> TrickReport:
    """Both bracket identities, minimized over the sign of the second
    square-root product and the labeling of ``w1, w2`` (equivalently ``k``)."""
    _require_normalized(spec)
    efg = efg_general(spec)
    e1, e2, x1, x2 = state.e1, state.e2, state.x1, state.x2
    if x1 == x2:
        raise ValueError("x1 = x2")
    d = x1 - x2
    U = cmath.sqrt(e1) * cmath.sqrt(efg.P_value(x2)) / d
    V = cmath.sqrt(e2) * cmath.sqrt(efg.P_value(x1)) / d
    k = cmath.sqrt(e1 * e2)
    w1, w2 = w_roots(x1, x2, spec)
    scale = 1 + abs(U) ** 2 + abs(V) ** 2 + abs(w1 * w2) + abs(k) * (abs(w1) + abs(w2)) + abs(k) ** 2
    best = None
    for sv, sk in itertools.product((1, -1), repeat=2):
        kk = sk * k
        rp = abs((U + sv * V) ** 2 - (w1 + kk) * (w2 - kk)) / scale
        rm = abs((U - sv * V) ** 2 - (w1 - kk) * (w2 + kk)) / scale
        if best is None or max(rp, rm) < best.residual:
            best = TrickReport(rp, rm, scale, {"sqrt_e2_P1": sv, "k": sk})
    return best


# commutative diagram


@dataclass
class DiagramReport:
    checked: int
    skipped: int
    worst: float
    distances: List[float] = field(default_factory=list)

    def ok(self, tol: float = 1e-8) -> bool:
        return self.checked > 0 and self.worst <= tol


def diagram_paths(state: GenState, spec: PencilSpec, cp=None) -> Tuple[MultiVal, MultiVal]:
    """Left path: ``p2`` product of ``e1 P(x2) / L`` and ``e2 P(x1) / L``.
    Right path: coset product of the canonical lifts of ``x1, x2``, pushed to
    the pencil parameter and through ``(w_a, w_b) -> (w_a + k)(w_b - k)``."""
    _require_normalized(spec)
    cp = cp or curve_pair(spec)
    efg = efg_general(spec)
    e1, e2, x1, x2 = state.e1, state.e2, state.x1, state.x2
    L = (x1 - x2) ** 2
    left = p2_mul(e1 * efg.P_value(x2) / L, e2 * efg.P_value(x1) / L)
    curve = Weierstrass(complex(cp.g2), complex(cp.g3))
    X1, X2 = cp.psi_inverse(x1), cp.psi_inverse(x2)
    if X1 is None or X2 is None:
        raise ValueError("tangent parameter maps to infinity")
    ms = coset_mul(curve, curve.lift(X1)[0], curve.lift(X2)[0])
    wa, wb = (cp.from_canonical(m) for m in ms)
    k = cmath.sqrt(e1 * e2)
    right = PairVal((wa + k) * (wb - k), (wb + k) * (wa - k))
    return left, right


def commdiagram_check(samples: Sequence[GenState], spec: PencilSpec, branch_tol: float = 1e-6) -> DiagramReport:
    cp = curve_pair(spec)
    rep = DiagramReport(0, 0, 0.0)
    for st in samples:
        near = min(abs(x - r) for x in (st.x1, st.x2) for r in cp.P_roots)
        if near < branch_tol or abs(st.x1 - st.x2) < branch_tol:
            rep.skipped += 1
            continue
        try:
            left, right = diagram_paths(st, spec, cp)
        except (ValueError, ZeroDivisionError):
            rep.skipped += 1
            continue
        dist = left.distance(right)
        rep.checked += 1
        rep.distances.append(dist)
        rep.worst = max(rep.worst, dist)
    return rep


# P_i and X, Y, Z


@dataclass
class PiReport:
    P_root: Tuple[complex, ...]
    P_derived: Tuple[complex, ...]
    P_quoted: Tuple[complex, ...]
    derived_match: float
    quoted_match: float
    XYZ: Tuple[complex, complex, complex]
    XYZ_quoted: Tuple[complex, complex, complex]
    XYZ_solved: Tuple[complex, complex, complex]
    system_residual: float
    closed_form_residual: float
    quoted_system_residual: float
    quoted_closed_form_residual: float
    signs: Tuple[int, int, int]

    def ok(self, tol: float = 1e-10) -> bool:
        return max(self.derived_match, self.system_residual, self.closed_form_residual) <= tol


def _rel(a, b):
    return abs(a - b) / (1 + abs(a) + abs(b))


def _eval_s(p: MultiPoly, m):
    return p.compile(("s",))(m)


def p_i_and_xyz(s1, s2, x1, x2, data: KotterData) -> PiReport:
    """``P_i`` three ways and the linear system for ``X, Y, Z``."""
    if len(data.m) != 3:
        raise ValueError("degenerate spectrum")
    if x1 == x2:
        raise ValueError("x1 = x2")
    a0, a1, a2, a3, a4, a5 = (complex(v) for v in data.spec.as_tuple())
    d = x1 - x2
    sig = x1 + x2
    Afn = data.A.compile(SXV)
    roots, derived, quoted = [], [], []
    for m in data.m:
        a0m = _eval_s(data.A0, m)
        if abs(a0m) < 1e-14:
            raise ValueError("A0 vanishes at a root of f")
        sq = cmath.sqrt(a0m)
        roots.append(cmath.sqrt((s1 - m) * (s2 - m)))
        derived.append(Afn(m, x1, x2) / (sq * d))
        b0m = _eval_s(data.B0, m)
        quoted.append((sq * x1 * x2 + b0m / sq + m * (m - a5 - 2 * a2) - 2 * a5 - a1 * a3) / d)

    def match(cands):
        return max(min(_rel(r, c), _rel(r, -c)) for r, c in zip(roots, cands))

    signs = tuple(1 if _rel(r, c) <= _rel(r, -c) else -1 for r, c in zip(roots, derived))

    n = data.n
    Y = 1 / (2 * d)
    X = (x1 * x2 + a1 / 2 * sig + a1 ** 2 + a2 + a5 / 2) / d
    Z = (-(a1 ** 3 + 2 * a1 * a2 + a1 * a5 + 2 * a3) * sig + 2 * a2 * a5 - 2 * a1 * a3
         - (a1 ** 2 + a5) * (a1 ** 2 + 2 * a2)) / d
    # P_i / sqrt(n_i) with n_i = A0(m_i) is branch free
    rhs = [Afn(m, x1, x2) / (ni * d) for m, ni in zip(data.m, n)]
    M = np.array([[1, -ni, 1 / (2 * ni)] for ni in n], dtype=complex)
    sol = np.linalg.solve(M, np.array(rhs, dtype=complex))
    sys_res = max(_rel(a, b) for a, b in zip(sol, (X, Y, Z)))

    fh = data.fhat_monic().diff("x").compile(("x",))
    Yc = -sum(r * ni / fh(ni) for r, ni in zip(rhs, n))
    Zc = 2 * n[0] * n[1] * n[2] * sum(r / fh(ni) for r, ni in zip(rhs, n))
    cf_res = max(_rel(Yc, Y), _rel(Zc, Z))

    # tabulated forms, best over sign choices of the P_i
    npr = data.n_quoted
    sqp = [cmath.sqrt(x) for x in npr]
    Xp = (x1 * x2 + (2 * a1 ** 2 + a5 + 2 * a2) + a1 / 2 * d) / d
    Yp = 1 / d
    Zp = ((a1 ** 3 + 2 * a2 * a1 + 2 * a5 * a1 + 2 * a3) * sig - 2 * (a1 ** 2 + 2 * a2) * (a1 ** 2 + a5)) / d
    fhp = data.fhat_quoted().diff("x").compile(("x",))
    psys, pcf = math.inf, math.inf
    for eps in itertools.product((1, -1), repeat=3):
        P = [e * r for e, r in zip(eps, roots)]
        res = max(_rel(Xp - ni * Yp + Zp / (2 * ni), p / sq) for ni, p, sq in zip(npr, P, sqp))
        psys = min(psys, res)
        Ycp = -sum(p * sq / fhp(ni) for p, sq, ni in zip(P, sqp, npr))
        Zcp = 2 * npr[0] * npr[1] * npr[2] * sum(p / (sq * fhp(ni)) for p, sq, ni in zip(P, sqp, npr))
        pcf = min(pcf, max(_rel(Ycp, Yp), _rel(Zcp, Zp)))
    return PiReport(tuple(roots), tuple(derived), tuple(quoted), match(derived), match(quoted),
                    (X, Y, Z), (Xp, Yp, Zp), tuple(complex(v) for v in sol), sys_res, cf_res,
                    psys, pcf, signs)


# Kowalevski change of variables


@dataclass
class ChangeReport:
    hs: Tuple[float, ...]
    residuals: Dict[str, List[float]]
    orders: Dict[str, List[float]]
    signs: Dict[str, int]
    branch_point: bool = False

    @property
    def order_range(self) -> Tuple[float, float]:
        vals = [o for os in self.orders.values() for o in os if math.isfinite(o)]
        return (min(vals), max(vals)) if vals else (math.nan, math.nan)

    def ok(self, lo: float = 1.8, hi: float = 2.2) -> bool:
        a, b = self.order_range
        return not self.branch_point and lo <= a and b <= hi


def _match_pair(ref, pair):
    a, b = pair
    if abs(a - ref[0]) + abs(b - ref[1]) <= abs(b - ref[0]) + abs(a - ref[1]):
        return a, b
    return b, a


def kow_change_check(state0: GenState, spec: PencilSpec, ab: Optional[AlphaBeta] = None,
                     t_center: float = 0.1, hs: Sequence[float] = (0.04, 0.02, 0.01),
                     rtol: float = 1e-13, atol: float = 1e-15, c=1.0,
                     branch_tol: float = 1e-6) -> ChangeReport:
    """Central-difference residuals of the change of variables and the
    Abel-Jacobi relations around ``t_center``, for each step ``h``.

    The separated quartic is the one of the equations of motion (half the
    pencil quartic) and the cubic is ``f = -J/2``; with these the relations
    carry no stray constants.  Square-root signs and the labeling of
    ``w1, w2`` are fixed at the largest ``h`` and kept.
    """
    _require_normalized(spec)
    ab = ab or AlphaBeta.named("kowalevski")
    efg = efg_general(spec)
    hs = tuple(sorted(hs, reverse=True))
    if t_center < hs[0]:
        raise ValueError("t_center must exceed the largest step")
    ts = sorted({t_center} | {t_center + s * h for h in hs for s in (-1, 1)})
    traj = integrate(state0, efg, ab, T=ts[-1], rtol=rtol, atol=atol, c=c, t_eval=ts)
    at = {round(t, 14): traj.state(i) for i, t in enumerate(traj.t)}

    def st(t):
        return at[round(t, 14)]

    fpoly = (-Fraction(1, 2) * poly_J(spec)).align(("s",)).compile(("s",))
    wsolve = _WSolver(spec)
    mid = st(t_center)
    k2 = mid.e1 * mid.e2
    beta = ab.beta(mid)
    wc = wsolve(mid.x1, mid.x2)

    def phi(w):
        return fpoly(w) * (w * w - k2)

    crit = [abs(efg.P_value(mid.x1)), abs(efg.P_value(mid.x2))] + [abs(phi(w)) for w in wc]
    branch = min(crit) < branch_tol or abs(wc[0] - wc[1]) < branch_tol

    def diffs(h):
        lo, hi = st(t_center - h), st(t_center + h)
        wl, wh = _match_pair(wc, wsolve(lo.x1, lo.x2)), _match_pair(wc, wsolve(hi.x1, hi.x2))
        dx1 = (hi.x1 - lo.x1) / (2 * h)
        dx2 = (hi.x2 - lo.x2) / (2 * h)
        dw = [(wh[i] - wl[i]) / (2 * h) for i in range(2)]
        return dx1, dx2, dw

    sP1, sP2 = cmath.sqrt(efg.P_value(mid.x1)), cmath.sqrt(efg.P_value(mid.x2))
    sf = [cmath.sqrt(fpoly(w)) for w in wc]
    sphi = [cmath.sqrt(phi(w)) for w in wc]

    def lines(h, sg):
        dx1, dx2, dw = diffs(h)
        a, b = dx1 / sP1, sg["x2"] * dx2 / sP2
        i, j = (0, 1) if sg["label"] == 1 else (1, 0)
        t1 = a + b - sg["w1"] * dw[i] / sf[i]
        t2 = a - b - sg["w2"] * dw[j] / sf[j]
        u1 = dw[0] / sphi[0] + sg["phi"] * dw[1] / sphi[1]
        u2 = wc[0] * dw[0] / sphi[0] + sg["phi"] * wc[1] * dw[1] / sphi[1] - sg["beta"] * 2 * beta
        return {"change_plus": abs(t1), "change_minus": abs(t2), "abel_0": abs(u1), "abel_1": abs(u2)}

    best = None
    for combo in itertools.product((1, -1), repeat=6):
        sg = dict(zip(("x2", "label", "w1", "w2", "phi", "beta"), combo))
        val = max(lines(hs[0], sg).values())
        if best is None or val < best[0]:
            best = (val, sg)
    signs = best[1]
    residuals: Dict[str, List[float]] = {}
    for h in hs:
        for key, v in lines(h, signs).items():
            residuals.setdefault(key, []).append(v)
    orders = {}
    for key, vals in residuals.items():
        os = []
        for r0, r1, h0, h1 in zip(vals, vals[1:], hs, hs[1:]):
            os.append(math.log(r0 / r1) / math.log(h0 / h1) if r0 > 0 and r1 > 0 else math.nan)
        orders[key] = os
    return ChangeReport(hs, residuals, orders, signs, branch)
