"""Two-valued groups: ``p2``, the coset group of a Weierstrass cubic, its action
through a pencil of conics, and Poncelet triangle closure.

Infinity is ``None`` throughout.
"""
from __future__ import annotations

import cmath
import logging
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from .pencil import CurvePair, PencilSpec, curve_pair, pencil_F_darboux

log = logging.getLogger(__name__)

Value = Optional[complex]


# multisets


def _exact(v) -> bool:
    return isinstance(v, (int, Fraction))


@dataclass(frozen=True)
class MultiVal:
    """Unordered multiset of values; ``None`` stands for infinity."""

    values: Tuple[Value, ...]

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def distance(self, other: "MultiVal") -> float:
        """Largest scale-relative gap under the best one-to-one matching."""
        a, b = list(self.values), list(other.values)
        if len(a) != len(b):
            return math.inf
        ai = [x for x in a if x is None]
        bi = [x for x in b if x is None]
        if len(ai) != len(bi):
            return math.inf
        a = [complex(x) for x in a if x is not None]
        b = [complex(x) for x in b if x is not None]
        if not a:
            return 0.0
        cost = np.array([[abs(x - y) / (1 + max(abs(x), abs(y))) for y in b] for x in a])
        rows, cols = linear_sum_assignment(cost)
        return float(cost[rows, cols].max())

    def equals(self, other: "MultiVal", tol: float = 1e-10) -> bool:
        if all(_exact(v) for v in self.values) and all(_exact(v) for v in other.values):
            return sorted(self.values) == sorted(other.values)
        return self.distance(other) <= tol

    def __add__(self, other: "MultiVal") -> "MultiVal":
        return MultiVal(self.values + other.values)


def PairVal(a: Value, b: Value) -> MultiVal:
    return MultiVal((a, b))


# p2


def _rational_sqrt(q):
    q = Fraction(q)
    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def p2_mul(x, y) -> MultiVal:
    """``[(sqrt x + sqrt y)**2, (sqrt x - sqrt y)**2]``; exact for rational squares."""
    if _exact(x) and _exact(y):
        rx, ry = _rational_sqrt(x), _rational_sqrt(y)
        if rx is not None and ry is not None:
            return PairVal((rx + ry) ** 2, (rx - ry) ** 2)
    rx, ry = cmath.sqrt(x), cmath.sqrt(y)
    return PairVal((rx + ry) ** 2, (rx - ry) ** 2)


def p2_poly(z, x, y):
    return (x + y + z) ** 2 - 4 * (x * y + y * z + z * x)


def p2_assoc(x, y, z) -> Tuple[MultiVal, MultiVal]:
    """``x *(y * z)`` and ``(x * y) * z`` as 4-multisets."""
    left = MultiVal(())
    for v in p2_mul(y, z):
        left = left + p2_mul(x, v)
    right = MultiVal(())
    for v in p2_mul(x, y):
        right = right + p2_mul(v, z)
    return left, right


# Weierstrass cubic


@dataclass(frozen=True)
class WPoint:
    """Point ``(s, t)`` on ``t**2 = 4 s**3 - g2 s - g3``; ``s is None`` is the identity."""

    s: Value
    t: Value = None

    @property
    def is_infinity(self) -> bool:
        return self.s is None

    def neg(self) -> "WPoint":
        return self if self.s is None else WPoint(self.s, -self.t)


INFINITY = WPoint(None, None)


@dataclass(frozen=True)
class Weierstrass:
    g2: complex
    g3: complex

    def rhs(self, s):
        return 4 * s ** 3 - self.g2 * s - self.g3

    def residual(self, P: WPoint) -> float:
        if P.is_infinity:
            return 0.0
        scale = 1 + abs(P.s) ** 3 + abs(P.t) ** 2
        return abs(P.t ** 2 - self.rhs(P.s)) / scale

    def on_curve(self, P: WPoint, tol: float = 1e-10) -> bool:
        if P.is_infinity:
            return True
        if all(_exact(v) for v in (P.s, P.t, self.g2, self.g3)):
            return P.t ** 2 == self.rhs(P.s)
        return self.residual(P) <= tol

    def lift(self, s: Value) -> Tuple[WPoint, WPoint]:
        if s is None:
            return INFINITY, INFINITY
        t = cmath.sqrt(self.rhs(s))
        return WPoint(s, t), WPoint(s, -t)

    def random_point(self, rng: random.Random, spread: float = 2.0) -> WPoint:
        s = complex(rng.uniform(-spread, spread), rng.uniform(-spread, spread))
        return self.lift(s)[rng.randrange(2)]

    def add(self, P: WPoint, Q: WPoint, tol: float = 1e-13) -> WPoint:
        """Chord-tangent addition."""
        if P.is_infinity:
            return Q
        if Q.is_infinity:
            return P
        scale = 1 + abs(P.s) + abs(Q.s)
        if abs(P.s - Q.s) <= tol * scale:
            if abs(P.t + Q.t) <= tol * (1 + abs(P.t) + abs(Q.t)):
                return INFINITY
            lam = (12 * P.s ** 2 - self.g2) / (2 * P.t)
        else:
            lam = (Q.t - P.t) / (Q.s - P.s)
        s3 = lam * lam / 4 - P.s - Q.s
        t3 = -(P.t + lam * (s3 - P.s))
        return WPoint(s3, t3)

    def sub(self, P: WPoint, Q: WPoint) -> WPoint:
        return self.add(P, Q.neg())


def coset_mul_group_law(curve: Weierstrass, P: WPoint, Q: WPoint) -> MultiVal:
    """``{x(P+Q), x(P-Q)}`` via chord-tangent addition."""
    return PairVal(curve.add(P, Q).s, curve.sub(P, Q).s)


def coset_mul(curve: Weierstrass, P: WPoint, Q: WPoint, tol: float = 1e-9) -> MultiVal:
    """Two-valued product on ``s``-coordinates.

    For distinct finite ``s`` the closed form
    ``-s1 - s2 + ((t1 -+ t2) / (2 (s1 - s2)))**2`` is used; otherwise the
    group law.
    """
    if P.is_infinity or Q.is_infinity:
        return coset_mul_group_law(curve, P, Q)
    d = P.s - Q.s
    if abs(d) <= tol * (1 + abs(P.s) + abs(Q.s)):
        return coset_mul_group_law(curve, P, Q)
    base = -P.s - Q.s
    return PairVal(base + ((P.t - Q.t) / (2 * d)) ** 2, base + ((P.t + Q.t) / (2 * d)) ** 2)


@dataclass
class UnitInvReport:
    unit_ok: bool
    inverse_ok: bool
    identity_in_product: bool

    @property
    def ok(self):
        return self.unit_ok and self.inverse_ok and self.identity_in_product


def coset_unit_inv_check(curve: Weierstrass, P: WPoint, tol: float = 1e-10) -> UnitInvReport:
    unit = coset_mul(curve, INFINITY, P).equals(PairVal(P.s, P.s), tol)
    inv = P.neg().s == P.s
    prod = coset_mul(curve, P, P.neg())
    has_e = any(v is None for v in prod)
    return UnitInvReport(unit, inv, has_e)


def assoc_sides(curve: Weierstrass, P: WPoint, Q: WPoint, R: WPoint) -> Tuple[MultiVal, MultiVal]:
    """``P * (Q * R)`` and ``(P * Q) * R``; each intermediate value is lifted
    to a curve point (either lift gives the same pair)."""
    left = MultiVal(())
    for v in coset_mul(curve, Q, R):
        left = left + coset_mul(curve, P, curve.lift(v)[0])
    right = MultiVal(())
    for v in coset_mul(curve, P, Q):
        right = right + coset_mul(curve, curve.lift(v)[0], R)
    return left, right


@dataclass
class AssocReport:
    left: MultiVal
    right: MultiVal
    oracle: MultiVal
    distance: float
    oracle_distance: float

    def ok(self, tol: float = 1e-8) -> bool:
        return self.distance <= tol and self.oracle_distance <= tol


def assoc_check(curve: Weierstrass, P: WPoint, Q: WPoint, R: WPoint) -> AssocReport:
    left, right = assoc_sides(curve, P, Q, R)
    add, sub = curve.add, curve.sub
    oracle = MultiVal(tuple(x.s for x in (add(add(P, Q), R), sub(add(P, Q), R),
                                          add(sub(P, Q), R), sub(sub(P, Q), R))))
    return AssocReport(left, right, oracle, left.distance(right),
                       max(left.distance(oracle), right.distance(oracle)))


# action through the pencil


def weierstrass_of(cp: CurvePair) -> Weierstrass:
    return Weierstrass(complex(cp.g2), complex(cp.g3))


class PencilRoots:
    """Numeric roots in ``x2`` of ``F(s, x1, x2) = 0``."""

    def __init__(self, spec: PencilSpec):
        F = pencil_F_darboux(spec).F.align(("s", "x1", "x2"))
        self._coeffs = [F.coeff("x2", k).compile(("s", "x1", "x2")) for k in (2, 1, 0)]
        self._F = F.compile(("s", "x1", "x2"))

    def coefficients(self, s, x):
        return tuple(c(s, x, 0.0) for c in self._coeffs)

    def partners(self, s, x, tol: float = 1e-14) -> MultiVal:
        a, b, c = self.coefficients(s, x)
        scale = abs(a) + abs(b) + abs(c)
        if abs(a) <= tol * scale:
            return PairVal(None, -c / b if abs(b) > tol * scale else None)
        root = cmath.sqrt(b * b - 4 * a * c)
        if abs(b + root) < abs(b - root):
            root = -root
        q = -(b + root) / 2
        if abs(q) <= tol * scale:
            return PairVal(0j, 0j)
        return PairVal(q / a, c / q)

    def residual(self, s, x, y) -> float:
        a, b, c = self.coefficients(s, x)
        return abs(a * y * y + b * y + c) / (abs(a) * abs(y) ** 2 + abs(b) * abs(y) + abs(c))


def canonical_TVW(m, X, g2, g3):
    """``T Y**2 + V Y + W`` whose roots are ``x(P +- M)`` for ``P = (m, .)`` and ``M = (X, .)``."""
    T = (X - m) ** 2
    V = -(2 * (X + m) * (X * m - g2 / 4) - g3)
    W = (X * m + g2 / 4) ** 2 + g3 * (X + m)
    return T, V, W


def quoted_TVW(s, x, g2, g3):
    """``-4`` times :func:`canonical_TVW` at ``m = s/2``, in the tabulated layout."""
    T = -4 * x ** 2 + 4 * s * x - s ** 2
    V = 4 * s * x ** 2 + 2 * s ** 2 * x - 2 * x * g2 - g2 * s - 4 * g3
    W = -s ** 2 * x ** 2 - g2 * x * s - 4 * x * g3 - 2 * g3 * s - g2 ** 2 / 4
    return T, V, W


def quoted_images(m, n, X, u, g2, g3) -> MultiVal:
    """``(-V +- 4 n u) / (2 T)`` with the tabulated ``T, V, W`` at ``s = 2 m``."""
    T, V, W = quoted_TVW(2 * m, X, g2, g3)
    return PairVal((-V + 4 * n * u) / (2 * T), (-V - 4 * n * u) / (2 * T))


@dataclass
class ActionResult:
    darboux: MultiVal  # partners of x in Darboux parameters
    canonical: MultiVal  # the same pulled back by psi_hat
    formula: MultiVal  # (-V -+ n u) / (2 T) in canonical coordinates
    partner_residual: float


def pencil_action(P: WPoint, x, cp: CurvePair, roots: PencilRoots) -> ActionResult:
    """Images of the tangent parameter ``x`` under the conic ``s = s(P)``.

    ``P`` lives on the canonical cubic; the pencil parameter is
    ``cp.from_canonical(P.s)``.
    """
    if P.is_infinity:
        # s -> infinity: F / s**2 -> (x1 - x2)**2, a double partner
        X = cp.psi_inverse(x)
        return ActionResult(PairVal(x, x), PairVal(X, X), PairVal(X, X), 0.0)
    s = complex(cp.from_canonical(P.s))
    darb = roots.partners(s, x)
    canon = MultiVal(tuple(None if y is None else cp.psi_inverse(y) for y in darb))
    X = cp.psi_inverse(x)
    g2, g3 = complex(cp.g2), complex(cp.g3)
    if X is None:
        formula = PairVal(P.s, P.s)
    else:
        u = cmath.sqrt(cp.canonical_rhs(X))
        T, V, W = canonical_TVW(P.s, X, g2, g3)
        if abs(T) < 1e-300:
            formula = PairVal(None, -W / V if V else None)
        else:
            formula = PairVal((-V - P.t * u) / (2 * T), (-V + P.t * u) / (2 * T))
    res = 0.0
    for y in formula:
        if y is None:
            continue
        yd = cp.psi(y)
        if yd is None:
            continue
        res = max(res, roots.residual(s, x, yd))
    return ActionResult(darb, canon, formula, res)


# Poncelet


@dataclass(frozen=True)
class PonceletConfig:
    spec: PencilSpec
    s1: complex
    s2: complex
    s3: complex
    x0: complex


@dataclass
class PonceletReport:
    defect: float
    branch: Tuple[int, int, int]
    degenerate: bool
    concurrency: float
    reason: str = ""


def _dual_matrix(spec: PencilSpec, s):
    a0, a1, a2, a3, a4, a5 = (complex(v) for v in spec.as_tuple())
    return np.array([[a0, a1, a5 - 2 * s], [a1, a2 + s, a3], [a5 - 2 * s, a3, a4]], dtype=complex)


def _adjugate(m: np.ndarray) -> np.ndarray:
    adj = np.empty_like(m)
    for i in range(3):
        for j in range(3):
            minor = np.delete(np.delete(m, j, 0), i, 1)
            adj[i, j] = (-1) ** (i + j) * (minor[0, 0] * minor[1, 1] - minor[0, 1] * minor[1, 0])
    return adj


def tangent_line(spec: PencilSpec, s, xa, xb) -> np.ndarray:
    """Unit-normalized tangent to ``C_s`` at the meeting point of tangents ``xa, xb`` to ``C2``."""
    z = np.array([1.0, (xa + xb) / 2, xa * xb], dtype=complex)
    line = _adjugate(_dual_matrix(spec, s)) @ z
    n = np.linalg.norm(line)
    return line / n if n else line


def _chain(roots: PencilRoots, ss, x0):
    """All ``2**3`` chains ``x0 -> x1 -> x2 -> x3``."""
    out = []
    for i, x1 in enumerate(roots.partners(ss[0], x0)):
        if x1 is None:
            continue
        for j, x2 in enumerate(roots.partners(ss[1], x1)):
            if x2 is None:
                continue
            for k, x3 in enumerate(roots.partners(ss[2], x2)):
                if x3 is None:
                    continue
                out.append(((i, j, k), (x0, x1, x2, x3)))
    return out


def poncelet_triangle(cfg: PonceletConfig, roots: Optional[PencilRoots] = None,
                      cp: Optional[CurvePair] = None, branch_tol: float = 1e-6,
                      concurrency_tol: float = 1e-10) -> PonceletReport:
    """Closure defect of the tangent triangle through ``C_{s1}, C_{s2}, C_{s3}``."""
    roots = roots or PencilRoots(cfg.spec)
    cp = cp or curve_pair(cfg.spec)
    x0 = complex(cfg.x0)
    near_branch = min(abs(x0 - r) for r in cp.P_roots) / (1 + abs(x0))
    if near_branch < branch_tol:
        return PonceletReport(math.nan, (0, 0, 0), True, math.nan, "start at a zero of P")
    best = (math.inf, (0, 0, 0), None)
    for branch, (a, b, c, d) in _chain(roots, (cfg.s1, cfg.s2, cfg.s3), x0):
        err = abs(d - a) / (1 + abs(a))
        if err < best[0]:
            best = (err, branch, (a, b, c, d))
    defect, branch, chain = best
    if chain is None:
        return PonceletReport(math.inf, branch, True, math.nan, "chain hit infinity")
    a, b, c, _ = chain
    lines = np.array([tangent_line(cfg.spec, cfg.s1, a, b),
                      tangent_line(cfg.spec, cfg.s2, b, c),
                      tangent_line(cfg.spec, cfg.s3, c, a)])
    conc = abs(np.linalg.det(lines))
    degenerate = conc < concurrency_tol or abs(a - b) < branch_tol or abs(b - c) < branch_tol
    reason = "concurrent tangents or coincident sides" if degenerate else ""
    return PonceletReport(defect, branch, degenerate, conc, reason)


def compatible_third(cp: CurvePair, s1, s2, which: int = 0):
    """Pencil parameter of a conic closing triangles through ``C_{s1}, C_{s2}``."""
    curve = weierstrass_of(cp)
    P = curve.lift(cp.to_canonical(s1))[0]
    Q = curve.lift(cp.to_canonical(s2))[0]
    m3 = coset_mul(curve, P, Q).values[which]
    return None if m3 is None else cp.from_canonical(m3)


def poncelet_scan(spec: PencilSpec, s1, s2, s3, starts: Sequence[complex]) -> Tuple[List[PonceletReport], float]:
    """Reports for several starts and the spread of the non-degenerate defects."""
    roots, cp = PencilRoots(spec), curve_pair(spec)
    reps = [poncelet_triangle(PonceletConfig(spec, s1, s2, s3, x0), roots, cp) for x0 in starts]
    ds = [r.defect for r in reps if not r.degenerate]
    spread = (max(ds) - min(ds)) if ds else math.nan
    return reps, spread
