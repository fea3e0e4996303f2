"""Pencil of conics ``C1 + s C2`` in Darboux coordinates.

``C2`` is the fixed conic ``w2**2 - 4 w1 w3 = 0``; a point is described by
the parameters ``x1, x2`` of its two tangents to ``C2``.  The pencil
polynomial ``F(s, x1, x2) = H + K s + L s**2`` comes from a bordered
determinant, and its discriminants factor through a quartic ``P`` and a
cubic ``J``.
"""
from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .algebra import (
    Coeff,
    Moebius,
    MultiPoly,
    PolyMatrix,
    det,
    has_simple_roots,
    symbols,
    to_exact,
    univariate_coeffs,
)

__all__ = [
    "PencilSpec",
    "DarbouxPair",
    "PencilPolys",
    "CurvePair",
    "KowalevskiParams",
    "pencil_matrix",
    "pencil_F_xyz",
    "darboux_forward",
    "darboux_inverse",
    "pencil_F_darboux",
    "tabulated_H",
    "tabulated_K",
    "poly_P",
    "poly_J",
    "double_bordered",
    "jacobi_identity_check",
    "curve_pair",
    "kowalevski_spec",
    "kowalevski_params",
    "kowalevski_R",
    "kowalevski_R1",
    "kowalevski_fundamental_check",
]

XYZ = ("s", "z1", "z2", "z3")
SX = ("s", "x1", "x2")


@dataclass(frozen=True)
class PencilSpec:
    """Coefficients of the tangential conic ``C1`` (``a0 .. a5``)."""

    a0: Coeff
    a1: Coeff
    a2: Coeff
    a3: Coeff
    a4: Coeff
    a5: Coeff

    def __post_init__(self):
        for name in ("a0", "a1", "a2", "a3", "a4", "a5"):
            object.__setattr__(self, name, to_exact(getattr(self, name)))

    @classmethod
    def from_sequence(cls, values: Sequence[object]) -> "PencilSpec":
        values = list(values)
        if len(values) != 6:
            raise ValueError("a pencil needs exactly six coefficients a0..a5")
        return cls(*values)

    @classmethod
    def parse(cls, text: str) -> "PencilSpec":
        return cls.from_sequence(part for part in text.split(","))

    def as_tuple(self) -> Tuple[Coeff, ...]:
        return (self.a0, self.a1, self.a2, self.a3, self.a4, self.a5)

    def c1_matrix(self) -> List[List[Coeff]]:
        a0, a1, a2, a3, a4, a5 = self.as_tuple()
        return [[a0, a1, a5], [a1, a2, a3], [a5, a3, a4]]

    def general_position(self) -> bool:
        """Nondegenerate ``C1`` and a quartic ``P`` with four simple zeros."""
        m = self.c1_matrix()
        d = (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
             - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
             + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))
        if d == 0 or self.a0 == 0:
            return False
        return has_simple_roots(univariate_coeffs(poly_P(self), "x"))


@dataclass(frozen=True)
class DarbouxPair:
    x1: object
    x2: object

    def as_set(self):
        return frozenset((self.x1, self.x2))


@dataclass(frozen=True)
class PencilPolys:
    H: MultiPoly
    K: MultiPoly
    L: MultiPoly
    F: MultiPoly


def _bordered(coeffs: Sequence[object], variables=XYZ) -> PolyMatrix:
    s, z1, z2, z3 = symbols(XYZ, variables)
    a0, a1, a2, a3, a4, a5 = coeffs
    return PolyMatrix([
        [0, z1, z2, z3],
        [z1, a0, a1, a5 - 2 * s],
        [z2, a1, a2 + s, a3],
        [z3, a5 - 2 * s, a3, a4],
    ], variables)


def pencil_matrix(spec: PencilSpec) -> PolyMatrix:
    """4x4 bordered matrix in ``(s, z1, z2, z3)``."""
    return _bordered(spec.as_tuple())


def pencil_F_xyz(spec: PencilSpec) -> MultiPoly:
    return det(pencil_matrix(spec))


def _darboux_sub(variables: Sequence[str]):
    x1, x2 = symbols(("x1", "x2"), variables)
    return {"z1": MultiPoly.const(1, variables), "z2": (x1 + x2) / 2, "z3": x1 * x2}


def darboux_forward(z: Sequence[object]) -> DarbouxPair:
    """Roots of ``z1 l**2 - 2 z2 l + z3``; exact when they are rational."""
    z1, z2, z3 = z
    if z1 == 0:
        raise ValueError("point on line at infinity of the parameterization")
    exact = all(isinstance(v, (int, Fraction)) for v in z)
    if exact:
        z1, z2, z3 = (Fraction(v) for v in z)
        disc = z2 * z2 - z1 * z3
        root = _rational_sqrt(disc)
        if root is not None:
            r1, r2 = (z2 + root) / z1, (z2 - root) / z1
            return DarbouxPair(*sorted((r1, r2)))
    z1, z2, z3 = (complex(v) for v in (z1, z2, z3))
    root = cmath.sqrt(z2 * z2 - z1 * z3)
    r1, r2 = (z2 + root) / z1, (z2 - root) / z1
    return DarbouxPair(*sorted((r1, r2), key=lambda c: (c.real, c.imag)))


def _rational_sqrt(q: Fraction) -> Optional[Fraction]:
    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def darboux_inverse(x1, x2) -> Tuple[object, object, object]:
    """``(1, (x1+x2)/2, x1 x2)``; checks ``(x1-x2)**2 == 4 (z2**2 - z1 z3)``."""
    z = (1, (x1 + x2) / 2 if not isinstance(x1 + x2, int) else Fraction(x1 + x2, 2), x1 * x2)
    lhs = (x1 - x2) ** 2
    rhs = 4 * (z[1] ** 2 - z[0] * z[2])
    if isinstance(lhs, (int, Fraction)) and isinstance(rhs, (int, Fraction)):
        if lhs != rhs:
            raise ArithmeticError("Darboux difference identity violated")
    elif abs(lhs - rhs) > 1e-9 * max(1.0, abs(lhs)):
        raise ArithmeticError("Darboux difference identity violated")
    return z


def pencil_F_darboux(spec: PencilSpec) -> PencilPolys:
    """``H, K, L`` from the determinant after the Darboux substitution."""
    return _pencil_from_coeffs(spec.as_tuple())


def _pencil_from_coeffs(coeffs, extra_vars: Sequence[str] = ()) -> PencilPolys:
    variables = XYZ + tuple(extra_vars)
    coeffs = [c.align(variables) if isinstance(c, MultiPoly) else c for c in coeffs]
    F = det(_bordered(coeffs, variables))
    out_vars = SX + tuple(extra_vars)
    sub = _darboux_sub(out_vars)
    F = F.subs(sub).align(out_vars)
    H, K, L = F.coeff("s", 0), F.coeff("s", 1), F.coeff("s", 2)
    return PencilPolys(H, K, L, F)


def tabulated_K(spec: PencilSpec) -> MultiPoly:
    """Closed form of the ``s``-coefficient."""
    a0, a1, a2, a3, a4, a5 = spec.as_tuple()
    _, x1, x2 = symbols(SX)
    return (-a0 * x1 ** 2 * x2 ** 2 + 2 * a1 * x1 * x2 * (x1 + x2) - a5 * (x1 ** 2 + x2 ** 2)
            - 4 * a2 * x1 * x2 + 2 * a3 * (x1 + x2) - a4)


def tabulated_H(spec: PencilSpec, grouping: str = "determinant") -> MultiPoly:
    """Closed forms of the free term.

    ``grouping="determinant"`` is the form that agrees with the determinant.
    ``grouping="literal"`` reads the often-quoted closed form literally: full
    ``a5**2 - a0 a4`` weight on ``x1**2 + x2**2`` and the ``x1 x2`` and
    ``a1 a4 - a3 a5`` terms jointly multiplied by ``x1 + x2``.
    """
    a0, a1, a2, a3, a4, a5 = spec.as_tuple()
    _, x1, x2 = symbols(SX)
    e = a5 ** 2 - a0 * a4
    head = (a1 ** 2 - a0 * a2) * x1 ** 2 * x2 ** 2 + (a0 * a3 - a5 * a1) * x1 * x2 * (x1 + x2)
    tail = a3 ** 2 - a2 * a4
    if grouping == "determinant":
        return (head + Fraction(1, 4) * e * (x1 ** 2 + x2 ** 2)
                + (2 * (a5 * a2 - a1 * a3) + Fraction(1, 2) * e) * x1 * x2
                + (a1 * a4 - a3 * a5) * (x1 + x2) + tail)
    if grouping == "literal":
        return (head + e * (x1 ** 2 + x2 ** 2)
                + (2 * (a5 * a2 - a1 * a3) + Fraction(1, 2) * e * x1 * x2 + (a1 * a4 - a3 * a5)) * (x1 + x2)
                + tail)
    raise ValueError(f"unknown grouping {grouping!r}")


def poly_P(spec: PencilSpec, var: str = "x") -> MultiPoly:
    a0, a1, a2, a3, a4, a5 = spec.as_tuple()
    (x,) = symbols(var)
    return a0 * x ** 4 - 4 * a1 * x ** 3 + (2 * a5 + 4 * a2) * x ** 2 - 4 * a3 * x + a4


def poly_J(spec: PencilSpec, var: str = "s") -> MultiPoly:
    a0, a1, a2, a3, a4, a5 = spec.as_tuple()
    (s,) = symbols(var)
    return (-4 * s ** 3 + 4 * (a5 - a2) * s ** 2
            + (a0 * a4 - a5 ** 2 + 4 * (a5 * a2 - a1 * a3)) * s
            - a3 ** 2 * a0 + a0 * a4 * a2 + 2 * a1 * a3 * a5 - a4 * a1 ** 2 - a2 * a5 ** 2)


DB_VARS = ("s", "z1", "z2", "z3", "w1", "w2", "w3")


def double_bordered(spec: PencilSpec) -> PolyMatrix:
    """5x5 matrix bordered by two points ``w`` (first row) and ``z`` (second row)."""
    s, z1, z2, z3, w1, w2, w3 = symbols(DB_VARS)
    a0, a1, a2, a3, a4, a5 = spec.as_tuple()
    return PolyMatrix([
        [0, 0, w1, w2, w3],
        [0, 0, z1, z2, z3],
        [w1, z1, a0, a1, a5 - 2 * s],
        [w2, z2, a1, a2 + s, a3],
        [w3, z3, a5 - 2 * s, a3, a4],
    ], DB_VARS)


@dataclass
class JacobiReport:
    holds: bool
    corner_is_J: bool
    full_is_P_gap: bool
    polar_form_ok: bool
    polar_discriminant_sign: int
    witnesses: Dict[str, MultiPoly]

    @property
    def ok(self) -> bool:
        return self.holds and self.corner_is_J and self.full_is_P_gap and self.polar_form_ok


def jacobi_identity_check(spec: PencilSpec) -> JacobiReport:
    """Desnanot–Jacobi identity on the double-bordered determinant.

    Also checks, under ``z = (1, (x1+x2)/2, x1 x2)``, ``w = (1, (x1+y)/2, x1 y)``,
    that the full determinant is ``P(x1) (x2 - y)**2 / 4`` and the off-diagonal
    minor is the polar form ``T x2 y + V (x2 + y)/2 + W``.  The returned sign
    tells which of ``V**2 - 4 T W = -+ J P`` holds.
    """
    m = double_bordered(spec)
    full = det(m)
    m11 = det(m.minor([0], [0]))
    m22 = det(m.minor([1], [1]))
    m12 = det(m.minor([0], [1]))
    m21 = det(m.minor([1], [0]))
    corner = det(m.minor([0, 1], [0, 1]))
    holds = (m11 * m22 - m12 * m21 - full * corner).is_zero()
    J = poly_J(spec)
    corner_is_J = (corner.trim() - J).is_zero()

    out_vars = ("s", "x1", "x2", "y")
    s, x1, x2, y = symbols(out_vars)
    sub = {"z1": MultiPoly.const(1, out_vars), "z2": (x1 + x2) / 2, "z3": x1 * x2,
           "w1": MultiPoly.const(1, out_vars), "w2": (x1 + y) / 2, "w3": x1 * y}
    full_x = full.subs(sub).align(out_vars)
    P1 = poly_P(spec, "x1").align(out_vars)
    full_is_P_gap = (full_x - P1 * (x2 - y) ** 2 / 4).is_zero()

    F = pencil_F_darboux(spec).F.align(out_vars)
    T, V, W = F.coeff("x2", 2), F.coeff("x2", 1), F.coeff("x2", 0)
    polar = T * x2 * y + V * (x2 + y) / 2 + W
    m12_x = m12.subs(sub).align(out_vars)
    polar_form_ok = (m12_x - polar).is_zero()
    gap = V * V - 4 * T * W
    JP = J.align(out_vars) * P1
    sign = 1 if (gap - JP).is_zero() else (-1 if (gap + JP).is_zero() else 0)
    witnesses = {"full": full, "m11": m11, "m22": m22, "m12": m12, "m21": m21,
                 "corner": corner, "polar_gap": gap}
    return JacobiReport(holds, corner_is_J, full_is_P_gap, polar_form_ok, sign, witnesses)


# elliptic curves


def _sort_complex(values):
    return sorted(values, key=lambda c: (round(c.real, 9), round(c.imag, 9)))


@dataclass(frozen=True)
class CurvePair:
    """Quartic ``y**2 = P(x)``, cubic ``t**2 = J(s)`` and the map between them.

    The canonical cubic ``4 m**3 - g2 m - g3`` is ``J`` in the coordinate
    ``m = (s - shift) / scale`` (``scale = -1``).  ``psi_hat`` sends the
    canonical coordinate ``m`` to the Darboux parameter ``x``.
    """

    P: MultiPoly
    J: MultiPoly
    g2: Coeff
    g3: Coeff
    scale: Coeff
    shift: Coeff
    psi_hat: Moebius
    P_roots: Tuple[complex, ...]
    canonical_roots: Tuple[complex, ...]
    match_error: float

    def to_canonical(self, s):
        """Pencil parameter -> canonical coordinate (``None`` is infinity)."""
        if s is None:
            return None
        return (s - self.shift) / self.scale

    def from_canonical(self, m):
        if m is None:
            return None
        return self.scale * m + self.shift

    def canonical_rhs(self, m):
        g2, g3 = complex(self.g2), complex(self.g3)
        return 4 * m ** 3 - g2 * m - g3

    def psi(self, m):
        """Canonical coordinate -> Darboux parameter (``None`` for infinity)."""
        return self.psi_hat(m)

    def psi_inverse(self, x):
        return self.psi_hat.inverse()(x)


def _numeric_moebius(src: Sequence[complex], dst: Sequence[complex]) -> Moebius:
    """Möbius map sending three finite points to three finite points."""
    rows = [[z, 1, -w * z, -w] for z, w in zip(src, dst)]
    _, _, vh = np.linalg.svd(np.array(rows, dtype=complex))
    a, b, c, d = vh[-1].conj()
    return Moebius(complex(a), complex(b), complex(c), complex(d))


def curve_pair(spec: PencilSpec, tol: float = 1e-8) -> CurvePair:
    """Canonical cubic and the Möbius map from its branch points to the zeros of ``P``."""
    P = poly_P(spec)
    Pc = univariate_coeffs(P, "x")
    if len(Pc) != 5:
        raise ValueError("P is not a quartic")
    if not has_simple_roots(Pc):
        raise ValueError("non-simple spectrum")
    J = poly_J(spec)
    Jc = univariate_coeffs(J, "s")
    if not has_simple_roots(Jc):
        raise ValueError("J degenerate")
    scale = Fraction(-1)
    shift = Jc[2] / 12
    # J(shift - m) = 4 m**3 - g2 m - g3
    (m,) = symbols("m")
    Jm = J.subs({"s": shift - m}).align(("m",))
    cm = univariate_coeffs(Jm, "m")
    if cm[3] != 4 or cm[2] != 0:
        raise ArithmeticError("canonical form not reached")
    g2, g3 = -cm[1], -cm[0]
    P_roots = tuple(_sort_complex(np.roots([complex(c) for c in reversed(Pc)])))
    can_roots = tuple(_sort_complex(np.roots([4.0, 0.0, -complex(g2), -complex(g3)])))
    at_inf = P_roots[0]
    best = None
    for perm in itertools.permutations(P_roots[1:]):
        mob = _numeric_moebius(can_roots, perm)
        if abs(mob.c) < 1e-300:
            continue
        err = abs(mob.a / mob.c - at_inf) / max(1.0, abs(at_inf))
        if best is None or err < best[0]:
            best = (err, mob)
    if best is None or best[0] > tol:
        raise ArithmeticError("no Möbius map matches the branch points")
    return CurvePair(P, J, g2, g3, scale, shift, best[1], P_roots, can_roots, best[0])


def differential_ratio(cp: CurvePair, m: complex) -> complex:
    """``(dx/y) / (dm/t)`` at canonical coordinate ``m``; constant up to sign."""
    mob = cp.psi_hat
    x = mob(m)
    dxdm = mob.determinant / (mob.c * m + mob.d) ** 2
    Pf = cp.P.compile(("x",))
    y = cmath.sqrt(Pf(x))
    t = cmath.sqrt(cp.canonical_rhs(m))
    return dxdm * t / y


# Kowalevski dictionary


@dataclass(frozen=True)
class KowalevskiParams:
    l1: object
    l: object
    c: object
    k_squared: object


def kowalevski_spec(l1, l, c, k=None, *, k_squared=None) -> PencilSpec:
    """``a0=-2, a1=a5=0, a2=3 l1, a3=-2 c l, a4=2 (c**2 - k**2)``."""
    if k_squared is None:
        if k is None:
            raise ValueError("need k or k_squared")
        k_squared = k * k
    vals = [-2, 0, 3 * l1, -2 * c * l, 2 * (c * c - k_squared), 0]
    if all(isinstance(v, (int, Fraction)) for v in (l1, l, c, k_squared)):
        return PencilSpec.from_sequence(vals)
    return _FloatSpec(*[complex(v) if isinstance(v, complex) else float(v) for v in vals])


@dataclass(frozen=True)
class _FloatSpec:
    """Inexact spec produced by the numeric inverse of the dictionary."""

    a0: float
    a1: float
    a2: float
    a3: float
    a4: float
    a5: float

    def as_tuple(self):
        return (self.a0, self.a1, self.a2, self.a3, self.a4, self.a5)


def kowalevski_params(spec) -> KowalevskiParams:
    """Inverse of the dictionary via the closed-form radicals (``+`` branch).

    Only ``c l = -a3/2`` is pinned by the coefficients; the radicals pick one
    ``(l, c)`` on that hyperbola and ``k**2 = c**2 - a4/2`` closes the loop.
    """
    a0, a1, a2, a3, a4, a5 = spec.as_tuple()
    if a1 != 0 or a5 != 0:
        raise ValueError("not of Kowalevski type")
    if a0 != -2:
        raise ValueError("not of Kowalevski type")
    inner = float(a4) + 4 * float(a3) ** 2
    if inner < 0:
        raise ValueError("parameters not real")
    rad = -float(a4) + math.sqrt(inner)
    if rad <= 0:
        raise ValueError("parameters not real")
    root = math.sqrt(rad)
    l = root / 2
    c = -float(a3) / root
    l1 = a2 / 3
    return KowalevskiParams(l1, l, c, c * c - float(a4) / 2)


def kowalevski_R(variables=("x1", "x2", "l1", "l", "c", "k")) -> MultiPoly:
    x1, x2, l1, l, c, k = symbols(("x1", "x2", "l1", "l", "c", "k"), variables)
    return -x1 ** 2 * x2 ** 2 + 6 * l1 * x1 * x2 + 2 * l * c * (x1 + x2) + c ** 2 - k ** 2


def kowalevski_R1(variables=("x1", "x2", "l1", "l", "c", "k")) -> MultiPoly:
    x1, x2, l1, l, c, k = symbols(("x1", "x2", "l1", "l", "c", "k"), variables)
    return (-6 * l1 * x1 ** 2 * x2 ** 2 - (c ** 2 - k ** 2) * (x1 + x2) ** 2
            - 4 * c * l * x1 * x2 * (x1 + x2) + 6 * l1 * (c ** 2 - k ** 2) - 4 * c ** 2 * l ** 2)


@dataclass
class FundamentalReport:
    pencil_equals_Q: bool
    leading_is_gap_square: bool
    shifted_form_ok: bool
    F: MultiPoly
    Q: MultiPoly

    @property
    def ok(self):
        return self.pencil_equals_Q and self.leading_is_gap_square and self.shifted_form_ok


def kowalevski_fundamental_check() -> FundamentalReport:
    """Symbolic check that the pencil with the Kowalevski dictionary is ``Q(w=s)``."""
    params = ("l1", "l", "c", "k")
    variables = SX + params
    s, x1, x2, l1, l, c, k = symbols(variables)
    coeffs = [MultiPoly.const(-2, variables), MultiPoly.const(0, variables), 3 * l1,
              -2 * c * l, 2 * (c ** 2 - k ** 2), MultiPoly.const(0, variables)]
    F = _pencil_from_coeffs(coeffs, params).F.align(variables)
    R = kowalevski_R(variables)
    R1 = kowalevski_R1(variables)
    L = (x1 - x2) ** 2
    Q = L * s ** 2 - 2 * R * s - R1
    pencil_equals_Q = (F - Q).is_zero()
    leading = (F.coeff("s", 2) - L).is_zero()
    # shifted form: (x1-x2)^2 (s - l1/2)^2 - R (s - l1/2) - R1/4 == Q(2 s - l1)/4
    u = s - l1 / 2
    Qhat = L * u ** 2 - R * u - R1 / 4
    Qshift = Q.subs({"s": 2 * s - l1}).align(variables) / 4
    shifted = (Qhat - Qshift).is_zero()
    return FundamentalReport(pencil_equals_Q, leading, shifted, F, Q)
