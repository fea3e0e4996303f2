"""Discriminantly separable polynomials of degree two in each of three variables."""
from __future__ import annotations

import cmath
import itertools
import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .algebra import (
    Moebius,
    MultiPoly,
    coeff_matrix,
    rank,
    rank_one_split,
    univariate_coeffs,
)
from .pencil import PencilSpec, pencil_F_darboux

log = logging.getLogger(__name__)

__all__ = [
    "SeparabilityReport",
    "half_discriminant",
    "check_separable",
    "rank1_criterion",
    "rank2_criterion",
    "transpose",
    "moebius_closure",
    "differential_separability_check",
    "symmetric_family_fit",
    "symmetrize",
]


@dataclass
class SeparabilityReport:
    """Verdict and factor data.

    ``splits[v]`` is the exact pair ``(f_first, f_second)`` with
    ``half_discriminant(F, v) == f_first * f_second``; the constant sits in
    ``f_first`` and ``f_second`` is monic.  ``shapes[v]`` is the monic factor
    attached to variable ``v`` and ``scales[v]`` is ``c_v**2`` where the
    consistent factor is ``f_v = c_v * shapes[v]`` (``c_v`` may be irrational).
    """

    verdict: str
    variables: Tuple[str, str, str]
    discriminants: Dict[str, MultiPoly]
    splits: Dict[str, Optional[Tuple[MultiPoly, MultiPoly]]]
    ranks: Dict[str, int]
    shapes: Dict[str, MultiPoly] = field(default_factory=dict)
    scales: Dict[str, Fraction] = field(default_factory=dict)
    degenerate: bool = False
    split_constants: Dict[str, Fraction] = field(default_factory=dict)

    @property
    def separable(self) -> bool:
        return self.verdict in ("strongly", "symmetrically", "plainly")

    def constants(self) -> Dict[str, complex]:
        """Constants ``c_v`` with ``c_j c_k`` equal to the split constant of the third discriminant.

        Only ``c_v**2`` is rational; the signs are tied together, so they are
        fixed from the first variable.
        """
        v1, v2, v3 = self.variables
        c1 = cmath.sqrt(complex(self.scales[v1]))
        k = self.split_constants
        return {v1: c1, v2: complex(k[v3]) / c1, v3: complex(k[v2]) / c1}


def _check_vars(F: MultiPoly, variables) -> Tuple[str, str, str]:
    if variables is None:
        variables = F.variables
    variables = tuple(variables)
    if len(variables) != 3:
        raise ValueError("expected a polynomial in exactly three variables")
    extra = [v for v in F.used_variables() if v not in variables]
    if extra:
        raise ValueError(f"unexpected variables {extra}")
    for v in variables:
        if F.degree(v) > 2:
            raise ValueError(f"degree above 2 in {v}")
    return variables


def half_discriminant(F: MultiPoly, v: str) -> MultiPoly:
    """``B**2 - A C`` for ``F = A v**2 + 2 B v + C``; ``A`` may vanish."""
    A, B2, C = F.coeff(v, 2), F.coeff(v, 1), F.coeff(v, 0)
    B = B2 / 2
    return B * B - A * C


def _others(variables, v):
    return tuple(w for w in variables if w != v)


def _univariate(coeffs, var) -> MultiPoly:
    return MultiPoly((var,), {(k,): c for k, c in enumerate(coeffs)})


def _monic(p: MultiPoly, var: str) -> Tuple[MultiPoly, Fraction]:
    cs = univariate_coeffs(p, var)
    lead = cs[-1]
    return p / lead, lead


def check_separable(F: MultiPoly, variables: Sequence[str] | None = None) -> SeparabilityReport:
    variables = _check_vars(F, variables)
    F = F.align(variables)
    discs, splits, ranks = {}, {}, {}
    degenerate = False
    for v in variables:
        a, b = _others(variables, v)
        D = half_discriminant(F, v).align((a, b))
        discs[v] = D
        table = coeff_matrix(D, a, b)
        ranks[v] = rank(table)
        if ranks[v] == 0:
            degenerate = True
            splits[v] = None
            continue
        split = rank_one_split(table)
        splits[v] = None if split is None else (_univariate(split[0], a), _univariate(split[1], b))

    if any(splits[v] is None and ranks[v] != 0 for v in variables):
        return SeparabilityReport("not", variables, discs, splits, ranks, degenerate=degenerate)

    # proportionality classes of the factor attached to each variable
    shapes: Dict[str, List[Tuple[MultiPoly, Fraction]]] = {v: [] for v in variables}
    consts: Dict[str, Fraction] = {}
    for v in variables:
        if splits[v] is None:
            continue
        a, b = _others(variables, v)
        fa, fb = splits[v]
        ma, la = _monic(fa, a)
        mb, _ = _monic(fb, b)
        shapes[a].append(ma)
        shapes[b].append(mb)
        consts[v] = la
    consistent = all(all((s - group[0]).is_zero() for s in group) for group in shapes.values() if group)
    if not consistent or degenerate:
        if degenerate:
            log.info("zero discriminant present; reporting with degenerate flag")
        verdict = "weakly" if not consistent else "plainly"
        shape = {v: g[0] for v, g in shapes.items() if g}
        return SeparabilityReport(verdict, variables, discs, splits, ranks, shape, {}, degenerate)

    # f_j f_k = k_i n_j n_k  =>  c_j**2 = k_i k_k / k_j  (indices on discriminants)
    v1, v2, v3 = variables
    k = consts
    scales = {
        v1: k[v2] * k[v3] / k[v1],
        v2: k[v1] * k[v3] / k[v2],
        v3: k[v1] * k[v2] / k[v3],
    }
    shape = {v: g[0] for v, g in shapes.items()}

    # c_a = c_b  <=>  k_a = k_b, since c_a c_j = k_b and c_b c_j = k_a
    def same(a, b):
        return (shape[a].rename({a: "t"}) - shape[b].rename({b: "t"})).is_zero() and k[a] == k[b]

    if same(v1, v2) and same(v2, v3):
        verdict = "strongly"
    elif same(v2, v3):
        verdict = "symmetrically"
    else:
        verdict = "plainly"
    return SeparabilityReport(verdict, variables, discs, splits, ranks, shape, scales, degenerate, dict(k))


def _s_parts(F: MultiPoly, variables):
    variables = _check_vars(F, variables)
    s, x1, x2 = variables
    return variables, F.coeff(s, 2), F.coeff(s, 1) / 2, F.coeff(s, 0)


def rank1_criterion(F: MultiPoly, variables: Sequence[str] | None = None):
    """``(rank(T) == 1, T)`` for the table ``T`` of ``B**2 - A C`` in ``(x1, x2)``."""
    (s, x1, x2), A, B, C = _s_parts(F, variables)
    table = coeff_matrix((B * B - A * C).align((x1, x2)), x1, x2)
    r = rank(table)
    if r == 0:
        log.info("B^2 - AC vanishes identically: separable with a zero factor")
    return r == 1, table


def rank2_criterion(F: MultiPoly, variables: Sequence[str] | None = None):
    """Literal rank-two test on ``B**2`` when ``A = A(x1)`` and ``C = C(x2)``.

    Returns ``(rank == 2, rank)``; ranks below two are logged since the
    product form can still hold there.
    """
    (s, x1, x2), A, B, C = _s_parts(F, variables)
    if x2 in A.used_variables() or x1 in C.used_variables():
        raise ValueError("A must depend on x1 only and C on x2 only")
    table = coeff_matrix((B * B).align((x1, x2)), x1, x2)
    r = rank(table)
    if r < 2:
        log.warning("rank of B^2 table is %d < 2; literal criterion reports False", r)
    return r == 2, r


def transpose(F: MultiPoly, var: str = "s") -> MultiPoly:
    """``C s**2 + 2 B s + A`` from ``A s**2 + 2 B s + C``."""
    if F.degree(var) > 2:
        raise ValueError(f"not quadratic in {var}")
    (t,) = [MultiPoly.var(var, F.variables)]
    return F.coeff(var, 0) * t ** 2 + F.coeff(var, 1) * t + F.coeff(var, 2)


def moebius_closure(F: MultiPoly, gamma: Moebius, alpha: Moebius, beta: Moebius,
                    variables: Sequence[str] | None = None) -> MultiPoly:
    """``F(gamma(s), alpha(x1), beta(x2))`` with each denominator cleared to degree 2."""
    variables = _check_vars(F, variables)
    out = F.align(variables)
    for v, m in zip(variables, (gamma, alpha, beta)):
        if m.is_degenerate():
            raise ValueError("degenerate Möbius")
        out = _substitute_quadratic(out, v, m)
    return out


def _substitute_quadratic(p: MultiPoly, v: str, m: Moebius) -> MultiPoly:
    """Homogenize at degree 2 so the result stays biquadratic-shaped."""
    x = MultiPoly.var(v, p.variables)
    num, den = x * m.a + m.b, x * m.c + m.d
    total = MultiPoly.const(0, p.variables)
    for k in range(3):
        ck = p.coeff(v, k)
        if not ck.is_zero():
            total = total + ck * num ** k * den ** (2 - k)
    return total


# differential separability


@dataclass
class DifferentialReport:
    passed: int
    failed: int
    skipped: int
    worst: float
    applicable: bool = True

    @property
    def ok(self):
        return self.applicable and self.failed == 0 and self.passed > 0


def differential_separability_check(F: MultiPoly, sample_count: int = 100, tol: float = 1e-9,
                                    seed: int = 0, variables: Sequence[str] | None = None,
                                    frozen: Optional[str] = None) -> DifferentialReport:
    """Sign-resolved check of ``sum dx_i / sqrt(f_i(x_i)) = 0`` along ``F = 0``.

    The first variable is solved from the quadratic at random rational values
    of the other two.  With ``frozen`` set, that variable's differential is
    zero (the Euler two-term relation).
    """
    report = check_separable(F, variables)
    if not report.separable:
        return DifferentialReport(0, 0, 0, float("nan"), applicable=False)
    vs = report.variables
    fns = {v: report.shapes[v].compile((v,)) for v in vs}
    consts = report.constants()
    Fc = F.align(vs)
    grads = [Fc.diff(v).compile(vs) for v in vs]
    coeffs = [Fc.coeff(vs[0], k).compile(vs) for k in range(3)]
    rng = random.Random(seed)
    passed = failed = skipped = 0
    worst = 0.0
    while passed + failed < sample_count and skipped < 10 * sample_count:
        y, z = rng.uniform(-2, 2), rng.uniform(-2, 2)
        A, B, C = (c(0.0, y, z) for c in reversed(coeffs))
        if abs(A) < 1e-9:
            skipped += 1
            continue
        disc = B * B - 4 * A * C
        if abs(disc) < 1e-6 * (abs(B) ** 2 + 4 * abs(A * C)):
            skipped += 1  # near a branch point of the solved variable
            continue
        root = cmath.sqrt(disc)
        if (B.conjugate() * root).real < 0:
            root = -root
        q = -(B + root) / 2
        x = q / A if rng.random() < 0.5 else C / q
        pt = (x, complex(y), complex(z))
        fvals = [consts[v] * fns[v](p) for v, p in zip(vs, pt)]
        if min(abs(f) for f in fvals) < 1e-8:
            skipped += 1
            continue
        g = [gr(*pt) for gr in grads]
        if abs(g[0]) < 1e-9:
            skipped += 1
            continue
        d = [0j, complex(rng.uniform(-1, 1)), complex(rng.uniform(-1, 1))]
        if frozen is not None:
            i = vs.index(frozen)
            d[i] = 0j
            free = [j for j in (1, 2) if j != i]
            if i == 0:
                # keep x fixed: move along the curve in the other two variables
                if abs(g[2]) < 1e-9:
                    skipped += 1
                    continue
                d[1] = 1 + 0j
                d[2] = -g[1] / g[2]
            else:
                d[free[0]] = 1 + 0j
                d[0] = -g[free[0]] / g[0]
        else:
            d[0] = -(g[1] * d[1] + g[2] * d[2]) / g[0]
        terms = [di / cmath.sqrt(fi) for di, fi in zip(d, fvals)]
        scale = sum(abs(t) for t in terms)
        best = min(abs(sum(e * t for e, t in zip(signs, terms)))
                   for signs in itertools.product((1, -1), repeat=3))
        err = best / max(scale, 1e-300)
        worst = max(worst, err)
        if err < tol:
            passed += 1
        else:
            failed += 1
    return DifferentialReport(passed, failed, skipped, worst)


# symmetric family


@dataclass
class FitResult:
    spec: Optional[PencilSpec]
    reason: str = ""
    residual: Optional[MultiPoly] = None

    @property
    def ok(self):
        return self.spec is not None


def symmetric_family_fit(F: MultiPoly, variables: Sequence[str] | None = None) -> FitResult:
    """Recover ``a0 .. a5`` from the ``s``-coefficient, then check the free term."""
    variables = _check_vars(F, variables)
    s, x1, x2 = variables
    F = F.align(variables).rename({s: "s", x1: "x1", x2: "x2"}).align(("s", "x1", "x2"))
    if not (F - F.swap("x1", "x2")).is_zero():
        raise ValueError("polynomial is not symmetric in x1, x2")
    X1, X2 = MultiPoly.var("x1", F.variables), MultiPoly.var("x2", F.variables)
    if not (F.coeff("s", 2) - (X1 - X2) ** 2).is_zero():
        raise ValueError("leading coefficient is not (x1 - x2)**2")
    K = F.coeff("s", 1).align(("x1", "x2"))
    c = K.terms.get
    get = lambda i, j: c((i, j), Fraction(0))
    a0 = -get(2, 2)
    a1 = get(2, 1) / 2
    a5 = -get(2, 0)
    a2 = -get(1, 1) / 4
    a3 = get(1, 0) / 2
    a4 = -get(0, 0)
    spec = PencilSpec(a0, a1, a2, a3, a4, a5)
    model = pencil_F_darboux(spec).F.align(("s", "x1", "x2"))
    residual = F - model
    if not residual.is_zero():
        which = "s-coefficient" if not residual.coeff("s", 1).is_zero() else "free term"
        return FitResult(None, f"no pencil matches the {which}", residual)
    return FitResult(spec)


# symmetrization


@dataclass
class SymmetrizeResult:
    alpha: Optional[Moebius]
    residual: float
    diagnostics: Dict[str, object] = field(default_factory=dict)

    @property
    def ok(self):
        return self.alpha is not None


def _roots_with_infinity(coeffs: Sequence[Fraction], degree: int = 4):
    """Roots of a binary form of the given degree; missing ones are ``None`` (infinity)."""
    cs = [complex(c) for c in coeffs] + [0j] * (degree + 1 - len(coeffs))
    while len(cs) > 1 and cs[-1] == 0:
        cs.pop()
    finite = list(np.roots(cs[::-1])) if len(cs) > 1 else []
    return [complex(r) for r in finite] + [None] * (degree - len(finite))


def _moebius_through(src, dst) -> Moebius:
    """Möbius map with three prescribed values; ``None`` is infinity."""

    def row(z, w):
        # a z + b - w (c z + d) = 0, homogeneous in z and w
        zz, z1 = (1, 0) if z is None else (z, 1)
        ww, w1 = (1, 0) if w is None else (w, 1)
        return [zz * w1, z1 * w1, -ww * zz, -ww * z1]

    m = np.array([row(z, w) for z, w in zip(src, dst)], dtype=complex)
    _, _, vh = np.linalg.svd(m)
    a, b, c, d = vh[-1].conj()
    return Moebius(complex(a), complex(b), complex(c), complex(d))


def _dist(a, b):
    if a is None or b is None:
        return 0.0 if a is b else float("inf")
    return abs(a - b) / (1 + abs(b))


def _apply(m: Moebius, z):
    if z is None:
        return None if abs(m.c) < 1e-14 else m.a / m.c
    den = m.c * z + m.d
    return None if abs(den) < 1e-14 * (1 + abs(m.a * z + m.b)) else (m.a * z + m.b) / den


def symmetrize(F: MultiPoly, variables: Sequence[str] | None = None, tol: float = 1e-8) -> SymmetrizeResult:
    """Möbius ``alpha`` on the second variable making ``F(s, alpha(x1), x2)`` symmetric-separable.

    ``alpha`` sends the zeros of the ``x2`` factor onto the zeros of the
    ``x1`` factor of the ``s``-discriminant.
    """
    report = check_separable(F, variables)
    if not report.separable:
        return SymmetrizeResult(None, float("inf"), {"reason": "not separable"})
    s, x1, x2 = report.variables
    f1 = univariate_coeffs(report.shapes[x1], x1)
    f2 = univariate_coeffs(report.shapes[x2], x2)
    r1 = _roots_with_infinity(f1)
    r2 = _roots_with_infinity(f2)
    candidates = [Moebius.identity()]
    for perm in itertools.permutations(r1):
        candidates.append(_moebius_through(r2[:3], perm[:3]))
    best = (float("inf"), None)
    for mob in candidates:
        if mob.is_degenerate(1e-12):
            continue
        err = _matching_error([_apply(mob, z) for z in r2], r1)
        if err < best[0]:
            best = (err, mob)
        if best[0] < tol and best[1] is candidates[0]:
            break
    err, mob = best
    if mob is None or err > tol:
        return SymmetrizeResult(None, err, {"cross_ratio_1": _cross_ratio(r1),
                                            "cross_ratio_2": _cross_ratio(r2)})
    residual = _symmetry_residual(F.align(report.variables), report.variables, mob)
    if residual > 1e-6:
        return SymmetrizeResult(None, residual, {"reason": "symmetrized polynomial not symmetric-separable"})
    return SymmetrizeResult(mob, residual, {"root_error": err})


def _matching_error(images, targets):
    best = float("inf")
    for perm in itertools.permutations(range(len(targets))):
        err = max(_dist(images[i], targets[j]) for i, j in enumerate(perm))
        best = min(best, err)
    return best


def _cross_ratio(r):
    if any(z is None for z in r):
        a, b, c, d = sorted(r, key=lambda z: z is None)
        return (c - a) / (c - b)
    a, b, c, d = r
    return (c - a) * (d - b) / ((c - b) * (d - a))


def _symmetry_residual(F: MultiPoly, variables, mob: Moebius, samples: int = 8, seed: int = 1) -> float:
    """Check the two ``x``-factors of the transformed polynomial agree up to a constant.

    After the substitution the ``s``-discriminant is ``g1(x1) g2(x2)``; the
    ratio ``D(x1=u, x2=w) / D(x1=w, x2=u)`` is then identically 1 when
    ``g1`` and ``g2`` coincide, which is tested at random points.
    """
    s, x1, x2 = variables
    A, B, C = (F.coeff(s, k).compile((x1, x2)) for k in (2, 1, 0))

    def disc(u, w):
        den = mob.c * u + mob.d
        xu = (mob.a * u + mob.b) / den
        a, b, c = A(xu, w) * den ** 2, B(xu, w) * den ** 2 / 2, C(xu, w) * den ** 2
        return b * b - a * c

    rng = random.Random(seed)
    worst = 0.0
    for _ in range(samples):
        u, w = complex(rng.uniform(-2, 2), rng.uniform(-1, 1)), complex(rng.uniform(-2, 2), rng.uniform(-1, 1))
        d1, d2 = disc(u, w), disc(w, u)
        worst = max(worst, abs(d1 - d2) / max(abs(d1), abs(d2), 1e-300))
    return worst
