"""Exact multivariate polynomial kernel.

Coefficients are :class:`fractions.Fraction` or :class:`GaussianRational`
(exact ``a + b i`` with rational parts).  Every identity check in the
package runs through this module; floating point never enters here.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational as _RationalABC
from typing import Callable, Dict, Iterable, List, Mapping, Sequence, Tuple, Union

__all__ = [
    "GaussianRational",
    "I",
    "to_exact",
    "MultiPoly",
    "PolyMatrix",
    "Moebius",
    "symbols",
    "discriminant_half",
    "discriminant",
    "det",
    "moebius_substitute",
    "coeff_matrix",
    "from_coeff_matrix",
    "rank",
    "rank_one_split",
    "univariate_coeffs",
    "univariate_gcd",
    "has_simple_roots",
]


class GaussianRational:
    """Exact complex number ``re + im*i`` with rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @staticmethod
    def _lift(x):
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, (int, Fraction)):
            return GaussianRational(x, 0)
        return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return GaussianRational(self.re * o.re - self.im * o.im,
                                self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        n = o.re * o.re + o.im * o.im
        if n == 0:
            raise ZeroDivisionError("division by zero")
        return GaussianRational((self.re * o.re + self.im * o.im) / n,
                                (self.im * o.re - self.re * o.im) / n)

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return o / self

    def __pow__(self, k: int):
        if k < 0:
            return GaussianRational(1) / (self ** -k)
        out = GaussianRational(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def __eq__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return False
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GaussianRational({self.re}, {self.im})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}*i"
        sign = "+" if self.im > 0 else "-"
        return f"({self.re} {sign} {abs(self.im)}*i)"


I = GaussianRational(0, 1)

Coeff = Union[Fraction, GaussianRational]


def to_exact(x) -> Coeff:
    """Convert ints, Fractions, strings like ``"3/4"`` or Gaussian rationals."""
    if isinstance(x, GaussianRational):
        return Fraction(x.re) if x.im == 0 else x
    if isinstance(x, bool):
        raise TypeError("bool is not a coefficient")
    if isinstance(x, (int, Fraction, _RationalABC)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, complex):
        raise TypeError("floating complex values are not exact")
    if isinstance(x, float):
        raise TypeError("floats are not exact; pass a Fraction or a string")
    raise TypeError(f"cannot make an exact coefficient from {x!r}")


def _canon(c):
    if isinstance(c, GaussianRational) and c.im == 0:
        return c.re
    return c


class MultiPoly:
    """Sparse polynomial: exponent tuple -> exact coefficient.

    ``variables`` fixes the meaning of each exponent slot.  Arithmetic
    between polynomials on different variable lists aligns them on the
    union (left operand's order first).
    """

    __slots__ = ("variables", "terms")

    def __init__(self, variables: Sequence[str], terms: Mapping[Tuple[int, ...], object] = ()):
        self.variables: Tuple[str, ...] = tuple(variables)
        if len(set(self.variables)) != len(self.variables):
            raise ValueError("duplicate variable names")
        n = len(self.variables)
        clean: Dict[Tuple[int, ...], Coeff] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for exps, c in items:
            exps = tuple(exps)
            if len(exps) != n:
                raise ValueError("exponent tuple length does not match variables")
            c = _canon(to_exact(c))
            if c:
                clean[exps] = _canon(clean.get(exps, 0) + c) if exps in clean else c
                if not clean[exps]:
                    del clean[exps]
        self.terms: Dict[Tuple[int, ...], Coeff] = clean

    # construction helpers
    @classmethod
    def const(cls, c, variables: Sequence[str] = ()) -> "MultiPoly":
        return cls(variables, {(0,) * len(variables): c})

    @classmethod
    def var(cls, name: str, variables: Sequence[str] | None = None) -> "MultiPoly":
        variables = tuple(variables) if variables is not None else (name,)
        exps = tuple(1 if v == name else 0 for v in variables)
        if name not in variables:
            raise ValueError(f"{name} not in {variables}")
        return cls(variables, {exps: 1})

    @classmethod
    def _raw(cls, variables, terms) -> "MultiPoly":
        p = cls.__new__(cls)
        p.variables = variables
        p.terms = terms
        return p

    # alignment
    def align(self, variables: Sequence[str]) -> "MultiPoly":
        variables = tuple(variables)
        if variables == self.variables:
            return self
        missing = [v for v in self.variables if v not in variables]
        for v in missing:
            if self.degree(v) > 0:
                raise ValueError(f"cannot drop variable {v} that is in use")
        idx = [self.variables.index(v) if v in self.variables else None for v in variables]
        terms = {}
        for e, c in self.terms.items():
            terms[tuple(e[i] if i is not None else 0 for i in idx)] = c
        return MultiPoly._raw(variables, terms)

    def _pair(self, other):
        if not isinstance(other, MultiPoly):
            try:
                other = MultiPoly.const(other, self.variables)
            except TypeError:
                return None, None
        if other.variables == self.variables:
            return self, other
        union = self.variables + tuple(v for v in other.variables if v not in self.variables)
        return self.align(union), other.align(union)

    # arithmetic
    def __add__(self, other):
        a, b = self._pair(other)
        if a is None:
            return NotImplemented
        terms = dict(a.terms)
        for e, c in b.terms.items():
            s = terms.get(e)
            s = c if s is None else _canon(s + c)
            if s:
                terms[e] = s
            else:
                terms.pop(e, None)
        return MultiPoly._raw(a.variables, terms)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly._raw(self.variables, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        a, b = self._pair(other)
        if a is None:
            return NotImplemented
        return a + (-b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            try:
                c = _canon(to_exact(other))
            except TypeError:
                return NotImplemented
            if not c:
                return MultiPoly._raw(self.variables, {})
            return MultiPoly._raw(self.variables, {e: _canon(v * c) for e, v in self.terms.items()})
        a, b = self._pair(other)
        terms: Dict[Tuple[int, ...], Coeff] = {}
        for e1, c1 in a.terms.items():
            for e2, c2 in b.terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                prod = c1 * c2
                s = terms.get(e)
                terms[e] = prod if s is None else s + prod
        return MultiPoly._raw(a.variables, {e: _canon(c) for e, c in terms.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, other):
        c = _canon(to_exact(other))
        if not c:
            raise ZeroDivisionError("division of a polynomial by zero")
        return MultiPoly._raw(self.variables, {e: _canon(v / c) for e, v in self.terms.items()})

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only non-negative integer powers")
        out = MultiPoly.const(1, self.variables)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if not isinstance(other, MultiPoly):
            try:
                other = MultiPoly.const(other, self.variables)
            except TypeError:
                return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        return hash(frozenset((self._named_exps(e), c) for e, c in self.terms.items()))

    def _named_exps(self, e):
        return tuple((v, k) for v, k in zip(self.variables, e) if k)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_value(self) -> Coeff:
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return next(iter(self.terms.values()), Fraction(0))

    # structure
    def used_variables(self) -> Tuple[str, ...]:
        return tuple(v for i, v in enumerate(self.variables)
                     if any(e[i] for e in self.terms))

    def trim(self) -> "MultiPoly":
        return self.align(self.used_variables())

    def degree(self, var: str | None = None) -> int:
        if not self.terms:
            return -1
        if var is None:
            return max(sum(e) for e in self.terms)
        if var not in self.variables:
            return 0
        i = self.variables.index(var)
        return max(e[i] for e in self.terms)

    def coeff(self, var: str, k: int) -> "MultiPoly":
        """Coefficient of ``var**k`` (still carried on the same variable list)."""
        if var not in self.variables:
            return self if k == 0 else MultiPoly._raw(self.variables, {})
        i = self.variables.index(var)
        terms = {}
        for e, c in self.terms.items():
            if e[i] == k:
                terms[e[:i] + (0,) + e[i + 1:]] = c
        return MultiPoly._raw(self.variables, terms)

    def coefficients_in(self, var: str) -> List["MultiPoly"]:
        """``[c_0, c_1, ..., c_d]`` with ``self == sum c_k var**k``."""
        return [self.coeff(var, k) for k in range(max(self.degree(var), 0) + 1)]

    def diff(self, var: str) -> "MultiPoly":
        if var not in self.variables:
            return MultiPoly._raw(self.variables, {})
        i = self.variables.index(var)
        terms = {}
        for e, c in self.terms.items():
            if e[i]:
                terms[e[:i] + (e[i] - 1,) + e[i + 1:]] = _canon(c * e[i])
        return MultiPoly._raw(self.variables, terms)

    def rename(self, mapping: Mapping[str, str]) -> "MultiPoly":
        new = tuple(mapping.get(v, v) for v in self.variables)
        return MultiPoly(new, self.terms)

    def swap(self, a: str, b: str) -> "MultiPoly":
        p = self.align(self.variables + tuple(v for v in (a, b) if v not in self.variables))
        return p.rename({a: b, b: a}).align(p.variables)

    def subs(self, values: Mapping[str, object]) -> "MultiPoly":
        """Substitute polynomials or exact scalars for variables."""
        targets = [v for v in values if v in self.variables]
        if not targets:
            return self
        keep = tuple(v for v in self.variables if v not in targets)
        repl = {}
        out_vars = keep
        for v in targets:
            r = values[v]
            if isinstance(r, MultiPoly):
                out_vars = out_vars + tuple(w for w in r.variables if w not in out_vars)
        for v in targets:
            r = values[v]
            repl[v] = r.align(out_vars) if isinstance(r, MultiPoly) else MultiPoly.const(r, out_vars)
        keep_idx = [self.variables.index(v) for v in keep]
        tgt_idx = [self.variables.index(v) for v in targets]
        power_cache: Dict[Tuple[str, int], MultiPoly] = {}

        def power(v, k):
            key = (v, k)
            if key not in power_cache:
                power_cache[key] = repl[v] ** k
            return power_cache[key]

        total = MultiPoly._raw(out_vars, {})
        grouped: Dict[Tuple[int, ...], Dict[Tuple[int, ...], Coeff]] = {}
        for e, c in self.terms.items():
            tk = tuple(e[i] for i in tgt_idx)
            kk = tuple(e[i] for i in keep_idx) + (0,) * (len(out_vars) - len(keep))
            grouped.setdefault(tk, {})[kk] = c
        for tk, rest in grouped.items():
            part = MultiPoly._raw(out_vars, dict(rest))
            for v, k in zip(targets, tk):
                if k:
                    part = part * power(v, k)
            total = total + part
        return total

    def evaluate(self, point: Mapping[str, object]):
        """Evaluate at a point; exact if all values are exact, else complex."""
        vals = [point[v] for v in self.variables if v in point]
        if len(vals) != len(self.variables):
            missing = [v for v in self.variables if v not in point]
            raise KeyError(f"missing values for {missing}")
        exact = all(isinstance(x, (int, Fraction, GaussianRational)) for x in vals)
        if exact:
            vals = [to_exact(x) for x in vals]
            total = Fraction(0)
        else:
            vals = [complex(x) for x in vals]
            total = 0j
        for e, c in self.terms.items():
            term = c if exact else complex(c)
            for x, k in zip(vals, e):
                if k:
                    term = term * x ** k
            total = total + term
        return _canon(total) if exact else total

    def compile(self, order: Sequence[str] | None = None) -> Callable:
        """Fast numeric evaluator ``f(*values)`` over the given variable order."""
        order = tuple(order) if order is not None else self.variables
        for v in self.used_variables():
            if v not in order:
                raise ValueError(f"variable {v} missing from evaluation order")
        args = [f"_v{i}" for i in range(len(order))]
        pos = {v: args[order.index(v)] for v in self.variables if v in order}
        parts = []
        for e, c in sorted(self.terms.items()):
            z = complex(c)
            factors = [repr(z) if z.imag else repr(z.real)]
            for v, k in zip(self.variables, e):
                if k == 1:
                    factors.append(pos[v])
                elif k > 1:
                    factors.append(f"{pos[v]}**{k}")
            parts.append("*".join(factors))
        body = " + ".join(parts) if parts else "0.0"
        src = f"def _f({', '.join(args)}):\n    return {body}\n"
        ns: Dict[str, object] = {}
        exec(compile(src, "<multipoly>", "exec"), {}, ns)
        return ns["_f"]

    # display
    def _sort_key(self, e):
        return (-sum(e), tuple(-k for k in e))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, key=self._sort_key):
            c = self.terms[e]
            mono = "*".join(v if k == 1 else f"{v}^{k}" for v, k in zip(self.variables, e) if k)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        out = " + ".join(parts)
        return out.replace("+ -", "- ")

    def __repr__(self):
        return f"MultiPoly({self.variables!r}, {str(self)!r})"


def symbols(names: str | Iterable[str], variables: Sequence[str] | None = None) -> Tuple[MultiPoly, ...]:
    """``s, x = symbols("s x")``: each symbol carried on the shared variable list."""
    if isinstance(names, str):
        names = names.replace(",", " ").split()
    names = tuple(names)
    variables = tuple(variables) if variables is not None else names
    return tuple(MultiPoly.var(n, variables) for n in names)


def _quadratic_parts(p: MultiPoly, v: str):
    if p.degree(v) != 2:
        raise ValueError("not quadratic in variable")
    return p.coeff(v, 2), p.coeff(v, 1), p.coeff(v, 0)


def discriminant_half(p: MultiPoly, v: str) -> MultiPoly:
    """``B**2 - A*C`` for ``p = A v**2 + 2 B v + C``."""
    a, b2, c = _quadratic_parts(p, v)
    b = b2 / 2
    return b * b - a * c


def discriminant(p: MultiPoly, v: str) -> MultiPoly:
    """Classical ``b**2 - 4 a c`` for ``p = a v**2 + b v + c`` (four times the half form)."""
    a, b, c = _quadratic_parts(p, v)
    return b * b - 4 * a * c


class PolyMatrix:
    """Rectangular grid of polynomials sharing one variable list."""

    def __init__(self, rows: Sequence[Sequence[object]], variables: Sequence[str] | None = None):
        if not rows:
            raise ValueError("empty matrix")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise ValueError("matrix is not rectangular")
        if variables is None:
            variables = ()
            for r in rows:
                for x in r:
                    if isinstance(x, MultiPoly):
                        variables = variables + tuple(v for v in x.variables if v not in variables)
        self.variables = tuple(variables)
        self.rows = [[x.align(self.variables) if isinstance(x, MultiPoly)
                      else MultiPoly.const(x, self.variables) for x in r] for r in rows]

    @property
    def shape(self):
        return len(self.rows), len(self.rows[0])

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def transpose(self) -> "PolyMatrix":
        return PolyMatrix([list(c) for c in zip(*self.rows)], self.variables)

    def minor(self, drop_rows: Iterable[int], drop_cols: Iterable[int]) -> "PolyMatrix":
        dr, dc = set(drop_rows), set(drop_cols)
        return PolyMatrix([[x for j, x in enumerate(r) if j not in dc]
                           for i, r in enumerate(self.rows) if i not in dr], self.variables)

    def swap_rows(self, i: int, j: int) -> "PolyMatrix":
        rows = [list(r) for r in self.rows]
        rows[i], rows[j] = rows[j], rows[i]
        return PolyMatrix(rows, self.variables)


def det(m: PolyMatrix) -> MultiPoly:
    """Exact determinant by Laplace expansion with memoised minors."""
    n, k = m.shape
    if n != k:
        raise ValueError("determinant of a non-square matrix")
    rows = m.rows
    zero = MultiPoly.const(0, m.variables)
    memo: Dict[Tuple[int, Tuple[int, ...]], MultiPoly] = {}

    # expand row by row; the minor built from rows i.. and a column subset
    def sub(i: int, cols: Tuple[int, ...]) -> MultiPoly:
        if i == n:
            return MultiPoly.const(1, m.variables)
        key = (i, cols)
        if key in memo:
            return memo[key]
        total = zero
        for pos, j in enumerate(cols):
            a = rows[i][j]
            if a.is_zero():
                continue
            rest = sub(i + 1, cols[:pos] + cols[pos + 1:])
            term = a * rest
            total = total + term if pos % 2 == 0 else total - term
        memo[key] = total
        return total

    return sub(0, tuple(range(n)))


@dataclass(frozen=True)
class Moebius:
    """``v -> (a v + b) / (c v + d)``."""

    a: object
    b: object
    c: object
    d: object

    @property
    def determinant(self):
        return self.a * self.d - self.b * self.c

    def is_degenerate(self, tol: float = 0.0) -> bool:
        dt = self.determinant
        if isinstance(dt, (Fraction, GaussianRational, int)):
            return dt == 0
        return abs(dt) <= tol

    def __call__(self, x):
        """Numeric or exact application; ``None`` stands for infinity."""
        a, b, c, d = self.a, self.b, self.c, self.d
        if x is None:
            return None if c == 0 else a / c
        den = c * x + d
        if den == 0:
            return None
        return (a * x + b) / den

    def inverse(self) -> "Moebius":
        return Moebius(self.d, -self.b, -self.c, self.a)

    def compose(self, other: "Moebius") -> "Moebius":
        """``self(other(v))``."""
        return Moebius(self.a * other.a + self.b * other.c, self.a * other.b + self.b * other.d,
                       self.c * other.a + self.d * other.c, self.c * other.b + self.d * other.d)

    @classmethod
    def identity(cls) -> "Moebius":
        return cls(Fraction(1), Fraction(0), Fraction(0), Fraction(1))


def moebius_substitute(p: MultiPoly, v: str, m: Moebius) -> MultiPoly:
    """Substitute ``v <- (a v + b)/(c v + d)`` and clear ``(c v + d)**deg_v(p)``."""
    if m.is_degenerate():
        raise ValueError("degenerate Möbius")
    n = p.degree(v)
    if n <= 0:
        return p
    (x,) = symbols(v, p.variables)
    num = x * m.a + m.b
    den = x * m.c + m.d
    total = MultiPoly.const(0, p.variables)
    for k, ck in enumerate(p.coefficients_in(v)):
        if ck.is_zero():
            continue
        total = total + ck * num ** k * den ** (n - k)
    return total


def coeff_matrix(p: MultiPoly, xvar: str, yvar: str) -> List[List[Coeff]]:
    """5x5 table ``T[i][j]`` = coefficient of ``xvar**i * yvar**j``."""
    extra = [v for v in p.used_variables() if v not in (xvar, yvar)]
    if extra:
        raise ValueError(f"polynomial depends on extra variables {extra}")
    if p.degree(xvar) > 4 or p.degree(yvar) > 4:
        raise ValueError("degree above 4 in a variable")
    q = p.align((xvar, yvar))
    table = [[Fraction(0)] * 5 for _ in range(5)]
    for (i, j), c in q.terms.items():
        table[i][j] = c
    return table


def from_coeff_matrix(table: Sequence[Sequence[object]], xvar: str, yvar: str) -> MultiPoly:
    return MultiPoly((xvar, yvar), {(i, j): c for i, row in enumerate(table)
                                    for j, c in enumerate(row)})


def _row_echelon(table: Sequence[Sequence[object]]):
    rows = [[to_exact(x) for x in r] for r in table]
    nrows = len(rows)
    ncols = len(rows[0]) if rows else 0
    pivots = []
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, nrows) if rows[i][col]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        p = rows[r][col]
        for i in range(r + 1, nrows):
            if rows[i][col]:
                f = rows[i][col] / p
                rows[i] = [_canon(a - f * b) for a, b in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
        if r == nrows:
            break
    return rows, pivots


def rank(table: Sequence[Sequence[object]]) -> int:
    """Exact rank over the rationals (or Gaussian rationals)."""
    if not table:
        return 0
    return len(_row_echelon(table)[1])


def rank_one_split(table: Sequence[Sequence[object]]):
    """Return ``(u, v)`` with ``table == outer(u, v)`` when the rank is one, else ``None``.

    ``v`` is normalised so that its last nonzero entry is 1; the scale sits in ``u``.
    """
    rows = [[to_exact(x) for x in r] for r in table]
    nz = [(i, j) for i, r in enumerate(rows) for j, x in enumerate(r) if x]
    if not nz:
        return None
    i0 = nz[0][0]
    v = rows[i0]
    jlast = max(j for j, x in enumerate(v) if x)
    lead = v[jlast]
    v = [_canon(x / lead) for x in v]
    u = [_canon(r[jlast]) for r in rows]
    for r, ui in zip(rows, u):
        for x, vj in zip(r, v):
            if _canon(x - ui * vj):
                return None
    return u, v


def univariate_coeffs(p: MultiPoly, var: str) -> List[Coeff]:
    """Exact coefficients ``[c0, c1, ...]`` of a univariate polynomial."""
    extra = [v for v in p.used_variables() if v != var]
    if extra:
        raise ValueError(f"not univariate in {var}: also depends on {extra}")
    return [c.constant_value() for c in p.coefficients_in(var)] if not p.is_zero() else []


def _strip(c):
    c = list(c)
    while c and not c[-1]:
        c.pop()
    return c


def univariate_rem(a: Sequence[object], b: Sequence[object]) -> List[Coeff]:
    """Exact remainder of ``a`` modulo ``b`` (ascending coefficient lists)."""
    r, b = _strip(map(to_exact, a)), _strip(map(to_exact, b))
    if not b:
        raise ZeroDivisionError("division by the zero polynomial")
    while len(r) >= len(b) and r:
        f = r[-1] / b[-1]
        shift = len(r) - len(b)
        for k, bk in enumerate(b):
            r[shift + k] = _canon(r[shift + k] - f * bk)
        r = _strip(r)
    return r


def univariate_gcd(a: Sequence[object], b: Sequence[object]) -> List[Coeff]:
    """Monic gcd of two coefficient lists (ascending powers)."""
    a, b = _strip(map(to_exact, a)), _strip(map(to_exact, b))
    while b:
        a, b = b, univariate_rem(a, b)
    if not a:
        return []
    lead = a[-1]
    return [_canon(x / lead) for x in a]


def has_simple_roots(coeffs: Sequence[object]) -> bool:
    c = _strip(map(to_exact, coeffs))
    deriv = [k * ck for k, ck in enumerate(c)][1:]
    return len(univariate_gcd(c, deriv)) == 1
