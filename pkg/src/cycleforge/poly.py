"""Sparse multivariate polynomials over the exact fields of :mod:`cycleforge.fields`.

Terms are stored as a dict from exponent tuples to nonzero coefficients.  The
canonical order is graded lexicographic (higher total degree first, ties broken
lexicographically with ``x0 > x1 > ...``), used for printing and for exact division.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from .fields import Field, FieldMismatchError, common_field

Exponent = tuple[int, ...]


class NonExactDivisionError(ArithmeticError):
    """Raised when a claimed divisor does not divide."""


class TripleRootError(ValueError):
    """Raised when a binary cubic is a perfect cube of a linear form."""


def default_names(nvars: int) -> tuple[str, ...]:
    return tuple(f"x{i}" for i in range(nvars))


def grlex_key(e: Exponent):
    return (sum(e), e)


class Poly:
    """An immutable sparse polynomial in ``nvars`` variables over ``field``."""

    __slots__ = ("field", "nvars", "terms", "names", "_hash")

    def __init__(
        self,
        field: Field,
        nvars: int,
        terms: dict[Exponent, object] | None = None,
        names: Sequence[str] | None = None,
    ) -> None:
        clean = {}
        for e, c in (terms or {}).items():
            if len(e) != nvars:
                raise ValueError(f"exponent {e} has wrong length for {nvars} variables")
            c = field(c)
            if c:
                clean[tuple(e)] = c
        self.field = field
        self.nvars = nvars
        self.terms = clean
        self.names = tuple(names) if names is not None else default_names(nvars)
        if len(self.names) != nvars:
            raise ValueError("names do not match variable count")
        self._hash = None

    # construction -----------------------------------------------------------

    @classmethod
    def zero(cls, field: Field, nvars: int, names=None) -> Poly:
        return cls(field, nvars, {}, names)

    @classmethod
    def const(cls, field: Field, nvars: int, c, names=None) -> Poly:
        return cls(field, nvars, {(0,) * nvars: c}, names)

    @classmethod
    def var(cls, field: Field, nvars: int, i: int, names=None) -> Poly:
        e = [0] * nvars
        e[i] = 1
        return cls(field, nvars, {tuple(e): field.one}, names)

    @classmethod
    def gens(cls, field: Field, nvars: int, names=None) -> list[Poly]:
        return [cls.var(field, nvars, i, names) for i in range(nvars)]

    def _new(self, terms: dict) -> Poly:
        return Poly(self.field, self.nvars, terms, self.names)

    def with_names(self, names: Sequence[str]) -> Poly:
        return Poly(self.field, self.nvars, self.terms, names)

    # basic properties ------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def degree_in(self, i: int) -> int:
        return max((e[i] for e in self.terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    def sorted_terms(self) -> list[tuple[Exponent, object]]:
        return sorted(self.terms.items(), key=lambda t: grlex_key(t[0]), reverse=True)

    def leading_term(self) -> tuple[Exponent, object]:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        e = max(self.terms, key=grlex_key)
        return e, self.terms[e]

    def coefficient(self, e: Exponent):
        return self.terms.get(tuple(e), self.field.zero)

    def constant_value(self):
        if any(any(e) for e in self.terms):
            raise ValueError("polynomial is not constant")
        return self.terms.get((0,) * self.nvars, self.field.zero)

    # arithmetic -------------------------------------------------------------

    def _coerce(self, other) -> Poly | None:
        if isinstance(other, Poly):
            if other.nvars != self.nvars:
                raise ValueError("variable count mismatch")
            if other.field != self.field:
                raise FieldMismatchError(f"{self.field!r} vs {other.field!r}")
            return other
        try:
            return Poly.const(self.field, self.nvars, self.field(other), self.names)
        except (TypeError, FieldMismatchError):
            return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        terms = dict(self.terms)
        for e, c in o.terms.items():
            terms[e] = terms[e] + c if e in terms else c
        return self._new(terms)

    __radd__ = __add__

    def __neg__(self):
        return self._new({e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        terms: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in o.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                c = c1 * c2
                terms[e] = terms[e] + c if e in terms else c
        return self._new(terms)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        result = Poly.const(self.field, self.nvars, self.field.one, self.names)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def scale(self, c) -> Poly:
        c = self.field(c)
        return self._new({e: v * c for e, v in self.terms.items()})

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.nvars == other.nvars and self.terms == other.terms
        try:
            o = self._coerce(other)
        except (ValueError, FieldMismatchError):
            return False
        if o is None:
            return NotImplemented
        return self.terms == o.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self.terms.items())))
        return self._hash

    # evaluation and substitution ----------------------------------------------

    def eval(self, point: Sequence) -> object:
        """Exact value at ``point`` (length must equal the variable count)."""
        if len(point) != self.nvars:
            raise ValueError(f"point has {len(point)} coordinates, expected {self.nvars}")
        pt = [self.field(v) for v in point]
        total = self.field.zero
        powers: dict[tuple[int, int], object] = {}
        for e, c in self.terms.items():
            term = c
            for i, k in enumerate(e):
                if k:
                    key = (i, k)
                    if key not in powers:
                        powers[key] = pt[i] ** k
                    term = term * powers[key]
            total = total + term
        return total

    __call__ = eval

    def subs(self, assignments: dict[int, object]) -> Poly:
        """Substitute constants for some variables (the variable count is kept)."""
        values = {i: self.field(v) for i, v in assignments.items()}
        terms: dict = {}
        for e, c in self.terms.items():
            ne = list(e)
            for i, v in values.items():
                if e[i]:
                    c = c * v ** e[i]
                    ne[i] = 0
            ne = tuple(ne)
            terms[ne] = terms[ne] + c if ne in terms else c
        return self._new(terms)

    def substitute_linear(self, matrix: Sequence[Sequence], names=None) -> Poly:
        """Compose with a linear map: old variable ``i`` becomes ``sum_j matrix[i][j] * y_j``."""
        if len(matrix) != self.nvars:
            raise ValueError(f"matrix has {len(matrix)} rows, expected {self.nvars}")
        widths = {len(row) for row in matrix}
        if len(widths) != 1:
            raise ValueError("ragged substitution matrix")
        m = widths.pop()
        forms = []
        for row in matrix:
            terms = {}
            for j, v in enumerate(row):
                e = [0] * m
                e[j] = 1
                terms[tuple(e)] = v
            forms.append(Poly(self.field, m, terms, names))
        one = Poly.const(self.field, m, self.field.one, names)
        cache: dict[tuple[int, int], Poly] = {}

        def power(i: int, k: int) -> Poly:
            if k == 0:
                return one
            if (i, k) not in cache:
                cache[(i, k)] = power(i, k - 1) * forms[i]
            return cache[(i, k)]

        result = Poly.zero(self.field, m, names)
        for e, c in self.terms.items():
            term = one.scale(c)
            for i, k in enumerate(e):
                if k:
                    term = term * power(i, k)
            result = result + term
        return result

    def compose(self, images: Sequence[Poly]) -> Poly:
        """Substitute the polynomial ``images[i]`` (all in one common ring) for variable ``i``."""
        if len(images) != self.nvars:
            raise ValueError(f"{len(images)} images for {self.nvars} variables")
        ring = images[0]
        one = Poly.const(self.field, ring.nvars, self.field.one, ring.names)
        cache: dict[tuple[int, int], Poly] = {}

        def power(i: int, k: int) -> Poly:
            if k == 0:
                return one
            if (i, k) not in cache:
                cache[(i, k)] = power(i, k - 1) * images[i]
            return cache[(i, k)]

        result = Poly.zero(self.field, ring.nvars, ring.names)
        for e, c in self.terms.items():
            term = one.scale(c)
            for i, k in enumerate(e):
                if k:
                    term = term * power(i, k)
            result = result + term
        return result

    def drop_variable(self, var: int) -> Poly:
        """Remove a variable that does not occur."""
        if self.degree_in(var) > 0:
            raise ValueError(f"variable {self.names[var]} still occurs")
        names = self.names[:var] + self.names[var + 1 :]
        return Poly(self.field, self.nvars - 1, {e[:var] + e[var + 1 :]: c for e, c in self.terms.items()}, names)

    def collect(self, var: int) -> list[Poly]:
        """Coefficients ``c_k`` (free of ``var``) with ``self = sum_k c_k * var^k``."""
        if not 0 <= var < self.nvars:
            raise ValueError("variable index out of range")
        deg = max(0, self.degree_in(var))
        buckets: list[dict] = [{} for _ in range(deg + 1)]
        for e, c in self.terms.items():
            ne = e[:var] + (0,) + e[var + 1 :]
            buckets[e[var]][ne] = c
        return [self._new(b) for b in buckets]

    def derivative(self, var: int) -> Poly:
        terms: dict = {}
        for e, c in self.terms.items():
            if e[var]:
                ne = e[:var] + (e[var] - 1,) + e[var + 1 :]
                terms[ne] = c * e[var]
        return self._new(terms)

    def gradient(self) -> list[Poly]:
        return [self.derivative(i) for i in range(self.nvars)]

    def divide_exact(self, g: Poly) -> Poly:
        """The quotient ``f / g``; raises :class:`NonExactDivisionError` unless ``g | f``."""
        g = self._coerce(g)
        if g is None or g.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        ge, gc = g.leading_term()
        ginv = self.field.one / gc
        rem = self
        quot: dict = {}
        while rem.terms:
            re_, rc = rem.leading_term()
            shift = tuple(a - b for a, b in zip(re_, ge))
            if any(s < 0 for s in shift):
                raise NonExactDivisionError("divisor does not divide")
            c = rc * ginv
            quot[shift] = c
            rem = rem - g * self._new({shift: c})
        return self._new(quot)

    def map_coefficients(self, fn, field: Field) -> Poly:
        return Poly(field, self.nvars, {e: fn(c) for e, c in self.terms.items()}, self.names)

    def specialize(self, m) -> Poly:
        """Reduce the coefficients with a :class:`~cycleforge.fields.SpecializationMap`."""
        return self.map_coefficients(m, m.field)

    def embed(self, nvars: int, positions: Sequence[int], names=None) -> Poly:
        """Re-home variable ``i`` as variable ``positions[i]`` of a ring with ``nvars`` variables."""
        terms = {}
        for e, c in self.terms.items():
            ne = [0] * nvars
            for i, k in enumerate(e):
                ne[positions[i]] += k
            terms[tuple(ne)] = c
        return Poly(self.field, nvars, terms, names)

    def int_terms(self) -> list[tuple[Exponent, int]]:
        """Terms with integer residues; only for prime-field polynomials."""
        if not self.field.is_finite:
            raise TypeError("integer terms only exist over F_q")
        return [(e, c.r) for e, c in self.terms.items()]

    # text format ---------------------------------------------------------------

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(
                name if k == 1 else f"{name}^{k}" for name, k in zip(self.names, e) if k
            )
            s = self.field.format(c)
            plain = re.fullmatch(r"-?\d+(/\d+)?", s) is not None
            if not mono:
                parts.append(s if plain else f"({s})")
            elif s == "1":
                parts.append(mono)
            elif s == "-1":
                parts.append("-" + mono)
            else:
                parts.append((s if plain else f"({s})") + "*" + mono)
        return " + ".join(parts)

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"Poly({self.field!r}, {self.to_text()!r})"

    @classmethod
    def from_text(cls, text: str, field: Field, names: Sequence[str]) -> Poly:
        """Parse the format produced by :meth:`to_text`."""
        names = tuple(names)
        index = {n: i for i, n in enumerate(names)}
        nvars = len(names)
        text = text.strip()
        if text == "0":
            return cls.zero(field, nvars, names)
        terms: dict = {}
        for chunk in _split_top(text, " + "):
            chunk = chunk.strip()
            sign = 1
            if chunk.startswith("-") and not re.match(r"-\d", chunk):
                sign, chunk = -1, chunk[1:]
            coef = field.one
            factors = _split_top(chunk, "*")
            e = [0] * nvars
            for k, fac in enumerate(factors):
                fac = fac.strip()
                if fac.startswith("(") and fac.endswith(")"):
                    if k:
                        raise ValueError(f"coefficient must come first in {chunk!r}")
                    coef = field.parse(fac[1:-1])
                    continue
                m = re.fullmatch(r"([A-Za-z_]\w*)(?:\^(\d+))?", fac)
                if m and m.group(1) in index:
                    e[index[m.group(1)]] += int(m.group(2) or 1)
                elif k == 0:
                    coef = field.parse(fac)
                else:
                    raise ValueError(f"bad factor {fac!r}")
            e = tuple(e)
            c = coef * sign
            terms[e] = terms[e] + c if e in terms else c
        return cls(field, nvars, terms, names)


def _split_top(text: str, sep: str) -> list[str]:
    """Split on ``sep`` outside parentheses."""
    parts, depth, start, i = [], 0, 0, 0
    while i < len(text):
        ch = text[i]
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif depth == 0 and text.startswith(sep, i):
            parts.append(text[start:i])
            i += len(sep)
            start = i
            continue
        i += 1
    parts.append(text[start:])
    return parts


def poly_from_exponent_map(field: Field, nvars: int, coeffs: dict, names=None) -> Poly:
    return Poly(field, nvars, coeffs, names)


def linear_form(field: Field, coeffs: Sequence, names=None) -> Poly:
    n = len(coeffs)
    return sum(
        (Poly.var(field, n, i, names).scale(c) for i, c in enumerate(coeffs) if c),
        Poly.zero(field, n, names),
    )


def infer_field(values: Iterable) -> Field:
    return common_field(values)


# ---------------------------------------------------------------------------
# univariate helpers (dense, low degree first)


def _utrim(p: list) -> list:
    while p and not p[-1]:
        p = p[:-1]
    return p


def _udivmod(f: list, g: list, field: Field) -> tuple[list, list]:
    f, g = _utrim(list(f)), _utrim(list(g))
    if not g:
        raise ZeroDivisionError
    q = [field.zero] * max(0, len(f) - len(g) + 1)
    inv = field.one / g[-1]
    while len(f) >= len(g) and f:
        k = len(f) - len(g)
        c = f[-1] * inv
        q[k] = c
        for i, gc in enumerate(g):
            f[i + k] = f[i + k] - c * gc
        f = _utrim(f)
    return q, f


def _ugcd(f: list, g: list, field: Field) -> list:
    f, g = _utrim(list(f)), _utrim(list(g))
    while g:
        _, r = _udivmod(f, g, field)
        f, g = g, r
    if not f:
        return f
    inv = field.one / f[-1]
    return [c * inv for c in f]


def _uderiv(f: list) -> list:
    return [c * i for i, c in enumerate(f)][1:]


# ---------------------------------------------------------------------------
# binary cubics


@dataclass(frozen=True)
class BinaryCubic:
    """``c0*X^3 + c1*X^2*Y + c2*X*Y^2 + c3*Y^3``."""

    c0: object
    c1: object
    c2: object
    c3: object

    @property
    def coeffs(self) -> tuple:
        return (self.c0, self.c1, self.c2, self.c3)

    @property
    def field(self) -> Field:
        return common_field(self.coeffs)

    @classmethod
    def from_poly(cls, f: Poly, x: int, y: int) -> BinaryCubic:
        """Read a homogeneous cubic in variables ``x`` and ``y`` (others must be absent)."""
        cs = []
        for k in (3, 2, 1, 0):
            e = [0] * f.nvars
            e[x], e[y] = k, 3 - k
            cs.append(f.coefficient(tuple(e)))
        bc = cls(*cs)
        if bc.to_poly(f.field, f.nvars, x, y, f.names) != f:
            raise ValueError("not a binary cubic in the given variables")
        return bc

    def to_poly(self, field: Field, nvars: int = 2, x: int = 0, y: int = 1, names=None) -> Poly:
        terms = {}
        for k, c in zip((3, 2, 1, 0), self.coeffs):
            e = [0] * nvars
            e[x], e[y] = k, 3 - k
            terms[tuple(e)] = c
        return Poly(field, nvars, terms, names)

    def __call__(self, X, Y):
        return self.c0 * X**3 + self.c1 * X**2 * Y + self.c2 * X * Y**2 + self.c3 * Y**3

    def is_zero(self) -> bool:
        return not any(self.coeffs)


@dataclass(frozen=True)
class DoubleRoot:
    """``g = l^2 * m`` with ``l`` vanishing at ``root`` and ``m = cofactor[0]*X + cofactor[1]*Y``."""

    root: tuple
    cofactor: tuple


def double_root(g: BinaryCubic, field: Field | None = None) -> DoubleRoot | None:
    """The double root of a binary cubic, via the gcd of ``g(X, 1)`` and its derivative.

    Returns None when ``g`` is squarefree; raises :class:`TripleRootError` when ``g``
    is a cube of a linear form.  The root is normalized to ``(r, 1)`` or ``(1, 0)``;
    the cofactor absorbs the leading constant.
    """
    field = field or g.field
    c = [field(v) for v in g.coeffs]
    if not any(c):
        raise ValueError("zero binary cubic")
    h = _utrim([c[3], c[2], c[1], c[0]])  # g(X, 1), low degree first
    mult_inf = 3 - (len(h) - 1)
    if mult_inf == 3:
        raise TripleRootError("g = c*Y^3")
    if mult_inf == 2:
        # g = Y^2 * (c2*X + c3*Y)
        return DoubleRoot((field.one, field.zero), (c[2], c[3]))
    d = _ugcd(h, _uderiv(h), field)
    deg = len(d) - 1
    if deg <= 0:
        return None
    if deg == 2:
        raise TripleRootError("g is the cube of a linear form")
    r = -d[0]  # d = X - r
    lsq = [r * r, -2 * r, field.one]
    q, rem = _udivmod(h, lsq, field)
    assert not _utrim(rem)
    q = q + [field.zero] * (2 - len(q))
    # cofactor m(X, 1) = q[1]*X + q[0]; when the root at infinity is simple, m = q[0]*Y
    if mult_inf == 1:
        return DoubleRoot((r, field.one), (field.zero, q[0]))
    return DoubleRoot((r, field.one), (q[1], q[0]))


def binary_form_roots(coeffs: Sequence, field: Field) -> list[tuple]:
    """Distinct roots in P^1 of ``sum_k coeffs[k] * X^(d-k) * Y^k``.

    Over F_q the roots are found exhaustively; in characteristic 0 only degrees up to 2
    (after removing the root at infinity) are supported.
    """
    c = [field(v) for v in coeffs]
    if not any(c):
        raise ValueError("zero form has every point as a root")
    roots = []
    if not c[0]:
        roots.append((field.one, field.zero))
    h = _utrim(list(reversed(c)))  # in X with Y = 1
    if field.is_finite:
        for x in field.elements():
            v = field.zero
            for coef in reversed(h):
                v = v * x + coef
            if not v:
                roots.append((x, field.one))
        return roots
    if len(h) <= 1:
        return roots
    if len(h) == 2:
        roots.append((-h[0] / h[1], field.one))
        return roots
    if len(h) == 3:
        a, b, cc = h[2], h[1], h[0]
        disc = b * b - 4 * a * cc
        sq = field.sqrt_roots(disc)
        found = {(-b + s) / (2 * a) for s in sq}
        roots.extend((x, field.one) for x in sorted(found, key=field.sort_key))
        return roots
    raise NotImplementedError("characteristic-0 root finding is limited to degree 2")
