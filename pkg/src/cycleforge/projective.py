"""Points, lines and linear subspaces of P^n with exact incidence tests."""

from __future__ import annotations

import enum
from itertools import combinations
from typing import Iterable, Sequence

from .fields import Field, common_field
from .poly import Poly


# ---------------------------------------------------------------------------
# linear algebra over an exact field


def row_reduce(rows: Sequence[Sequence], field: Field) -> tuple[list[list], list[int]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    m = [[field(v) for v in row] for row in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][col]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = field.one / m[r][col]
        m[r] = [v * inv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col]:
                f = m[i][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows: Sequence[Sequence], field: Field) -> int:
    return len(row_reduce(rows, field)[0])


def nullspace(rows: Sequence[Sequence], field: Field, ncols: int | None = None) -> list[list]:
    """A basis of ``{v : rows . v = 0}``."""
    if ncols is None:
        ncols = len(rows[0])
    red, pivots = row_reduce(rows, field) if rows else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [field.zero] * ncols
        v[f] = field.one
        for row, p in zip(red, pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis


def cross3(u: Sequence, v: Sequence) -> list:
    return [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]]


# ---------------------------------------------------------------------------
# points and lines


def short_format(field: Field, c) -> str:
    """Scalar text without the modulus suffix for F_q elements."""
    return str(c.r) if field.is_finite else field.format(c)


def _normalize(coords: Sequence, field: Field) -> tuple:
    vals = [field(v) for v in coords]
    lead = next((v for v in vals if v), None)
    if lead is None:
        raise ValueError("the zero vector is not a projective point")
    inv = field.one / lead
    return tuple(v * inv for v in vals)


class ProjPoint:
    """A point of P^n, scaled so that its first nonzero coordinate is 1."""

    __slots__ = ("coords", "field")

    def __init__(self, coords: Sequence, field: Field | None = None) -> None:
        field = field or common_field(coords)
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "coords", _normalize(coords, field))

    def __setattr__(self, name, value):
        raise AttributeError("ProjPoint is immutable")

    @property
    def dim(self) -> int:
        return len(self.coords) - 1

    def __len__(self):
        return len(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def __iter__(self):
        return iter(self.coords)

    def __eq__(self, other):
        return isinstance(other, ProjPoint) and self.coords == other.coords

    def __hash__(self):
        return hash(self.coords)

    def __repr__(self):
        return "[" + ", ".join(short_format(self.field, c) for c in self.coords) + "]"

    def sort_key(self):
        return tuple(self.field.sort_key(c) for c in self.coords)


def plucker_vector(a: Sequence, b: Sequence) -> list:
    return [a[i] * b[j] - a[j] * b[i] for i, j in combinations(range(len(a)), 2)]


def plucker_relations_hold(p: Sequence, n: int) -> bool:
    """The quadratic Plücker relations for a vector indexed by pairs ``i < j <= n``."""
    idx = {pair: k for k, pair in enumerate(combinations(range(n + 1), 2))}
    for i, j, k, l in combinations(range(n + 1), 4):
        v = p[idx[i, j]] * p[idx[k, l]] - p[idx[i, k]] * p[idx[j, l]] + p[idx[i, l]] * p[idx[j, k]]
        if v:
            return False
    return True


class ProjLine:
    """The line spanned by two distinct points; equality and hashing use Plücker coordinates."""

    __slots__ = ("p", "q", "plucker", "field")

    def __init__(self, p: ProjPoint, q: ProjPoint) -> None:
        if p.field != q.field or p.dim != q.dim:
            raise ValueError("points live in different spaces")
        pl = plucker_vector(p.coords, q.coords)
        if not any(pl):
            raise ValueError("a line needs two distinct points")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "field", p.field)
        object.__setattr__(self, "plucker", _normalize(pl, p.field))

    def __setattr__(self, name, value):
        raise AttributeError("ProjLine is immutable")

    @property
    def dim(self) -> int:
        return self.p.dim

    def point(self, s, r) -> ProjPoint:
        """The point ``s*p + r*q``."""
        return ProjPoint([s * a + r * b for a, b in zip(self.p, self.q)], self.field)

    def parametrization(self) -> list[list]:
        """Rows of the ``(n+1) x 2`` matrix sending ``(s, r)`` to ``s*p + r*q``."""
        return [[a, b] for a, b in zip(self.p, self.q)]

    def __eq__(self, other):
        return isinstance(other, ProjLine) and self.plucker == other.plucker

    def __hash__(self):
        return hash(self.plucker)

    def __repr__(self):
        return f"ProjLine({self.p!r}, {self.q!r})"

    def sort_key(self):
        return tuple(self.field.sort_key(c) for c in self.plucker)


class LinearSubspace:
    """A projective linear subspace given by a spanning set (kept in reduced echelon form)."""

    __slots__ = ("basis", "field", "ambient")

    def __init__(self, points: Iterable, field: Field | None = None) -> None:
        rows = [list(p.coords) if isinstance(p, ProjPoint) else list(p) for p in points]
        if not rows:
            raise ValueError("empty spanning set")
        field = field or common_field(v for row in rows for v in row)
        red, _ = row_reduce(rows, field)
        if not red:
            raise ValueError("spanning set is zero")
        object.__setattr__(self, "basis", tuple(tuple(r) for r in red))
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "ambient", len(rows[0]) - 1)

    def __setattr__(self, name, value):
        raise AttributeError("LinearSubspace is immutable")

    @property
    def dim(self) -> int:
        return len(self.basis) - 1

    def points(self) -> list[ProjPoint]:
        return [ProjPoint(r, self.field) for r in self.basis]

    def contains(self, p: ProjPoint) -> bool:
        return rank(list(self.basis) + [list(p.coords)], self.field) == len(self.basis)

    def contains_subspace(self, other: LinearSubspace) -> bool:
        return rank(list(self.basis) + list(other.basis), self.field) == len(self.basis)

    def parametrization(self) -> list[list]:
        """Rows of the matrix sending plane coordinates to ambient coordinates."""
        return [[self.basis[j][i] for j in range(len(self.basis))] for i in range(self.ambient + 1)]

    def coordinates_of(self, p: ProjPoint) -> list:
        """Coordinates of ``p`` in the stored basis (``p`` must lie in the subspace)."""
        k = len(self.basis)
        rows = [[self.basis[j][i] for j in range(k)] + [-p.coords[i]] for i in range(self.ambient + 1)]
        ns = nullspace(rows, self.field, k + 1)
        for v in ns:
            if v[k]:
                inv = self.field.one / v[k]
                return [c * inv for c in v[:k]]
        raise ValueError("point is not in the subspace")

    def __eq__(self, other):
        return isinstance(other, LinearSubspace) and self.basis == other.basis

    def __hash__(self):
        return hash(self.basis)

    def __repr__(self):
        return f"LinearSubspace(dim={self.dim}, basis={[list(map(str, r)) for r in self.basis]})"


def span(points: Sequence) -> LinearSubspace:
    """The linear span of points, lines or subspaces."""
    rows = []
    for p in points:
        if isinstance(p, ProjPoint):
            rows.append(list(p.coords))
        elif isinstance(p, ProjLine):
            rows.extend([list(p.p.coords), list(p.q.coords)])
        elif isinstance(p, LinearSubspace):
            rows.extend(list(r) for r in p.basis)
        else:
            rows.append(list(p))
    return LinearSubspace(rows)


def as_subspace(x) -> LinearSubspace:
    if isinstance(x, LinearSubspace):
        return x
    if isinstance(x, ProjLine):
        return LinearSubspace([x.p, x.q])
    if isinstance(x, ProjPoint):
        return LinearSubspace([x])
    raise TypeError(f"not a linear object: {x!r}")


def incidence(a, b: ProjPoint) -> bool:
    """Whether the point ``b`` lies on the line or subspace ``a``."""
    sub = as_subspace(a)
    if sub.ambient != b.dim:
        raise ValueError("ambient dimensions differ")
    return sub.contains(b)


def collinear(points: Sequence[ProjPoint]) -> bool:
    return span(points).dim <= 1


def restrict_to_span(f: Poly, vectors: Sequence[Sequence], names: Sequence[str]) -> Poly:
    """``f`` pulled back along ``(y_0, ..., y_k) -> sum_j y_j * vectors[j]``.

    Extra trailing variables of ``f`` beyond the ambient coordinates (such as a
    symbolic parameter) are carried along after the ``y`` variables.
    """
    n = len(vectors[0])
    k = len(vectors)
    extra = f.nvars - n
    if extra < 0:
        raise ValueError("polynomial has fewer variables than the ambient space")
    zero, one = f.field.zero, f.field.one
    rows = [[f.field(v[i]) for v in vectors] + [zero] * extra for i in range(n)]
    for e in range(extra):
        rows.append([zero] * k + [one if j == e else zero for j in range(extra)])
    return f.substitute_linear(rows, tuple(names) + f.names[n:])


def line_restriction(f: Poly, line: ProjLine) -> Poly:
    """``f`` pulled back to the parameters ``(s, r)`` of ``s*p + r*q``."""
    return restrict_to_span(f, [line.p.coords, line.q.coords], ("s", "r"))


def line_in_hypersurface(f: Poly, line: ProjLine) -> bool:
    """True iff ``f`` vanishes identically on ``line``."""
    if f.is_zero():
        return True
    return line_restriction(f, line).is_zero()


def subspace_restriction(f: Poly, sub: LinearSubspace) -> Poly:
    """``f`` pulled back to the coordinates of the stored basis of ``sub``."""
    return restrict_to_span(f, sub.basis, tuple(f"y{i}" for i in range(len(sub.basis))))


class Meet(enum.Enum):
    EQUAL = "equal"


def line_meet_line(l1: ProjLine, l2: ProjLine) -> ProjPoint | Meet | None:
    """The intersection point of two lines, None if skew, ``Meet.EQUAL`` if identical."""
    if l1.dim != l2.dim:
        raise ValueError("lines live in different spaces")
    if l1 == l2:
        return Meet.EQUAL
    field = l1.field
    cols = [l1.p.coords, l1.q.coords, [-v for v in l2.p.coords], [-v for v in l2.q.coords]]
    rows = [[c[i] for c in cols] for i in range(l1.dim + 1)]
    ns = nullspace(rows, field, 4)
    if not ns:
        return None
    v = ns[0]
    return ProjPoint([v[0] * a + v[1] * b for a, b in zip(l1.p, l1.q)], field)


def line_meet_subspace(line: ProjLine, sub: LinearSubspace) -> ProjPoint | Meet | None:
    """The single intersection point, None if disjoint, ``Meet.EQUAL`` if the line lies inside."""
    if sub.contains(line.p) and sub.contains(line.q):
        return Meet.EQUAL
    field = line.field
    k = len(sub.basis)
    cols = [line.p.coords, line.q.coords] + [[-v for v in b] for b in sub.basis]
    rows = [[c[i] for c in cols] for i in range(line.dim + 1)]
    for v in nullspace(rows, field, k + 2):
        if v[0] or v[1]:
            return ProjPoint([v[0] * a + v[1] * b for a, b in zip(line.p, line.q)], field)
    return None


def hyperplane_contains(h: Sequence, p: ProjPoint) -> bool:
    return not sum((a * b for a, b in zip(h, p.coords)), p.field.zero)


def hyperplane_basis(h: Sequence, field: Field) -> LinearSubspace:
    """The hyperplane ``sum h_i x_i = 0`` as a subspace."""
    return LinearSubspace(nullspace([list(h)], field, len(h)), field)
