"""Vectorized enumeration of F_q-points and F_q-lines on projective hypersurfaces.

Points of P^n(F_q) are int64 arrays of canonical representatives (first nonzero
coordinate 1).  Polynomials are compiled from :class:`~cycleforge.poly.Poly` over
``GF(q)`` into exponent/coefficient arrays and evaluated on whole point arrays.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache
from itertools import product
from typing import Callable, Iterable, Sequence, TypeVar

import numpy as np

from .fields import GF
from .poly import Poly
from .projective import ProjLine, ProjPoint

T = TypeVar("T")
R = TypeVar("R")


def thread_count() -> int:
    """Worker bound from ``CYCLEFORGE_THREADS`` (default: CPU count, capped at 8)."""
    raw = os.environ.get("CYCLEFORGE_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return min(8, os.cpu_count() or 1)


def parallel_map(fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
    """``map`` over a bounded thread pool; results keep input order."""
    items = list(items)
    workers = min(thread_count(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


@lru_cache(maxsize=16)
def projective_points(n: int, q: int) -> np.ndarray:
    """All canonical representatives of P^n(F_q), shape ``((q^(n+1)-1)/(q-1), n+1)``."""
    blocks = []
    for lead in range(n + 1):
        free = n - lead
        if free:
            tail = np.array(list(product(range(q), repeat=free)), dtype=np.int64)
        else:
            tail = np.zeros((1, 0), dtype=np.int64)
        block = np.zeros((tail.shape[0], n + 1), dtype=np.int64)
        block[:, lead] = 1
        block[:, lead + 1 :] = tail
        blocks.append(block)
    pts = np.concatenate(blocks)
    pts.setflags(write=False)
    return pts


@lru_cache(maxsize=64)
def _inverse_table(q: int) -> np.ndarray:
    inv = np.zeros(q, dtype=np.int64)
    for r in range(1, q):
        inv[r] = pow(r, -1, q)
    return inv


def canonicalize(pts: np.ndarray, q: int) -> np.ndarray:
    """Scale each row so that its first nonzero entry is 1 (zero rows are left alone)."""
    pts = np.asarray(pts, dtype=np.int64) % q
    if pts.ndim == 1:
        return canonicalize(pts[None, :], q)[0]
    nz = pts != 0
    lead = np.argmax(nz, axis=1)
    vals = pts[np.arange(len(pts)), lead]
    return pts * _inverse_table(q)[vals][:, None] % q


class CompiledPoly:
    """A polynomial over F_q frozen into arrays for fast evaluation on point arrays."""

    def __init__(self, f: Poly, nvars: int | None = None) -> None:
        if not f.field.is_finite:
            raise TypeError("compile only F_q polynomials")
        self.q = f.field.q
        self.nvars = f.nvars if nvars is None else nvars
        terms = f.int_terms()
        self.exps = np.array([e for e, _ in terms], dtype=np.int64).reshape(len(terms), f.nvars)
        self.coeffs = np.array([c for _, c in terms], dtype=np.int64)
        self.maxdeg = int(self.exps.max()) if len(terms) else 0

    def __call__(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=np.int64)
        single = pts.ndim == 1
        if single:
            pts = pts[None, :]
        q = self.q
        n = pts.shape[0]
        out = np.zeros(n, dtype=np.int64)
        if not len(self.coeffs):
            return out[0] if single else out
        powers = [np.ones_like(pts)]
        for _ in range(self.maxdeg):
            powers.append(powers[-1] * pts % q)
        for e, c in zip(self.exps, self.coeffs):
            term = np.full(n, c, dtype=np.int64)
            for i, k in enumerate(e):
                if k:
                    term = term * powers[k][:, i] % q
            out += term
        out %= q
        return out[0] if single else out


def zero_locus(polys: Sequence[CompiledPoly], pts: np.ndarray) -> np.ndarray:
    """Rows of ``pts`` where every polynomial vanishes."""
    mask = np.ones(len(pts), dtype=bool)
    for f in polys:
        idx = np.nonzero(mask)[0]
        mask[idx] = f(pts[idx]) == 0
    return pts[mask]


def to_point(row: Sequence[int], q: int) -> ProjPoint:
    field = GF(q)
    return ProjPoint([field(int(v)) for v in row], field)


def to_row(p: ProjPoint) -> np.ndarray:
    return np.array([int(c) for c in p.coords], dtype=np.int64)


def to_line(a: Sequence[int], b: Sequence[int], q: int) -> ProjLine:
    return ProjLine(to_point(a, q), to_point(b, q))


class HypersurfaceLines:
    """Point cache and line search on a hypersurface ``f = 0`` in P^n(F_q).

    Lines through a point ``m`` are found by scanning cached points ``r`` on the
    tangent hyperplane ``T_m`` (and optionally on extra hyperplanes) and testing
    ``m + r`` and ``m + 2r``.  Four distinct points of a line on a cubic force
    containment; for higher degrees more test points are used.
    """

    def __init__(self, f: Poly) -> None:
        self.poly = f
        self.q = f.field.q
        self.n = f.nvars - 1
        self.degree = f.degree()
        self.f = CompiledPoly(f)
        self.grad = [CompiledPoly(g) for g in f.gradient()]
        self._points: np.ndarray | None = None

    @property
    def points(self) -> np.ndarray:
        if self._points is None:
            self._points = zero_locus([self.f], projective_points(self.n, self.q))
        return self._points

    def gradient_at(self, m: Sequence[int]) -> np.ndarray:
        m = np.asarray(m, dtype=np.int64)
        return np.array([int(g(m)) for g in self.grad], dtype=np.int64)

    def singular_points(self, pts: np.ndarray | None = None) -> np.ndarray:
        """Points of the hypersurface where the gradient vanishes."""
        pts = self.points if pts is None else pts
        return zero_locus(self.grad, pts)

    def lines_through(self, m: Sequence[int], hyperplanes: Sequence[Sequence[int]] = ()) -> list[ProjLine]:
        """All F_q-lines on the hypersurface through ``m`` inside the given hyperplanes.

        The result is deduplicated by Plücker key and sorted.
        """
        q = self.q
        m = canonicalize(np.asarray(m, dtype=np.int64), q)
        if self.f(m) != 0:
            raise ValueError("point is not on the hypersurface")
        cand = self.points
        normals = [self.gradient_at(m)] + [np.asarray(h, dtype=np.int64) for h in hyperplanes]
        for h in normals:
            if h.any():
                cand = cand[(cand @ h) % q == 0]
        cand = cand[~np.all(cand == m, axis=1)]
        ok = np.ones(len(cand), dtype=bool)
        for k in range(1, max(2, self.degree)):
            idx = np.nonzero(ok)[0]
            ok[idx] = self.f((m[None, :] + k * cand[idx]) % q) == 0
        found: dict = {}
        for r in cand[ok]:
            line = to_line(m, r, q)
            found.setdefault(line.plucker, line)
        return [found[k] for k in sorted(found, key=lambda key: tuple(int(c) for c in key))]

    def contains_line(self, a: Sequence[int], b: Sequence[int]) -> bool:
        q = self.q
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        pts = np.array([a, b] + [(a + k * b) % q for k in range(1, self.degree + 1)])
        return bool(np.all(self.f(pts) == 0))


def points_on_line(a: Sequence[int], b: Sequence[int], q: int) -> np.ndarray:
    """All ``q + 1`` canonical points of the line through ``a`` and ``b``."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    lam = np.arange(q, dtype=np.int64)[:, None]
    pts = np.concatenate([(a[None, :] + lam * b[None, :]) % q, b[None, :] % q])
    return canonicalize(pts, q)


def rank_mod_q(rows: np.ndarray, q: int) -> int:
    m = np.asarray(rows, dtype=np.int64) % q
    m = m.copy()
    inv = _inverse_table(q)
    r = 0
    for c in range(m.shape[1]):
        piv = np.nonzero(m[r:, c])[0]
        if not len(piv):
            continue
        p = r + piv[0]
        m[[r, p]] = m[[p, r]]
        m[r] = m[r] * inv[m[r, c]] % q
        others = np.nonzero(m[:, c])[0]
        for i in others:
            if i != r:
                m[i] = (m[i] - m[i, c] * m[r]) % q
        r += 1
        if r == m.shape[0]:
            break
    return r
