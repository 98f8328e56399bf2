"""Brute-force oracles written independently of the library (plain integers mod q)."""

from __future__ import annotations

from itertools import combinations_with_replacement


def p1_points(q: int) -> list[tuple[int, int]]:
    return [(r, 1) for r in range(q)] + [(1, 0)]


def _mul(f: list[int], g: list[int], q: int) -> list[int]:
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        for j, b in enumerate(g):
            out[i + j] = (out[i + j] + a * b) % q
    return out


def _linear(root: tuple[int, int], q: int) -> list[int]:
    # coefficients in X^1 Y^0, X^0 Y^1 order of the form vanishing at (s : r): r*X - s*Y
    s, r = root
    return [r % q, (-s) % q]


def factorization_table(q: int) -> dict[tuple[int, ...], tuple]:
    """Monic-normalized binary cubic -> sorted multiset of its roots, for fully split cubics."""
    table = {}
    for roots in combinations_with_replacement(p1_points(q), 3):
        f = [1]
        for rt in roots:
            f = _mul(f, _linear(rt, q), q)
        table[_normalize(f, q)] = roots
    return table


def _normalize(c: list[int], q: int) -> tuple[int, ...]:
    lead = next(x for x in c if x % q)
    inv = pow(lead, -1, q)
    return tuple(x * inv % q for x in c)


def classify(coeffs: list[int], q: int, table: dict) -> tuple[str, tuple | None]:
    """'triple', 'double' (with the root), or 'none'."""
    roots = table.get(_normalize(coeffs, q))
    if roots is None:
        return "none", None
    for rt in set(roots):
        k = roots.count(rt)
        if k == 3:
            return "triple", rt
        if k == 2:
            return "double", rt
    return "none", None


def cube_roots_brute(x: int, q: int) -> set[int]:
    return {y for y in range(q) if pow(y, 3, q) == x % q}
