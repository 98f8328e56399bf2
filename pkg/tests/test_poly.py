from __future__ import annotations

import random

import pytest
from hypothesis import given, strategies as st

from cycleforge.fields import GF, QQ, QQZETA
from cycleforge.poly import (
    BinaryCubic,
    NonExactDivisionError,
    Poly,
    TripleRootError,
    binary_form_roots,
    double_root,
)

from crosschecks import double_root_discrepancies

F13 = GF(13)


def gens(field, n, names=None):
    return Poly.gens(field, n, names)


def rand_poly(rng, field, n, deg, terms=5):
    g = gens(field, n)
    f = Poly.zero(field, n)
    for _ in range(terms):
        m = Poly.const(field, n, rng.randint(-5, 5))
        for _ in range(deg):
            m = m * g[rng.randrange(n)]
        f = f + m
    return f


def test_eval_examples():
    x2, x3, x4 = gens(QQ, 3)
    assert (x4**3 - x2**3).eval([1, 0, 1]) == 0
    G1 = (x2 - x3) ** 2 * (x2 - x3.scale(8))
    assert G1.eval([19, 26, 0]) == -9261


def test_eval_length_mismatch():
    x, y = gens(QQ, 2)
    with pytest.raises(ValueError):
        (x + y).eval([1])


@given(st.integers(-20, 20), st.lists(st.integers(-9, 9), min_size=3, max_size=3), st.integers(0, 10**6))
def test_eval_homogeneity(lam, pt, seed):
    f = rand_poly(random.Random(seed), QQ, 3, 3)
    assert f.eval([lam * v for v in pt]) == lam**3 * f.eval(pt)


def test_substitute_linear_examples():
    x = gens(QQ, 6)
    assert x[0].substitute_linear([[0, 0]] + [[0, 0]] * 5).is_zero()
    Q = x[0] * x[3] - x[1] * x[2]
    # plane x0 = x1 = 0 with coordinates (x2, x3, x4)
    plane = [[0, 0, 0], [0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1], [0, 0, 0]]
    assert Q.substitute_linear(plane).is_zero()
    with pytest.raises(ValueError):
        Q.substitute_linear([[1], [2]])


def test_substitute_linear_cone_family(scene):
    # the family (0, 0, 8s, s, 0, lam) lies on Y
    Y = scene.Y
    m = [[0, 0], [0, 0], [8, 0], [1, 0], [0, 0], [0, 1]]
    assert Y.substitute_linear(m).is_zero()


@given(st.integers(0, 10**6))
def test_substitute_linear_composes(seed):
    rng = random.Random(seed)
    f = rand_poly(rng, QQ, 3, 3)
    A = [[rng.randint(-3, 3) for _ in range(3)] for _ in range(3)]
    B = [[rng.randint(-3, 3) for _ in range(2)] for _ in range(3)]
    AB = [[sum(A[i][k] * B[k][j] for k in range(3)) for j in range(2)] for i in range(3)]
    assert f.substitute_linear(A).substitute_linear(B) == f.substitute_linear(AB)


def test_collect_examples():
    names = ("a0", "a1", "a2", "a3", "a4", "lam", "t")
    a = gens(QQ, 7, names)
    F = a[1] ** 3 + a[2] * a[3] * a[0]
    c0, c1, c2 = a[4] ** 3 - F, a[0] * a[3] - a[1] * a[2], a[6] * a[0]
    f = c0 + c1 * a[5] + c2 * a[5] ** 2
    assert f.collect(5) == [c0, c1, c2]
    k = Poly.const(QQ, 7, 5, names)
    assert k.collect(5) == [k]
    z = Poly.zero(QQ, 7, names)
    assert (a[5] ** 3).collect(5) == [z, z, z, Poly.const(QQ, 7, 1, names)]


def test_double_root_examples():
    X, Y = gens(QQ, 2)
    g = BinaryCubic.from_poly((X - Y) ** 2 * (X - Y.scale(8)), 0, 1)
    d = double_root(g)
    assert d.root == (1, 1)
    assert d.cofactor == (1, -8)
    assert double_root(BinaryCubic.from_poly(X * Y * (X - Y), 0, 1)) is None
    with pytest.raises(TripleRootError):
        double_root(BinaryCubic(1, 0, 0, 0))
    with pytest.raises(TripleRootError):
        double_root(BinaryCubic(0, 0, 0, 5))


def test_double_root_at_infinity():
    d = double_root(BinaryCubic(0, 0, 2, 3), QQ)
    assert d.root == (1, 0)
    assert d.cofactor == (2, 3)


def test_divide_exact_examples():
    x, y = gens(QQ, 2)
    assert (x**2 - y**2).divide_exact(x - y) == x + y
    assert (x**2 - y**2).divide_exact(x**2 - y**2) == Poly.const(QQ, 2, 1)
    with pytest.raises(NonExactDivisionError):
        (x**2 + y**2).divide_exact(x - y)
    # a plane cubic built from three linear forms gives back the third
    u, v, w = gens(QQZETA, 3)
    z = QQZETA.zeta
    l1, l2, l3 = u + v.scale(z), v - w.scale(3), u.scale(2) + w
    assert (l1 * l2 * l3).divide_exact(l1).divide_exact(l2) == l3


@given(st.integers(0, 10**6))
def test_divide_exact_round_trip(seed):
    rng = random.Random(seed)
    f = rand_poly(rng, QQ, 3, 2)
    g = rand_poly(rng, QQ, 3, 1, terms=3)
    if g.is_zero():
        return
    assert (f * g).divide_exact(g) == f


@pytest.mark.parametrize("field", [QQ, QQZETA, F13])
def test_text_round_trip(field):
    rng = random.Random(3)
    names = ("x0", "x1", "x2")
    for _ in range(20):
        f = rand_poly(rng, field, 3, 3).with_names(names)
        assert Poly.from_text(f.to_text(), field, names) == f


def test_double_root_matches_factorization_f13():
    discrepancies, seen = double_root_discrepancies(200, seed=2024)
    assert discrepancies == []
    assert seen == {"none", "double", "triple"}


def test_binary_form_roots():
    roots = binary_form_roots([1, 0, -1], QQ)
    assert sorted(roots) == [(-1, 1), (1, 1)]
    assert binary_form_roots([0, 1, 0], QQ) == [(1, 0), (0, 1)]
    assert len(binary_form_roots([1, 0, 0, -1], F13)) == 3
