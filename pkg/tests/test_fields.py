from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from cycleforge.fields import (
    GF,
    QQ,
    QQZETA,
    Eis,
    FieldMismatchError,
    Fq,
    SpecializationError,
    SpecializationMap,
    default_specialization,
    field_from_tag,
    format_scalar,
    parse_scalar,
    specialize,
)

rationals = st.fractions(max_denominator=50).filter(lambda x: abs(x) < 10**4)
eis = st.builds(Eis, rationals, rationals)
f13 = st.integers(0, 12).map(lambda r: Fq(r, 13))

W = QQZETA.zeta


def test_zeta_relations():
    assert W * W * W == 1
    assert W * W + W + 1 == 0
    assert W * (W * W) == QQZETA.one


def test_eisenstein_quotient():
    # (1 - w^2)/(1 - w) = 1 + w = -w^2
    got = (1 - W * W) / (1 - W)
    assert got == 1 + W
    assert got == -(W * W)


def test_f13_product():
    assert Fq(7, 13) * Fq(2, 13) == Fq(1, 13)


def test_rational_canonical():
    assert QQ.parse("6/4") == Fraction(3, 2)
    assert QQ.format(Fraction(-6, 4)) == "-3/2"


def test_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        Eis(1, 2) / Eis(0)
    with pytest.raises(ZeroDivisionError):
        Fq(3, 13) / Fq(0, 13)


def test_field_mismatch():
    with pytest.raises(FieldMismatchError):
        Fq(1, 13) + Fq(1, 7)
    with pytest.raises(FieldMismatchError):
        QQZETA(Fq(1, 13))


def test_cube_roots_examples():
    assert QQZETA.cube_roots(0) == [QQZETA.zero]
    assert set(QQZETA.cube_roots(8)) == {Eis(2), 2 * W, 2 * W * W}
    assert {r.r for r in GF(13).cube_roots(8)} == {2, 6, 5}
    assert GF(13).cube_roots(2) == []


def test_specialize_examples():
    m = SpecializationMap(13, 3)
    assert specialize(W, m) == Fq(3, 13)
    assert specialize(Fraction(1, 2), m) == Fq(7, 13)
    assert specialize(W * W + W + 1, m) == 0
    with pytest.raises(SpecializationError):
        specialize(Fraction(1, 13), m)
    with pytest.raises(ValueError):
        SpecializationMap(13, 1)


def test_prime_field_preconditions():
    with pytest.raises(ValueError):
        GF(5)
    with pytest.raises(ValueError):
        GF(21)
    assert GF(13).zeta == Fq(3, 13)
    assert GF(7).zeta == Fq(2, 7)


@pytest.mark.parametrize("text", ["0", "-3/7", "5", "-1/2+3*w", "w", "-w", "2/3-1/5*w", "4 mod 13"])
def test_text_round_trip(text):
    x = parse_scalar(text)
    assert parse_scalar(format_scalar(x)) == x


def test_field_tags():
    for f in (QQ, QQZETA, GF(19)):
        assert field_from_tag(f.tag()) == f


@given(eis, eis, eis)
def test_eisenstein_ring_axioms(x, y, z):
    assert (x + y) + z == x + (y + z)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x * y == y * x
    if y:
        assert (x / y) * y == x


@given(f13, f13, f13)
def test_prime_field_axioms(x, y, z):
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    if y:
        assert (x / y) * y == x


@given(eis)
def test_eisenstein_cube_roots(x):
    c = x * x * x
    roots = QQZETA.cube_roots(c)
    assert x in roots
    if x:
        assert len(roots) == 3
        assert {r / x for r in roots} == {QQZETA.one, W, W * W}


@given(st.sampled_from([7, 13, 19, 31, 37]), st.integers(1, 10**6))
def test_prime_cube_roots_differ_by_omega(q, n):
    f = GF(q)
    if not f(n):
        assert f.cube_roots(n) == [f.zero]
        return
    roots = f.cube_roots(n)
    assert len(roots) in (0, 3)
    for r in roots:
        assert r**3 == f(n)
    if roots:
        assert {(r / roots[0]).r for r in roots} == {1, f.zeta.r, (f.zeta * f.zeta).r}


@given(eis, eis)
def test_specialization_is_homomorphism(x, y):
    m = default_specialization(13)
    try:
        sx, sy = specialize(x, m), specialize(y, m)
    except SpecializationError:
        return
    assert specialize(x + y, m) == sx + sy
    assert specialize(x * y, m) == sx * sy


@given(eis)
def test_specialization_respects_cube_roots(x):
    m = default_specialization(13)
    try:
        image = specialize(x * x * x, m)
        roots = {specialize(r, m) for r in QQZETA.cube_roots(x * x * x)}
    except SpecializationError:
        return
    assert roots <= set(GF(13).cube_roots(image))
