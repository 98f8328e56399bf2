from __future__ import annotations

from dataclasses import replace

import pytest
from hypothesis import given, strategies as st

from cycleforge.fields import GF, QQZETA
from cycleforge.poly import Poly
from cycleforge.projective import ProjPoint, collinear
from cycleforge.scene import (
    CANONICAL_FREE_VALUES,
    FREE_MONOMIALS,
    NAMES4,
    POLE,
    SceneError,
    assemble_xi,
    build_scene,
    canonical_params,
    canonical_scene,
    certify_smoothness,
    dumps_scene,
    generated_params,
    loads_scene,
    smoothness_certificate,
)

W = QQZETA.zeta
SCENE = canonical_scene()


def test_canonical_values(scene):
    z, o = QQZETA.zero, QQZETA.one
    assert scene.F.eval([z, z, o, z]) == 1
    assert scene.F.eval([z, z, z, o]) == -8
    assert scene.F.coefficient((0, 0, 0, 3)) == -8
    assert scene.u0 == 2 and scene.u0p == 2
    assert scene.t == 1


def test_canonical_free_coefficients_are_seed_15():
    assert tuple(v for _, v in generated_params(15).free) == CANONICAL_FREE_VALUES
    assert len(FREE_MONOMIALS) == 13


def test_restrictions_match_branch_forms(scene):
    x = Poly.gens(QQZETA, 4, NAMES4)
    G1 = (x[2] - x[3]) ** 2 * (x[2] - x[3].scale(8))
    G2 = ((x[1] - x[3]) ** 2 * (x[1] - x[3].scale(2))).scale(4)
    assert scene.restrict_F(1) == G1
    assert scene.restrict_F(2) == G2


def test_triple_points(scene):
    expected = {ProjPoint([0, 0, 0, 1, -2 * W**k, 0], QQZETA) for k in range(3)}
    for i in (1, 2):
        lab = scene.labels[i]
        got = {lab.p_inf, lab.p_plus, lab.p_minus}
        assert got == expected
        assert collinear(list(got))
        for p in got:
            assert all(not p.coords[k] for k in (0, 1, 2, 5))
    assert scene.labels[1].p_inf == scene.labels[2].p_inf == ProjPoint([0, 0, 0, 1, -2, 0], QQZETA)
    assert scene.labels[1].p_plus == scene.labels[2].p_plus


def test_labels(scene):
    lab = scene.labels[1]
    assert (lab.u_inf, lab.u_plus, lab.u_minus) == ((2, 1), (2 * W, 1), (2 * W * W, 1))


def test_normalization_examples(scene):
    c1 = scene.curves[1]
    assert c1.nu((3, 1)) == ProjPoint([0, 0, 19, 26, -21, 0], QQZETA)
    assert c1.cusp == ProjPoint([0, 0, 1, 1, 0, 0], QQZETA)
    for k in range(3):
        assert c1.nu((2 * W**k, 1)) == ProjPoint([0, 0, 0, 1, -2 * W**k, 0], QQZETA)


def test_normalization_identities(scene):
    for i in (1, 2):
        cv = scene.curves[i]
        names = ("s", "r")
        images = cv.nu_images(2, 0, 1, names)
        assert cv.equation().compose(images).is_zero()
        t = Poly.var(QQZETA, 3, 2, ("s", "r", "t"))
        assert scene.Y_sym.compose([p.embed(3, [0, 1], ("s", "r", "t")) for p in images] + [t]).is_zero()


@given(st.integers(-30, 30), st.integers(-30, 30))
def test_projection_inverts_nu(a, b):
    u = (QQZETA(a) + QQZETA(b) * W, QQZETA.one)
    for i in (1, 2):
        cv = SCENE.curves[i]
        assert cv.parameter(cv.nu(u).coords) == u


def test_phi_examples(scene):
    phi1, phi2 = scene.phi[1], scene.phi[2]
    assert phi1.mu == -(W * W)
    assert phi1.alpha == 2 * W and phi1.beta == 2 * W * W
    lab = scene.labels[1]
    assert phi1(lab.u_plus) == 0
    assert phi1(lab.u_minus) is POLE
    assert phi1(lab.u_inf) * phi2(scene.labels[2].u_inf) == 1
    assert phi2(scene.labels[2].u_minus) == 0


def test_divisors_cancel(scene):
    assert assemble_xi(scene).is_cocycle()


def test_y_restricted_to_x4_zero_is_minus_w(scene):
    assert scene.Y_sym.subs({4: 0}) == -scene.W_sym


@pytest.mark.parametrize(
    "change, code",
    [
        ({"b": 1}, "triple-root"),
        ({"b2": 1}, "triple-root"),
        ({"c2": 5}, "coefficient-mismatch"),
        ({"a": 0}, "zero-parameter"),
        ({"u0": 3}, "bad-cube-root"),
    ],
)
def test_build_scene_errors(change, code):
    with pytest.raises(SceneError) as err:
        build_scene(replace(canonical_params(), **change))
    assert err.value.code == code


def test_missing_cube_root():
    # c*b/a = 3 and c'*b'/a' = 3 share the x3^3 coefficient but 3 is not a cube in Q(zeta)
    p = replace(canonical_params(), a=1, b=3, c=1, a2=1, b2=1 * 3, c2=1, u0=None)
    with pytest.raises(SceneError) as err:
        build_scene(p)
    assert err.value.code == "missing-cube-root"


def test_scene_file_round_trip(scene):
    text = dumps_scene(scene)
    again = loads_scene(text)
    assert dumps_scene(again) == text
    assert again.fingerprint() == scene.fingerprint()
    assert again.F == scene.F


def test_symbolic_scene_round_trip():
    sc = build_scene(canonical_params(t=None))
    assert sc.Y is None and sc.t is None
    assert dumps_scene(loads_scene(dumps_scene(sc))) == dumps_scene(sc)


def test_hand_edited_triple_root(scene):
    text = dumps_scene(scene).replace('"b": "8"', '"b": "1"')
    with pytest.raises(SceneError) as err:
        loads_scene(text)
    assert err.value.code == "triple-root"


def test_specialization_13(scene13):
    assert scene13.field == GF(13)
    assert scene13.zeta.r == 3
    lab = scene13.labels[1]
    assert {lab.u_plus[0].r, lab.u_minus[0].r} == {6, 5}
    assert not scene13.degenerate


def test_bad_reduction_at_7(scene7):
    # b = 8 = a mod 7: G1 acquires a triple root and C1 has no cuspidal normalization
    assert scene7.degenerate
    assert scene7.labels[1] is None and 1 not in scene7.phi
    with pytest.raises(SceneError):
        scene7.require_curves()


def test_smoothness_certificate_13(scene):
    (rep,) = smoothness_certificate(scene, [13])
    assert rep.passed
    assert rep.counts["S"] == 195


def test_smoothness_certificate_bad_reduction_at_7(scene):
    (rep,) = smoothness_certificate(scene, [7])
    # B and Y stay smooth; S contains the three lines over the triple root of G1
    assert not rep.b_singular and not rep.y_singular
    assert len(rep.s_lines) == 3


def test_smoothness_certificate_edge_cases(scene):
    assert smoothness_certificate(scene, []) == []
    with pytest.raises(SceneError):
        smoothness_certificate(scene, [5])
    x2 = Poly.var(GF(13), 4, 2, NAMES4)
    rep = certify_smoothness(x2**3, 1, 13)
    assert rep.b_singular
