from __future__ import annotations

import copy
import random

import pytest
from hypothesis import given, strategies as st

from cycleforge import fano
from cycleforge.chains import describe_key
from cycleforge.poly import Poly
from cycleforge.projective import ProjLine, ProjPoint, collinear, line_meet_line, span
from cycleforge.scene import POLE, SceneError, canonical_scene, specialize_scene

SCENE = canonical_scene()
S13 = specialize_scene(SCENE, 13)


def _on_line(line, p):
    return span([line.p, line.q, p]).dim == 1


def _cone_poly_vanishes(scene, i, u):
    # independent of cone_line: restrict Y with t free to lam*p0 + mu*nu(u)
    g = Poly.gens(scene.field, 3, ("lam", "mu", "t"))
    nu = scene.curves[i].nu_coords(u)
    images = [g[1].scale(c) for c in nu]
    images[5] = images[5] + g[0]
    return scene.Y_sym.compose(images + [g[2]]).is_zero()


def test_cone_line_examples(scene):
    l = fano.cone_line(scene, 1, 0)
    assert l.line == ProjLine(scene.p0, ProjPoint([0, 0, 8, 1, 0, 0], scene.field))
    assert _cone_poly_vanishes(scene, 1, 0)
    cusp = fano.cone_line(scene, 1, (1, 0))
    assert _on_line(cusp.line, scene.curves[1].cusp)
    assert _cone_poly_vanishes(scene, 1, (1, 0))
    lab = scene.labels[1]
    assert fano.cone_line(scene, 1, lab.u_plus).line == fano.label_line(scene, "+")


def test_cone_family_restriction_is_zero(scene):
    for i in (1, 2):
        assert fano.cone_family_restriction(scene, i).is_zero()


@given(st.integers(-30, 30), st.integers(1, 30), st.sampled_from([1, 2]))
def test_cone_lines_on_y_for_all_t(s, r, i):
    assert _cone_poly_vanishes(SCENE, i, (SCENE.field(s), SCENE.field(r)))
    fano.cone_line(SCENE, i, (SCENE.field(s), SCENE.field(r)))


def test_lines_through_p0_system_verbatim():
    sym = SCENE.with_t(None)
    system = fano.lines_through_p0_symbolic(sym)
    a = fano.pencil_ring(sym)
    F = sym.F.compose(a[:4])
    assert system.polys == (a[4] ** 3 - F, a[0] * a[3] - a[1] * a[2], a[6] * a[0])
    a0, c1, c0 = fano.conditions_under_t_nonzero(system)
    assert a0 == a[0]
    assert c1 == a[1] * a[2]
    assert c0 == a[4] ** 3 - sym.F.compose([a[0].scale(0), a[1], a[2], a[3]])


def test_lines_through_p0_degenerates_at_t0():
    system = fano.lines_through_p0_symbolic(SCENE.with_t(None))
    assert system.polys[2].subs({6: 0}).is_zero()


def test_gamma1_point_satisfies_system(scene):
    system = fano.lines_through_p0_symbolic(scene.with_t(None))
    nu = scene.curves[1].nu_coords(3)
    pt = nu[:5] + [scene.field.zero, scene.field(5)]
    assert nu[0] == 0 and nu[1] == 0
    assert all(f.eval(pt) == 0 for f in system.polys)


@pytest.mark.parametrize("q", [7, 13])
def test_enumerated_lines_through_p0(q):
    f = specialize_scene(SCENE, q)
    lines = fano.enumerate_lines_through_p0(f)
    assert lines == fano.cone_line_set(f)
    c1, c2 = set(fano.curve_points(f, 1)), set(fano.curve_points(f, 2))
    assert len(lines) == len(c1) + len(c2) - len(c1 & c2)
    if q == 13:
        assert (len(c1), len(c2), len(c1 & c2), len(lines)) == (14, 14, 3, 25)


def test_enumeration_refuses_t0():
    with pytest.raises(ValueError):
        fano.enumerate_lines_through_p0(S13.with_t(S13.field.zero))


def test_residual_of_cone_lines(scene):
    l = fano.residual_line(scene, fano.cone_line(scene, 1, 3), fano.cone_line(scene, 1, 0))
    assert l.line == fano.cone_line(scene, 1, -3).line
    # collinearity oracle: det of the plane coordinates of nu(3), nu(0), nu(-3)
    rows = [[19, 26, -21], [8, 1, 0], [35, 28, -21]]
    det = sum(
        rows[0][k] * (rows[1][(k + 1) % 3] * rows[2][(k + 2) % 3] - rows[1][(k + 2) % 3] * rows[2][(k + 1) % 3])
        for k in range(3)
    )
    assert det == 0


def test_third_point_example(scene):
    fld = scene.field
    assert fano.third_point(scene, 1, 3, 0) == (fld(-3), fld.one)


def test_tangent_case_at_u_inf(scene):
    u = scene.labels[1].u_inf
    u3 = fano.third_point(scene, 1, u, u)
    l = fano.cone_line(scene, 1, u)
    res = fano.residual_line(scene, l, l, fano.tangent_plane(scene, 1, u))
    assert res.line == fano.cone_line(scene, 1, u3).line
    cv = scene.curves[1]
    assert collinear([cv.nu(u), cv.tangent_point(u), cv.nu(u3)])


@given(st.integers(-20, 20), st.integers(-20, 20), st.sampled_from([1, 2]), st.booleans())
def test_residual_equals_cone_over_third_point(u1, u2, i, tangent):
    scene = SCENE
    if tangent:
        u2 = u1
    try:
        u3 = fano.third_point(scene, i, u1, u2)
    except fano.CuspLineError:
        return
    cv = scene.curves[i]
    l1, l2 = fano.cone_line(scene, i, u1), fano.cone_line(scene, i, u2)
    plane = fano.tangent_plane(scene, i, u1) if u1 == u2 else None
    res = fano.residual_line(scene, l1, l2, plane)
    assert res.line == fano.cone_line(scene, i, u3).line
    assert collinear([cv.nu(u1), cv.nu(u2), cv.nu(u3)]) or u1 == u2


def test_residual_random_finite_instance():
    rng = random.Random(3)
    H = fano.y_lines(S13)
    p0 = S13.p0
    found = 0
    for _ in range(40):
        m = H.points[rng.randrange(len(H.points))]
        lines = [L for L in H.lines_through(m) if not _on_line(L, p0)]
        if len(lines) < 2:
            continue
        a, b = lines[0], lines[1]
        l1, l2 = fano.certify(S13, a), fano.certify(S13, b)
        try:
            res = fano.residual_line(S13, l1, l2)
        except fano.PlaneInYError:
            continue
        assert res.certified
        found += 1
        if found == 3:
            break
    assert found == 3


def test_skew_lines_raise(scene):
    fld = scene.field
    e = [ProjPoint([1 if k == j else 0 for k in range(6)], fld) for j in range(6)]
    a, b = ProjLine(e[0], e[1]), ProjLine(e[2], e[3])
    with pytest.raises(fano.SkewLinesError):
        fano.residual_line(scene, fano.LineOnY(a, True), fano.LineOnY(b, True))


def test_line_not_on_y_fails_certification(scene):
    fld = scene.field
    line = ProjLine(ProjPoint([1, 0, 0, 0, 0, 0], fld), ProjPoint([0, 1, 0, 0, 0, 0], fld))
    with pytest.raises(fano.CertificationError):
        fano.certify(scene, line)


def test_third_point_refuses_cusp(scene):
    with pytest.raises(fano.CuspLineError):
        fano.third_point(scene, 1, (1, 0), 0)


def test_eckardt_witness_at_nu1_3():
    p = S13.curves[1].nu(3)
    res = fano.eckardt_witness(S13, p, 64, random.Random(0))
    assert res.status == "witness"
    w = res.witness
    assert S13.Y.eval(list(w.coords)) == 0
    assert not fano.y_lines(S13).contains_line(fano.to_row(p), fano.to_row(w))


def test_eckardt_witness_on_cusp_line():
    fld = S13.field
    cusp = S13.curves[1].cusp
    p = ProjPoint([c + (fld(4) if k == 5 else fld.zero) for k, c in enumerate(cusp.coords)], fld)
    assert fano.eckardt_witness(S13, p, 64, random.Random(1)).status == "witness"


def test_eckardt_zero_trials_inconclusive():
    res = fano.eckardt_witness(S13, S13.curves[1].nu(3), 0)
    assert res.status == "inconclusive" and res.witness is None


def test_eckardt_refuses_off_cone_and_vertex():
    with pytest.raises(ValueError):
        fano.eckardt_witness(S13, S13.p0)
    with pytest.raises(ValueError):
        fano.eckardt_witness(S13, ProjPoint([1, 0, 0, 0, 0, 0], S13.field))


def test_meets_cone_signals(scene):
    l = fano.cone_line(scene, 1, 5)
    assert fano.meets_cone(scene, l, 1).through_vertex
    res = fano.residual_line(scene, fano.cone_line(scene, 1, 3), fano.cone_line(scene, 1, 0))
    assert fano.meets_cone(scene, res, 1).through_vertex


def _param_by_formula(scene, i, m):
    # projection from the cusp [a:1:0] of the plane (x_j, x3, x4): u = x4 / (x_j - a x3)
    cv = scene.curves[i]
    c = m.coords
    den = c[cv.plane_coord] - cv.a * c[3]
    return POLE if not den else c[4] / den


def test_phi_tilde_on_random_finite_lines():
    rng = random.Random(5)
    plus, minus = fano.label_line(S13, "+"), fano.label_line(S13, "-")
    checked = 0
    for k in range(30):
        u = (S13.field(k % 13), S13.field.one)
        cands = fano.sample_d_lines(S13, 1, u, rng)
        if not cands:
            continue
        m, L = cands[0]
        meet = fano.meets_cone(S13, L, 1)
        assert meet.single == m
        val = fano.phi_tilde(S13, L, 1)
        par = _param_by_formula(S13, 1, m)
        assert par == u[0]
        assert val == S13.phi[1]((par, S13.field.one))
        zero = val is not POLE and not val
        assert zero == isinstance(line_meet_line(L, plus), ProjPoint)
        assert (val is POLE) == isinstance(line_meet_line(L, minus), ProjPoint)
        checked += 1
    assert checked >= 10


def test_phi_tilde_label_values():
    rng = random.Random(2)
    lab = S13.labels[1]
    for u, want in ((lab.u_plus, 0), (lab.u_inf, 1)):
        (m, L), *_ = fano.sample_d_lines(S13, 1, u, rng, lam=3)
        assert fano.phi_tilde(S13, L, 1) == want


def test_phi_tilde_refuses_cone_line():
    with pytest.raises(fano.NotInDivisorError):
        fano.phi_tilde(S13, fano.cone_line(S13, 1, 2), 1)


def test_xi4_ledger_zero(scene):
    chain = fano.assemble_xi4(scene)
    assert chain.is_cocycle()
    keys = {k for comp in chain.components for k, _ in comp.divisor}
    assert keys == {fano.label_line(scene, "+"), fano.label_line(scene, "-")}
    assert len({describe_key(k) for k in keys}) == 2


def test_xi4_defect_detected(scene):
    chain = fano.assemble_xi4(scene, phi={1: scene.phi[1], 2: scene.phi[1]})
    assert not chain.is_cocycle()


def test_xi4_refuses_t0(scene):
    with pytest.raises(ValueError):
        fano.assemble_xi4(scene.with_t(scene.field.zero))


def test_xi2_samples_consistent():
    chain, rep = fano.assemble_xi2(S13, 25, seed=0)
    assert chain.is_cocycle()
    assert len(rep) == 50
    assert all(s.consistent for s in rep)
    assert any(s.value is POLE for s in rep) and any(s.value == 0 for s in rep)
    assert any(s.other_component is not None for s in rep)


def test_xi2_zero_samples_empty():
    chain, rep = fano.assemble_xi2(S13, 0)
    assert rep == [] and len(chain.components) == 2


def test_conic_fiber_counts_are_raw_counts():
    counts = fano.conic_fiber_counts(S13, 1, 5, seed=0)
    assert len(counts) == 5 and all(c["lines"] >= 0 for c in counts)


def test_scene_defect_in_conditions_is_reported():
    bad = copy.copy(SCENE.with_t(None))
    bad.Y_sym = bad.Y_sym + Poly.var(bad.field, 7, 5, bad.Y_sym.names) ** 3
    with pytest.raises(SceneError):
        fano.lines_through_p0_symbolic(bad)
