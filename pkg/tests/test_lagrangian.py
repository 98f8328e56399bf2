from __future__ import annotations

import numpy as np
import pytest

from cycleforge import lagrangian as lg
from cycleforge.fano import y_lines
from cycleforge.hilb2 import EllipticFiber, label_points_S
from cycleforge.projective import Meet, ProjPoint, line_meet_subspace, nullspace
from cycleforge.scene import canonical_scene, specialize_scene
from cycleforge.suites import DEFAULT_GENERAL_H

SCENE = canonical_scene()
S13 = specialize_scene(SCENE, 13)


def test_choose_fibers_at_13():
    fld = S13.field
    assert lg.choose_fibers(S13, 2) == [(fld(1), fld(2)), (fld(1), fld(4))]


def test_elliptic_restriction_passes():
    u1, u2 = lg.choose_fibers(S13, 2)
    out = lg.elliptic_restriction_check(S13, u1, u2, samples=20, seed=0)
    assert out.status == "pass", out.details
    assert out.details["conclusion"] == "constancy verified"
    assert all(c["distinct_q"] >= 3 for c in out.details["components"])


def test_elliptic_single_partner_flagged():
    u1, u2 = lg.choose_fibers(S13, 2)
    out = lg.elliptic_restriction_check(S13, u1, u2, samples=1, seed=0)
    assert out.status == "inconclusive"
    assert out.details["insufficient_sampling"]


def test_elliptic_fiber_through_p_plus_refused():
    fld = S13.field
    p = label_points_S(S13)["+"]
    c = p.coords
    # p = [0, 0, 0, 1, x4] lies over the ruling point (u0:u1) with u0*v = (x0, x1) = 0
    u = (fld.zero, fld.one) if not c[0] and not c[1] else (c[0], c[2])
    F = EllipticFiber(u, fld)
    assert F.contains(S13, p)
    other = lg.choose_fibers(S13, 1)[0]
    with pytest.raises(ValueError):
        lg.elliptic_restriction_check(S13, u, other)


def test_elliptic_equal_fibers_refused():
    u1 = lg.choose_fibers(S13, 1)[0]
    with pytest.raises(ValueError):
        lg.elliptic_restriction_check(S13, u1, u1)


def test_hyperplane_through_p0_passes():
    h = lg.find_split_hyperplane(S13, seed=0)
    out = lg.hyperplane_through_p0_check(S13, h, samples=25, seed=0)
    assert out.status == "pass", out.details
    for info in out.details["curves"]:
        assert len(info["components"]) == 3
        assert info["values_distinct"]
        assert info["cone_points_checked"] > 0


def test_hyperplane_trace_is_three_points():
    h = lg.find_split_hyperplane(S13, seed=0)
    for i in (1, 2):
        tr = lg.split_trace(S13, h, i)
        assert tr is not None and len(set(tr.params)) == 3
        cv = S13.curves[i]
        for u in tr.params:
            # plain evaluation: nu(u) is on H
            assert sum((a * b for a, b in zip(h, cv.nu_coords(u))), S13.field.zero) == 0


def test_hyperplane_containing_curve_plane_refused():
    # x0 = 0 contains p0 and the whole plane of C1 (and of C2)
    h = [1, 0, 0, 0, 0, 0]
    with pytest.raises(ValueError):
        lg.trace_roots(S13, h, 1)
    with pytest.raises(ValueError):
        lg.hyperplane_through_p0_check(S13, h)


def test_hyperplane_must_contain_p0():
    with pytest.raises(ValueError):
        lg.hyperplane_through_p0_check(S13, [0, 0, 0, 0, 0, 1])


def test_general_setup_over_number_field(scene):
    setup = lg.general_hyperplane_setup(scene, DEFAULT_GENERAL_H)
    assert setup.passed, setup.checks
    assert setup.span.dim == 3
    assert setup.meet_line.dim == 1
    assert setup.surface.degree() == 3


def test_general_setup_refuses_p0(scene):
    with pytest.raises(ValueError):
        lg.general_hyperplane_setup(scene, [1, 2, -1, 3, 1, 0])


def test_meet_line_holds_labeled_points(scene):
    setup = lg.general_hyperplane_setup(scene, DEFAULT_GENERAL_H)
    h = [scene.field(v) for v in DEFAULT_GENERAL_H]
    for p in scene.labels[1].by_label().values():
        # the lift of p along its cone line into H
        lifted = [h[5] * c for c in p.coords]
        lifted[5] = lifted[5] - sum((a * b for a, b in zip(h, p.coords)), scene.field.zero)
        assert setup.meet_line.contains(ProjPoint(lifted, scene.field))


@pytest.fixture(scope="module")
def setup13():
    setup = lg.general_hyperplane_setup(S13, DEFAULT_GENERAL_H)
    assert setup.passed, setup.checks
    return setup


def test_pullback_agrees(setup13):
    out = lg.pullback_constancy_check(S13, setup13, samples=20, seed=0)
    assert out.status == "pass", out.details["failures"]
    assert out.details["admitted"] == 20


def test_pullback_zero_samples(setup13):
    out = lg.pullback_constancy_check(S13, setup13, samples=0)
    assert out.status == "inconclusive"
    assert out.details["admitted"] == 0 and out.details["samples"] == []


def test_lines_in_span_are_excluded(setup13):
    # lines of the cubic surface W ∩ <P1, P2> make f undefined
    Y = y_lines(S13)
    hrow = np.array([int(v) for v in setup13.h], dtype=np.int64)
    normals = np.array([[int(v) for v in n] for n in nullspace(setup13.span.basis, S13.field, 6)], dtype=np.int64)
    inside = Y.points[np.all((Y.points @ normals.T) % 13 == 0, axis=1)]
    found = None
    for r in inside:
        for l in Y.lines_through(r, [hrow]):
            if line_meet_subspace(l, setup13.span) is Meet.EQUAL:
                found = l
                break
        if found is not None:
            break
    assert found is not None
    assert setup13.span.contains(found.p) and setup13.span.contains(found.q)


def test_fiber_counts_raw(setup13):
    counts = lg.fiber_counts(S13, setup13, points=5, seed=0)
    assert len(counts) == 5
    assert all(c["lines_of_W"] >= c["lines_not_in_span"] >= 0 for c in counts)


def test_smooth_on_section_tangent_hyperplane():
    Y = y_lines(S13)
    row = Y.points[0]
    grad = Y.gradient_at(row) % 13
    # H equal to the tangent hyperplane makes W singular there
    assert not lg.smooth_on_section(Y, row, grad)
    # a coordinate hyperplane not proportional to the gradient keeps it smooth
    k = next(k for k in range(6) if any(grad[j] for j in range(6) if j != k))
    assert lg.smooth_on_section(Y, row, np.eye(6, dtype=np.int64)[k])
