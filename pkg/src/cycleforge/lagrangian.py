"""Restricting the cycles to Lagrangian subvarieties: products of two elliptic fibers
of S, and the varieties of lines of hyperplane sections W = Y ∩ H."""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field
from typing import Sequence

import numpy as np

from .fano import _through, phi_tilde, y_lines
from .ffenum import rank_mod_q, to_point, to_row
from .fields import Field
from .hilb2 import EllipticFiber, PairPoint, label_points_S, on_curve_S, phi2_eval, same_value
from .poly import Poly, double_root
from .projective import (
    LinearSubspace,
    Meet,
    ProjLine,
    ProjPoint,
    line_meet_subspace,
    nullspace,
    restrict_to_span,
    span,
)
from .scene import POLE, Scene, as_param


def _fmt(field: Field, v) -> str:
    return "pole" if v is POLE else field.format(v)


# ---------------------------------------------------------------------------
# products of elliptic fibers


@dataclass
class CheckOutcome:
    """A named check result: ``status`` is pass, fail or inconclusive."""

    status: str
    details: dict = dc_field(default_factory=dict)


def elliptic_restriction_check(
    scene: Scene, u1, u2, samples: int = 20, per_point: int = 3, seed: int = 0
) -> CheckOutcome:
    """On ``F_1 x F_2`` the function ``phi_i^[2]`` must be constant along each component.

    The components are ``(C_i ∩ F_1) x F_2`` and ``F_1 x (C_i ∩ F_2)``; for each point
    ``p`` of ``C_i ∩ F_a`` at least ``per_point`` partners ``q`` on the other fiber are
    evaluated and compared with ``phi_i(p)``.
    """
    fld = scene.field
    F1, F2 = EllipticFiber(_pair(u1, fld), fld), EllipticFiber(_pair(u2, fld), fld)
    if span([ProjPoint(list(F1.u), fld), ProjPoint(list(F2.u), fld)]).dim == 0:
        raise ValueError("the two fibers must be distinct")
    labels = label_points_S(scene)
    fiber_pts = {1: F1.points(scene), 2: F2.points(scene)}
    for k, pts in fiber_pts.items():
        if labels["+"] in pts or labels["-"] in pts:
            raise ValueError(f"fiber {k} passes through p_+ or p_-")
    rng = random.Random(seed)
    components = []
    for i in (1, 2):
        for a, b in ((1, 2), (2, 1)):
            fa = F1 if a == 1 else F2
            for p in fa.meet_curve(scene, i) if not _is_curve_fiber(fa, i) else []:
                partners = [q for q in fiber_pts[b] if q != p and not on_curve_S(scene, q, i)]
                components.append({"i": i, "p": p, "fiber": a, "partners": partners, "values": []})
    if not components:
        return CheckOutcome("inconclusive", {"reason": "no component meets the fibers"})
    # spread the sample budget over the components, distinct partners first
    each = max(1, -(-samples // len(components)))
    for comp in components:
        chosen = rng.sample(comp["partners"], min(each, len(comp["partners"])))
        comp["values"] = [(q, phi2_eval(scene, PairPoint.of(scene, comp["p"], q), comp["i"])) for q in chosen]
    failures, thin = [], []
    out = []
    for comp in components:
        i, p = comp["i"], comp["p"]
        target = scene.phi[i](scene.curves[i].parameter(p.coords))
        distinct_q = {q for q, _ in comp["values"]}
        if len(distinct_q) < per_point:
            thin.append(repr(p))
        bad = [repr(q) for q, v in comp["values"] if not same_value(v, target)]
        if bad:
            failures.append({"p": repr(p), "q": bad})
        out.append({
            "curve": i, "p": repr(p), "on_fiber": comp["fiber"],
            "value": _fmt(fld, target), "distinct_q": len(distinct_q), "evaluations": len(comp["values"]),
        })
    status = "fail" if failures else ("inconclusive" if thin else "pass")
    details = {"components": out, "failures": failures, "conclusion": "constancy verified" if status == "pass" else None}
    if thin:
        details["insufficient_sampling"] = thin
    return CheckOutcome(status, details)


def _pair(u, fld):
    return (fld(u[0]), fld(u[1])) if isinstance(u, tuple) else (fld(u), fld.one)


def _is_curve_fiber(f: EllipticFiber, i: int) -> bool:
    # the fiber over (0:1) is C1 itself
    return i == 1 and not f.u[0]


def choose_fibers(scene: Scene, count: int = 2) -> list[tuple]:
    """Fibers over ``(1:v)`` whose intersection with C2 is three F_q-points."""
    fld = scene.field
    out = []
    for v in fld.elements():
        f = EllipticFiber((fld.one, v), fld)
        if len(f.meet_curve(scene, 2)) == 3:
            out.append(f.u)
            if len(out) == count:
                break
    return out


# ---------------------------------------------------------------------------
# hyperplanes through p0


@dataclass
class SplitTrace:
    i: int
    params: list
    points: list
    lines: list


def smooth_on_section(Y, m: np.ndarray, hrow: np.ndarray) -> bool:
    """Jacobian criterion for ``W = Y ∩ H`` at ``m``: grad Y(m) and h are independent."""
    g = Y.gradient_at(m)
    return rank_mod_q(np.array([g, hrow]), Y.q) == 2


def _hdot(h: Sequence, v: Sequence, fld: Field):
    return sum((fld(a) * b for a, b in zip(h, v)), fld.zero)


def trace_roots(scene: Scene, h: Sequence, i: int) -> list[tuple]:
    """Parameters of the points of ``C_i`` on ``H`` (distinct roots of the pulled-back cubic)."""
    from .poly import binary_form_roots

    fld = scene.field
    cv = scene.curves[i]
    j = cv.plane_coord
    a, b, c = cv.a, cv.b, cv.c
    hj, h3, h4 = fld(h[j]), fld(h[3]), fld(h[4])
    # h . nu(s:r) = -(a*hj + h3)*s^3 + c*(b - a)*h4*s*r^2 + c*(b*hj + h3)*r^3
    coeffs = [-(a * hj + h3), fld.zero, c * (b - a) * h4, c * (b * hj + h3)]
    if not any(coeffs):
        raise ValueError("H contains the plane of the curve")
    return binary_form_roots(coeffs, fld)


def split_trace(scene: Scene, h: Sequence, i: int) -> SplitTrace | None:
    """The three lines of ``H ∩ \\hat C_i`` when the trace splits into distinct smooth points."""
    roots = trace_roots(scene, h, i)
    if len(roots) != 3 or any(not r for _, r in roots):
        return None
    cv = scene.curves[i]
    params = [as_param(u, scene.field) for u in roots]
    pts = [cv.nu(u) for u in params]
    return SplitTrace(i, params, pts, [ProjLine(scene.p0, p) for p in pts])


def find_split_hyperplane(scene: Scene, seed: int = 0, tries: int = 2000) -> list:
    """A random hyperplane through p0 on which both cone traces split into three lines."""
    fld = scene.field
    q = fld.q
    rng = random.Random(seed)
    for _ in range(tries):
        h = [fld(rng.randrange(q)) for _ in range(5)] + [fld.zero]
        if not any(h):
            continue
        try:
            if all(split_trace(scene, h, i) is not None for i in (1, 2)):
                return h
        except ValueError:
            continue
    raise RuntimeError("no split hyperplane found")


def hyperplane_through_p0_check(scene: Scene, h: Sequence, samples: int = 25, seed: int = 0) -> CheckOutcome:
    """Split ``H ∩ \\hat C_i`` into three lines and check ``psi_i`` is constant near each."""
    fld = scene.field
    q = fld.q
    h = [fld(v) for v in h]
    if h[5]:
        raise ValueError("H must contain p0")
    rng = random.Random(seed)
    Y = y_lines(scene)
    hrow = np.array([int(v) for v in h], dtype=np.int64)
    details = {"H": [int(v) for v in h], "curves": []}
    status = "pass"
    for i in (1, 2):
        tr = split_trace(scene, h, i)
        if tr is None:
            raise ValueError(f"H does not split the trace on C{i} into three distinct smooth points")
        cv = scene.curves[i]
        info = {"curve": i, "parameters": [_fmt(fld, u[0]) for u in tr.params], "problems": []}
        # ideal level: on the plane H ∩ {x0 = x_i = 0} the cone equation is c * (product of the three line forms)
        plane = _plane_in_cone_space(scene, h, i)
        cubic = restrict_to_span(cv.equation(), plane.basis, ("y0", "y1", "y2"))
        rem = cubic
        for L in tr.lines:
            form = _form_in_plane(plane, L, fld)
            rem = rem.divide_exact(form)
        if rem.degree() != 0:
            info["problems"].append("cone equation does not factor through the three lines")
        # sampled points on each line lie on Y and H
        for L in tr.lines:
            for _ in range(10):
                lam = fld(rng.randrange(q))
                p = L.point(fld.one, lam)
                if Y.poly.eval(list(p.coords)) or _hdot(h, p.coords, fld):
                    info["problems"].append(f"{p!r} off Y or H")
        # brute force: every F_q-point of H ∩ cone lies on one of the lines
        pts = Y.points
        sel = pts[(pts[:, 0] == 0) & (pts[:, cv.zero_coord] == 0) & ((pts @ hrow) % q == 0)]
        for row in sel:
            p = to_point(row, q)
            if not any(span([L.p, L.q, p]).dim == 1 for L in tr.lines):
                info["problems"].append(f"{p!r} of H ∩ cone is on none of the lines")
        info["cone_points_checked"] = int(len(sel))
        # constancy of psi_i on each Z_ij
        values = []
        per_line = max(1, -(-samples // 3)) if samples else 0
        for u, L in zip(tr.params, tr.lines):
            target = scene.phi[i](u)
            got = []
            attempts = 0
            while len(got) < per_line and attempts < 40 * per_line:
                attempts += 1
                lam = fld(rng.randrange(q))
                m = L.point(lam, fld.one)
                if m == scene.p0:
                    continue
                if not smooth_on_section(Y, to_row(m), hrow):
                    info["problems"].append(f"W is singular at {m!r}")
                    continue
                cands = [l for l in Y.lines_through(to_row(m), [hrow]) if not _through(l, scene.p0)]
                if not cands:
                    continue
                l = cands[rng.randrange(len(cands))]
                got.append(phi_tilde(scene, l, i))
            bad = [v for v in got if not same_value(v, target)]
            if bad:
                info["problems"].append(f"psi not constant on the component over {_fmt(fld, u[0])}")
            if len(got) < per_line:
                info["problems"].append(f"only {len(got)} lines found over {_fmt(fld, u[0])}")
            values.append({"parameter": _fmt(fld, u[0]), "value": _fmt(fld, target), "samples": len(got)})
        info["components"] = values
        info["values_distinct"] = len({v["value"] for v in values}) == 3
        if info["problems"]:
            status = "fail"
        details["curves"].append(info)
    return CheckOutcome(status, details)


def _plane_in_cone_space(scene: Scene, h: Sequence, i: int) -> LinearSubspace:
    fld = scene.field
    z = scene.curves[i].zero_coord
    rows = [list(h)]
    for k in (0, z):
        e = [fld.zero] * 6
        e[k] = fld.one
        rows.append(e)
    return LinearSubspace(nullspace(rows, fld, 6), fld)


def _form_in_plane(plane: LinearSubspace, L: ProjLine, fld: Field) -> Poly:
    from .projective import cross3

    u = plane.coordinates_of(L.p)
    v = plane.coordinates_of(L.q)
    c = cross3(u, v)
    g = Poly.gens(fld, 3, ("y0", "y1", "y2"))
    return g[0].scale(c[0]) + g[1].scale(c[1]) + g[2].scale(c[2])


# ---------------------------------------------------------------------------
# general hyperplanes


@dataclass
class GeneralHyperplane:
    h: list
    planes: dict
    span: LinearSubspace
    meet_line: LinearSubspace
    surface: Poly
    checks: dict

    @property
    def passed(self) -> bool:
        return all(self.checks.values())


def lifted_nu_coords(scene: Scene, h: Sequence, i: int, u) -> list:
    """``nu'_i(u) = h5*nu_i(u) - (h . nu_i(u)) e5``: the point of ``p0 nu_i(u)`` on H."""
    fld = scene.field
    v = scene.curves[i].nu_coords(u)
    h5 = fld(h[5])
    out = [h5 * x for x in v]
    out[5] = out[5] - _hdot(h, v, fld)
    return out


def plane_basis(scene: Scene, h: Sequence, i: int) -> list[list]:
    """``e'_k = h5*e_k - h_k*e5`` for the plane coordinates ``k`` of ``C_i``."""
    fld = scene.field
    cv = scene.curves[i]
    out = []
    for k in (cv.plane_coord, 3, 4):
        e = [fld.zero] * 6
        e[k] = fld(h[5])
        e[5] = -fld(h[k])
        out.append(e)
    return out


def general_hyperplane_setup(scene: Scene, h: Sequence) -> GeneralHyperplane:
    """C_i' = H ∩ \\hat C_i, the planes P_i they span, ``<P_1, P_2>`` and the cubic surface."""
    scene.require_curves()
    Yp = scene.Y_poly()
    fld = scene.field
    h = [fld(v) for v in h]
    if not h[5]:
        raise ValueError("H passes through p0")
    checks = {}
    names = ("s", "r")
    planes = {}
    for i in (1, 2):
        cv = scene.curves[i]
        nu = cv.nu_images(2, 0, 1, names)
        hnu = sum((p.scale(h[k]) for k, p in enumerate(nu)), Poly.zero(fld, 2, names))
        lifted = [p.scale(h[5]) for p in nu]
        lifted[5] = lifted[5] - hnu
        images = lifted
        if Yp.nvars == 7:
            # carry a symbolic t along as a third variable
            names3 = ("s", "r", "t")
            images = [p.embed(3, [0, 1], names3) for p in lifted] + [Poly.var(fld, 3, 2, names3)]
        checks[f"C{i}' on Y"] = Yp.compose(images).is_zero()
        on_h = sum((p.scale(h[k]) for k, p in enumerate(lifted)), Poly.zero(fld, 2, names))
        checks[f"C{i}' on H"] = on_h.is_zero()
        checks[f"C{i}' is cuspidal"] = double_root(cv.branch_form(), fld) is not None
        checks[f"C{i}' projects to C{i}"] = all((lifted[k] - nu[k].scale(h[5])).is_zero() for k in range(5))
        basis = plane_basis(scene, h, i)
        checks[f"P{i} in H"] = all(not _hdot(h, b, fld) for b in basis)
        restricted = restrict_to_span(Yp, basis, ("y0", "y1", "y2"))
        target = _cone_form(cv, fld).scale(h[5] ** 3)
        if Yp.nvars == 7:
            target = target.embed(4, [0, 1, 2], restricted.names)
        checks[f"W ∩ P{i} = C{i}'"] = restricted == target
        planes[i] = LinearSubspace(basis, fld)
    sp = span([planes[1], planes[2]])
    checks["dim <P1, P2> = 3"] = sp.dim == 3
    meet = _intersect(planes[1], planes[2], fld)
    checks["P1 ∩ P2 is a line"] = meet is not None and meet.dim == 1
    lab = scene.labels[1]
    trip = [ProjPoint(lifted_nu_coords(scene, h, 1, u), fld) for u in (lab.u_inf, lab.u_plus, lab.u_minus)]
    checks["P1 ∩ P2 contains the three labeled points"] = meet is not None and all(meet.contains(p) for p in trip)
    surface = restrict_to_span(Yp, [list(v) for v in sp.basis], ("y0", "y1", "y2", "y3"))
    checks["W ∩ <P1, P2> is a cubic surface"] = not surface.is_zero() and surface.degree() == 3
    return GeneralHyperplane(h, planes, sp, meet, surface, checks)


def _cone_form(cv, fld: Field) -> Poly:
    """``y2^3 - G_i(y0, y1)`` in the plane coordinates ``(x_j, x3, x4)``."""
    g = cv.branch_form().to_poly(fld, 3, 0, 1, ("y0", "y1", "y2"))
    return Poly.var(fld, 3, 2, ("y0", "y1", "y2")) ** 3 - g


def _intersect(A: LinearSubspace, B: LinearSubspace, fld: Field) -> LinearSubspace | None:
    ka, kb = len(A.basis), len(B.basis)
    cols = list(A.basis) + [[-v for v in b] for b in B.basis]
    rows = [[c[k] for c in cols] for k in range(A.ambient + 1)]
    ns = nullspace(rows, fld, ka + kb)
    vecs = [[sum((v[j] * A.basis[j][k] for j in range(ka)), fld.zero) for k in range(A.ambient + 1)] for v in ns]
    vecs = [v for v in vecs if any(v)]
    return LinearSubspace(vecs, fld) if vecs else None


def find_general_hyperplane(scene: Scene, seed: int = 0, tries: int = 500) -> list:
    """A random ``H`` missing p0 for which the structural checks pass."""
    fld = scene.field
    q = fld.q
    rng = random.Random(seed)
    for _ in range(tries):
        h = [fld(rng.randrange(q)) for _ in range(5)] + [fld.one]
        if general_hyperplane_setup(scene, h).passed:
            return h
    raise RuntimeError("no general hyperplane found")


def plane_parameter(scene: Scene, setup: GeneralHyperplane, m: ProjPoint, i: int) -> tuple:
    """Parameter of a point of ``C_i'`` from its coordinates in the basis ``e'_j, e'_3, e'_4``."""
    y = _coords_in(plane_basis(scene, setup.h, i), list(m.coords), scene.field)
    cv = scene.curves[i]
    pseudo = [scene.field.zero] * 6
    pseudo[cv.plane_coord], pseudo[3], pseudo[4] = y
    return cv.parameter(pseudo)


def _coords_in(basis: list[list], v: list, fld: Field) -> list:
    k = len(basis)
    rows = [[basis[j][i] for j in range(k)] + [-v[i]] for i in range(len(v))]
    for w in nullspace(rows, fld, k + 1):
        if w[k]:
            inv = fld.one / w[k]
            return [c * inv for c in w[:k]]
    raise ValueError("vector not in span")


def pullback_constancy_check(scene: Scene, setup: GeneralHyperplane, samples: int = 20, seed: int = 0) -> CheckOutcome:
    """Compare ``psi_i(l)`` with ``phi_i'(f(l))``, ``f(l) = l ∩ <P_1, P_2>``, on lines of W."""
    fld = scene.field
    q = fld.q
    rng = random.Random(seed)
    Y = y_lines(scene)
    hrow = np.array([int(v) for v in setup.h], dtype=np.int64)
    admitted, excluded, failures = [], [], []
    attempts = 0
    while len(admitted) < samples and attempts < 60 * (samples + 1):
        attempts += 1
        i = 1 + len(admitted) % 2
        k = rng.randrange(q + 1)
        u = (fld.one, fld.zero) if k == q else (fld(k), fld.one)
        m = ProjPoint(lifted_nu_coords(scene, setup.h, i, u), fld)
        cands = [l for l in Y.lines_through(to_row(m), [hrow]) if not _through(l, scene.p0)]
        if not cands:
            continue
        if not smooth_on_section(Y, to_row(m), hrow):
            failures.append({"point": repr(m), "reason": "W is singular at a sampled point"})
            continue
        l = cands[rng.randrange(len(cands))]
        f_l = line_meet_subspace(l, setup.span)
        if f_l is Meet.EQUAL or f_l is None:
            excluded.append({"line": [repr(l.p), repr(l.q)], "reason": "l lies in <P1, P2>" if f_l is Meet.EQUAL else "l misses <P1, P2>"})
            continue
        path_a = phi_tilde(scene, l, i)
        if not setup.planes[i].contains(f_l):
            failures.append({"line": [repr(l.p), repr(l.q)], "reason": "f(l) is not on P_i"})
            continue
        path_b = scene.phi[i](plane_parameter(scene, setup, f_l, i))
        rec = {"curve": i, "line": [repr(l.p), repr(l.q)], "psi": _fmt(fld, path_a), "phi'": _fmt(fld, path_b)}
        admitted.append(rec)
        if not same_value(path_a, path_b):
            failures.append(rec)
    if not samples:
        status = "inconclusive"
    else:
        status = "fail" if failures else ("pass" if len(admitted) >= samples else "inconclusive")
    return CheckOutcome(status, {"admitted": len(admitted), "excluded": excluded, "failures": failures, "samples": admitted})


def fiber_counts(scene: Scene, setup: GeneralHyperplane, points: int = 5, seed: int = 0) -> list[dict]:
    """Raw counts of F_q-lines of W through sample points of the cubic surface (fibers of ``f``)."""
    fld = scene.field
    q = fld.q
    rng = random.Random(seed)
    Y = y_lines(scene)
    hrow = np.array([int(v) for v in setup.h], dtype=np.int64)
    pts = Y.points
    normals = np.array([[int(v) for v in n] for n in nullspace(setup.span.basis, fld, 6)], dtype=np.int64)
    inside = pts[np.all((pts @ normals.T) % q == 0, axis=1)]
    out = []
    for k in sorted(rng.sample(range(len(inside)), min(points, len(inside)))):
        r = inside[k]
        lines = Y.lines_through(r, [hrow])
        off = [l for l in lines if line_meet_subspace(l, setup.span) is not Meet.EQUAL]
        out.append({"point": repr(to_point(r, q)), "lines_of_W": len(lines), "lines_not_in_span": len(off)})
    return out
