"""Lines on Y: cone lines, lines through p0, residual lines, Eckardt refutation,
the divisors D_i (as a membership predicate) and the chains xi_4 and xi_2."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .chains import Chain
from .ffenum import CompiledPoly, HypersurfaceLines, projective_points, to_point, to_row, zero_locus
from .poly import Poly
from .projective import (
    LinearSubspace,
    ProjLine,
    ProjPoint,
    cross3,
    line_in_hypersurface,
    line_meet_line,
    nullspace,
    span,
    subspace_restriction,
)
from .scene import POLE, Scene, SceneError, as_param, format_param

NAMES_PENCIL = ("a0", "a1", "a2", "a3", "a4", "lam", "t")


class CertificationError(RuntimeError):
    """A line claimed to lie on Y does not."""


class SkewLinesError(ValueError):
    pass


class PlaneInYError(ValueError):
    pass


class CuspLineError(ValueError):
    """The configuration involves the cusp (the line through the cusp or the cusp itself)."""


class NotInDivisorError(ValueError):
    """The line is not in D_i minus the lines through p0."""


@dataclass(frozen=True)
class LineOnY:
    line: ProjLine
    certified: bool

    def __post_init__(self):
        if not self.certified:
            raise CertificationError(f"{self.line!r} is not on Y")


def certify(scene: Scene, line: ProjLine) -> LineOnY:
    """Check containment against Y (with ``t`` free when the scene keeps it symbolic)."""
    ok = line_in_hypersurface(scene.Y_poly(), line)
    if not ok:
        raise CertificationError(f"{line!r} is not on Y")
    return LineOnY(line, True)


# ---------------------------------------------------------------------------
# cones


def cone_line(scene: Scene, i: int, u) -> LineOnY:
    """The line from p0 through ``nu_i(u)``, certified with ``t`` a free variable."""
    scene.require_curves()
    line = ProjLine(scene.p0, scene.curves[i].nu(u))
    if not line_in_hypersurface(scene.Y_sym, line):
        raise CertificationError(f"cone line over u = {u!r} is not on Y")
    return LineOnY(line, True)


def cone_family_restriction(scene: Scene, i: int) -> Poly:
    """Y's cubic on ``lam*p0 + nu_i(s:r)``, a polynomial in ``(s, r, lam, t)``."""
    scene.require_curves()
    names = ("s", "r", "lam", "t")
    g = Poly.gens(scene.field, 4, names)
    images = scene.curves[i].nu_images(4, 0, 1, names)
    images[5] = images[5] + g[2]
    return scene.Y_sym.compose(images + [g[3]])


@dataclass(frozen=True)
class ConditionSystem:
    """The λ-coefficients of Y on the pencil ``[a0, ..., a4, lam]``."""

    polys: tuple[Poly, ...]

    def __post_init__(self):
        for f in self.polys:
            if not _homogeneous_in(f, range(5)):
                raise ValueError("condition is not homogeneous in the a-variables")


def _homogeneous_in(f: Poly, idx) -> bool:
    return len({sum(e[i] for i in idx) for e in f.terms}) <= 1


def pencil_ring(scene: Scene) -> list[Poly]:
    return Poly.gens(scene.field, 7, NAMES_PENCIL)


def lines_through_p0_symbolic(scene: Scene) -> ConditionSystem:
    """Collect Y on ``[a0..a4, lam]`` by powers of ``lam`` and return the coefficients.

    Raises :class:`SceneError` unless they are exactly ``a4^3 - F``, ``a0*a3 - a1*a2``
    and ``t*a0`` (and nothing in higher powers).
    """
    a = pencil_ring(scene)
    f = scene.Y_sym.compose([a[0], a[1], a[2], a[3], a[4], a[5], a[6]])
    coeffs = f.collect(5)
    F = scene.F.compose([a[0], a[1], a[2], a[3]])
    expected = [a[4] ** 3 - F, a[0] * a[3] - a[1] * a[2], a[6] * a[0]]
    got = coeffs + [Poly.zero(scene.field, 7, NAMES_PENCIL)] * (3 - len(coeffs))
    if len(coeffs) > 3 or got != expected:
        raise SceneError("cone", "unexpected conditions for lines through p0")
    return ConditionSystem(tuple(got))


def conditions_under_t_nonzero(system: ConditionSystem) -> tuple[Poly, ...]:
    """With ``t != 0`` the last condition forces ``a0 = 0``; substitute it in the others."""
    c0, c1, c2 = system.polys
    a0 = Poly.var(c0.field, 7, 0, NAMES_PENCIL)
    if c2.divide_exact(a0).degree() != 1 or c2.divide_exact(a0).degree_in(6) != 1:
        raise ValueError("top condition is not t*a0")
    return (a0, -c1.subs({0: 0}), c0.subs({0: 0}))


def enumerate_lines_through_p0(scene: Scene) -> set[ProjLine]:
    """Exhaustive search over ``P^4(F_q)`` for ``a`` with ``p0 + [a, 0]`` spanning a line on Y."""
    if not scene.field.is_finite:
        raise ValueError("enumeration needs a scene over F_q")
    t = scene.require_t(nonzero=True)
    system = lines_through_p0_symbolic(scene)
    q = scene.field.q
    numeric = [f.subs({6: t}) for f in system.polys]
    compiled = [CompiledPoly(f.drop_variable(6).drop_variable(5)) for f in numeric]
    pts = zero_locus(compiled, projective_points(4, q))
    out = set()
    for row in pts:
        a = to_point(list(row) + [0], q)
        out.add(ProjLine(scene.p0, a))
    return out


def curve_points(scene: Scene, i: int) -> list[ProjPoint]:
    """``C_i(F_q)`` by enumerating its plane ``x0 = x_i = x5 = 0``."""
    q = scene.field.q
    cv = scene.curves[i]
    plane = projective_points(2, q)
    eq = cv.equation()
    amb = np.zeros((len(plane), 6), dtype=np.int64)
    amb[:, cv.plane_coord] = plane[:, 0]
    amb[:, 3] = plane[:, 1]
    amb[:, 4] = plane[:, 2]
    sel = amb[CompiledPoly(eq)(amb) == 0]
    return [to_point(r, q) for r in sel]


def cone_line_set(scene: Scene) -> set[ProjLine]:
    """Cone lines over ``C_1(F_q)`` and ``C_2(F_q)`` (enumerated, not parametrized)."""
    return {ProjLine(scene.p0, p) for i in (1, 2) for p in curve_points(scene, i)}


# ---------------------------------------------------------------------------
# residual lines


def _linear_form_of_line(sub: LinearSubspace, line: ProjLine) -> list:
    """Coefficients (in the basis of the plane ``sub``) of the form cutting ``line``."""
    u = sub.coordinates_of(line.p)
    v = sub.coordinates_of(line.q)
    return cross3(u, v)


def _form_poly(coeffs: Sequence, ring: Poly) -> Poly:
    g = Poly.gens(ring.field, ring.nvars, ring.names)
    out = Poly.zero(ring.field, ring.nvars, ring.names)
    for c, x in zip(coeffs, g):
        out = out + x.scale(c)
    return out


def residual_line(scene: Scene, l1: LineOnY, l2: LineOnY, plane: LinearSubspace | None = None) -> LineOnY:
    """The third line of ``Y ∩ P`` for the plane ``P`` spanned by ``l1`` and ``l2``.

    When ``l1 = l2`` a plane containing it must be supplied (the tangent case).
    """
    a, b = l1.line, l2.line
    if a == b:
        if plane is None:
            raise ValueError("equal lines need a supplied plane")
        P = plane
        if not (P.contains(a.p) and P.contains(a.q)):
            raise ValueError("supplied plane does not contain the line")
    else:
        P = span([a, b])
        if P.dim != 2:
            raise SkewLinesError("lines are skew")
    if P.dim != 2:
        raise ValueError("not a plane")
    cubic = subspace_restriction(scene.Y_poly(), P)
    if cubic.is_zero():
        raise PlaneInYError("the plane lies in Y")
    L1 = _form_poly(_linear_form_of_line(P, a), cubic)
    L2 = _form_poly(_linear_form_of_line(P, b), cubic)
    rest = cubic.divide_exact(L1).divide_exact(L2)
    if rest.degree() != 1 or any(e[3:] != (0,) * (rest.nvars - 3) for e in rest.terms):
        raise ValueError("residual factor is not a linear form in the plane coordinates")
    coeffs = [rest.coefficient(tuple(1 if k == j else 0 for k in range(rest.nvars))) for j in range(3)]
    ker = nullspace([coeffs], scene.field, 3)
    pts = [ProjPoint([sum((c * bv[k] for c, bv in zip(v, P.basis)), scene.field.zero) for k in range(6)], scene.field) for v in ker]
    return certify(scene, ProjLine(pts[0], pts[1]))


def tangent_plane(scene: Scene, i: int, u) -> LinearSubspace:
    """The plane spanned by p0 and the tangent line of ``C_i`` at ``nu_i(u)``."""
    cv = scene.curves[i]
    return span([scene.p0, cv.nu(u), cv.tangent_point(u)])


def third_point(scene: Scene, i: int, u1, u2) -> tuple:
    """The parameter of the third point of ``C_i`` on the line through ``nu(u1)``, ``nu(u2)``.

    For ``u1 = u2`` the line is the tangent at ``nu(u1)``.  The line is pulled back
    along ``nu`` to a binary cubic in ``(s, r)``; the two known linear factors are
    divided out and the root of the remaining factor is returned.
    """
    scene.require_curves()
    fld = scene.field
    cv = scene.curves[i]
    p1, p2 = as_param(u1, fld), as_param(u2, fld)
    if not p1[1] or not p2[1]:
        raise CuspLineError("the cusp itself was given")
    j = cv.plane_coord

    def plane(v):
        return [v[j], v[3], v[4]]

    A = plane(cv.nu_coords(p1))
    Bv = plane(cv.tangent_point(p1).coords) if p1 == p2 else plane(cv.nu_coords(p2))
    Lj, L3, L4 = cross3(A, Bv)
    a, b, c = cv.a, cv.b, cv.c
    names = ("s", "r")
    s, r = Poly.gens(fld, 2, names)
    pulled = ((s**3).scale(-(a * Lj + L3)) + (s * r * r).scale(c * (b - a) * L4) + (r**3).scale(c * (b * Lj + L3)))
    if pulled.is_zero():
        raise ValueError("line contains the curve")
    if not pulled.coefficient((3, 0)):
        raise CuspLineError("the line passes through the cusp")
    f1 = s - r.scale(p1[0])
    f2 = s - r.scale(p2[0])
    rest = pulled.divide_exact(f1).divide_exact(f2)
    cs, cr = rest.coefficient((1, 0)), rest.coefficient((0, 1))
    return as_param((-cr, cs), fld)


# ---------------------------------------------------------------------------
# meeting the cones


@dataclass(frozen=True)
class ConeMeeting:
    points: tuple[ProjPoint, ...]
    through_vertex: bool

    @property
    def single(self) -> ProjPoint | None:
        return self.points[0] if len(self.points) == 1 and not self.through_vertex else None


def meets_cone(scene: Scene, l: LineOnY | ProjLine, i: int) -> ConeMeeting:
    """Intersection of a line on Y with the cone ``\\hat C_i`` (vertex p0, base C_i).

    On Y, ``{x0 = x_i = 0}`` cuts exactly the cone, so the intersection is the common
    zero set on the line of the two linear forms ``x0`` and ``x_i``.  A line inside
    the cone passes through p0 and is reported as such.
    """
    line = l.line if isinstance(l, LineOnY) else l
    fld = line.field
    z = scene.curves[i].zero_coord
    f0 = (line.p[0], line.q[0])
    fi = (line.p[z], line.q[z])
    if not any(f0) and not any(fi):
        return ConeMeeting((), True)
    det = f0[0] * fi[1] - f0[1] * fi[0]
    if det:
        return ConeMeeting((), False)
    s, r = (f0[1], -f0[0]) if any(f0) else (fi[1], -fi[0])
    m = ProjPoint([s * x + r * y for x, y in zip(line.p, line.q)], fld)
    if m == scene.p0:
        return ConeMeeting((), True)
    eq = scene.curves[i].equation()
    if eq.eval(list(m.coords)):
        raise CertificationError("line meets {x0 = x_i = 0} off the cone; it is not on Y")
    return ConeMeeting((m,), False)


def project_from_p0(scene: Scene, m: ProjPoint) -> ProjPoint:
    """Drop x5: the point of the base curve's plane under the cone point ``m``."""
    c = list(m.coords)
    c[5] = scene.field.zero
    return ProjPoint(c, scene.field)


def cone_parameter(scene: Scene, m: ProjPoint, i: int) -> tuple:
    return scene.curves[i].parameter(project_from_p0(scene, m).coords)


def phi_tilde(scene: Scene, l: LineOnY | ProjLine, i: int):
    """``phi_i`` at the base-curve point under the unique point of ``l`` on the cone."""
    meet = meets_cone(scene, l, i)
    if meet.through_vertex or not meet.points:
        raise NotInDivisorError("line is not in the open part of D_i")
    return scene.phi[i](cone_parameter(scene, meet.points[0], i))


def label_line(scene: Scene, sign: str) -> ProjLine:
    """The line from p0 to ``p_+``, ``p_-`` or ``p_inf``."""
    lab = scene.labels[1] or scene.labels[2]
    return ProjLine(scene.p0, lab.by_label()[sign])


# ---------------------------------------------------------------------------
# Eckardt points


@dataclass
class EckardtResult:
    point: ProjPoint
    status: str  # "witness" or "inconclusive"
    witness: ProjPoint | None
    trials: int

    def to_jsonable(self) -> dict:
        return {
            "point": repr(self.point),
            "status": self.status,
            "witness": None if self.witness is None else repr(self.witness),
            "trials": self.trials,
        }


def y_lines(scene: Scene) -> HypersurfaceLines:
    """Cached F_q point set and line search on Y."""
    if "ylines" not in scene.cache:
        scene.cache["ylines"] = HypersurfaceLines(scene.Y)
    return scene.cache["ylines"]


def on_cones(scene: Scene, p: ProjPoint) -> bool:
    c = p.coords
    if c[0]:
        return False
    return any(not c[cv.zero_coord] and not cv.equation().eval(list(c)) for cv in scene.curves.values())


def eckardt_witness(scene: Scene, p: ProjPoint, trials: int = 64, rng: random.Random | None = None) -> EckardtResult:
    """Look for ``q`` in ``Y ∩ T_pY`` with the line ``pq`` not on Y."""
    if not on_cones(scene, p) or p == scene.p0:
        raise ValueError("point is not on the cones minus the vertex")
    H = y_lines(scene)
    q = scene.field.q
    m = to_row(p)
    grad = H.gradient_at(m)
    if not grad.any():
        raise ValueError("Y is singular at the point; no tangent hyperplane")
    rng = rng or random.Random(0)
    cand = H.points[(H.points @ grad) % q == 0]
    cand = cand[~np.all(cand == m, axis=1)]
    for k in range(trials):
        r = cand[rng.randrange(len(cand))]
        if not H.contains_line(m, r):
            return EckardtResult(p, "witness", to_point(r, q), k + 1)
    return EckardtResult(p, "inconclusive", None, trials)


# ---------------------------------------------------------------------------
# chains


def assemble_xi4(scene: Scene, phi: dict | None = None) -> Chain:
    """``(Gamma_1, phi_1) + (Gamma_2, phi_2)``, divisors pushed to cone lines."""
    if scene.t is not None and not scene.t:
        raise ValueError("xi4 needs t != 0")
    phi = phi or scene.phi
    chain = Chain("xi4")
    for i in (1, 2):
        cv = scene.curves[i]
        div = [(ProjLine(scene.p0, cv.nu(u)), m) for u, m in phi[i].divisor()]
        chain.add(f"Gamma{i}", phi[i], div)
    return chain


@dataclass(frozen=True)
class WToken:
    """The divisor ``W_±`` of lines meeting the line ``p0 p_±``."""

    line: ProjLine
    sign: str

    def __str__(self):
        return f"W{self.sign}"


@dataclass
class Xi2Sample:
    component: int
    line: ProjLine
    point: ProjPoint
    parameter: tuple
    value: object
    meets_plus: bool
    meets_minus: bool
    other_component: object
    consistent: bool

    def to_jsonable(self, field) -> dict:
        s, r = self.parameter
        return {
            "component": self.component,
            "line": [repr(self.line.p), repr(self.line.q)],
            "point": repr(self.point),
            "parameter": "inf" if not r else field.format(s / r),
            "value": "pole" if self.value is POLE else field.format(self.value),
            "meets_p0p+": self.meets_plus,
            "meets_p0p-": self.meets_minus,
            "other_component": self.other_component,
            "consistent": self.consistent,
        }


def sample_d_lines(scene: Scene, i: int, u, rng: random.Random, lam=None) -> list[tuple[ProjPoint, ProjLine]]:
    """Lines on Y through a point of ``\\hat C_i`` over ``u`` which avoid p0."""
    q = scene.field.q
    fld = scene.field
    base = scene.curves[i].nu_coords(u)
    lam = fld(rng.randrange(q)) if lam is None else fld(lam)
    m = ProjPoint([c + (lam if k == 5 else fld.zero) for k, c in enumerate(base)], fld)
    lines = y_lines(scene).lines_through(to_row(m))
    return [(m, L) for L in lines if not _through(L, scene.p0)]


def conic_fiber_counts(scene: Scene, i: int, points: int = 5, seed: int = 0) -> list[dict]:
    """Number of F_q-lines of Y off p0 through sample points of ``\\hat C_i`` (raw counts only)."""
    rng = random.Random(seed)
    out = []
    for _ in range(points):
        u = _random_param(rng, scene.field, scene.field.q)
        lines = sample_d_lines(scene, i, u, rng)
        if lines:
            out.append({"point": repr(lines[0][0]), "lines": len(lines)})
        else:
            out.append({"parameter": format_param(u, scene.field), "lines": 0})
    return out


def _through(line: ProjLine, p: ProjPoint) -> bool:
    return span([line.p, line.q, p]).dim == 1


def xi2_samples(scene: Scene, samples: int, seed: int = 0) -> list[Xi2Sample]:
    """``samples`` lines per D_i; the first few are forced through ``p0 p_±`` and ``p0 p_inf``."""
    q = scene.field.q
    fld = scene.field
    rng = random.Random(seed)
    out = []
    plus, minus = label_line(scene, "+"), label_line(scene, "-")
    for i in (1, 2):
        lab = scene.labels[i]
        forced = [lab.u_plus, lab.u_minus, lab.u_inf] * 2
        got = 0
        attempts = 0
        while got < samples and attempts < 50 * (samples + 1):
            attempts += 1
            u = forced[got] if got < len(forced) else _random_param(rng, fld, q)
            cands = sample_d_lines(scene, i, u, rng)
            if not cands:
                continue
            m, L = cands[rng.randrange(len(cands))]
            val = phi_tilde(scene, L, i)
            par = cone_parameter(scene, m, i)
            mp = isinstance(line_meet_line(L, plus), ProjPoint)
            mm = isinstance(line_meet_line(L, minus), ProjPoint)
            zero = val is not POLE and not val
            pole = val is POLE
            consistent = (zero == (mp if i == 1 else mm)) and (pole == (mm if i == 1 else mp))
            other = 3 - i
            om = meets_cone(scene, L, other)
            other_val = None
            if om.single is not None:
                v = scene.phi[other](cone_parameter(scene, om.single, other))
                other_val = "pole" if v is POLE else fld.format(v)
            out.append(Xi2Sample(i, L, m, par, val, mp, mm, other_val, consistent))
            got += 1
    return out


def _random_param(rng: random.Random, fld, q: int) -> tuple:
    k = rng.randrange(q + 1)
    return (fld.one, fld.zero) if k == q else (fld(k), fld.one)


def assemble_xi2(scene: Scene, samples: int = 25, seed: int = 0) -> tuple[Chain, list[Xi2Sample]]:
    """``(D_1, phi~_1) + (D_2, phi~_2)`` with divisors ``±(W_+ - W_-)``, plus sampled witnesses."""
    scene.require_t(nonzero=True)
    plus, minus = label_line(scene, "+"), label_line(scene, "-")
    wp, wm = WToken(plus, "+"), WToken(minus, "-")
    chain = Chain("xi2")
    chain.add("D1", "phi~1", [(wp, 1), (wm, -1)])
    chain.add("D2", "phi~2", [(wm, 1), (wp, -1)])
    rep = xi2_samples(scene, samples, seed) if samples else []
    return chain, rep
