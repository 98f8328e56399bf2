"""Reduced pairs of points of S: the divisors C + S, the induced cycles, the
intersection identity for a second curve, and the t -> 0 degeneration check."""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field

import numpy as np

from .chains import Chain, PairToken, SumToken
from .fano import LineOnY, certify, meets_cone, phi_tilde, residual_line
from .ffenum import CompiledPoly, projective_points, to_point, zero_locus
from .fields import Field
from .poly import Poly, binary_form_roots
from .projective import ProjLine, ProjPoint, line_restriction, nullspace, span
from .scene import NAMES5, POLE, Scene, drop_x5


class NotOnSError(ValueError):
    pass


class NotInDivisorError(ValueError):
    pass


@dataclass(frozen=True)
class PairPoint:
    """An unordered pair of distinct points of S (stored in a canonical order)."""

    p: ProjPoint
    q: ProjPoint

    @classmethod
    def of(cls, scene: Scene, p: ProjPoint, q: ProjPoint) -> PairPoint:
        for x in (p, q):
            if len(x) != 5 or not scene.on_S(x):
                raise NotOnSError(f"{x!r} is not a point of S")
        if p == q:
            raise ValueError("nonreduced pairs are out of scope")
        a, b = sorted((p, q), key=lambda x: x.sort_key())
        return cls(a, b)

    def members(self) -> tuple[ProjPoint, ProjPoint]:
        return (self.p, self.q)

    def token(self) -> PairToken:
        return PairToken.of(self.p, self.q)


def on_curve_S(scene: Scene, p: ProjPoint, i: int) -> bool:
    """Membership of a point of P^4 in ``C_i``."""
    c = p.coords
    cv = scene.curves[i]
    if c[0] or c[cv.zero_coord]:
        return False
    return not cv.equation(5, NAMES5).eval(list(c))


def phi_at(scene: Scene, p: ProjPoint, i: int):
    return scene.phi[i](scene.curves[i].parameter(p.coords))


def phi2_eval(scene: Scene, pair: PairPoint, i: int):
    """``phi_i^[2]`` on a pair in ``C_i + S``.

    One member on ``C_i`` gives ``phi_i`` there; both members give the two branch
    values as a sorted tuple.
    """
    on = [x for x in pair.members() if on_curve_S(scene, x, i)]
    if not on:
        raise NotInDivisorError("neither point lies on the curve")
    vals = [phi_at(scene, x, i) for x in on]
    if len(vals) == 1:
        return vals[0]
    key = scene.field.sort_key
    return tuple(sorted(vals, key=lambda v: (1, ()) if v is POLE else (0, key(v))))


def label_points_S(scene: Scene) -> dict:
    lab = scene.labels[1]
    return {k: drop_x5(v) for k, v in lab.by_label().items()}


def assemble_xi2_induced(scene: Scene, phi: dict | None = None) -> Chain:
    """``(C_1 + S, phi_1^[2]) + (C_2 + S, phi_2^[2])`` with divisors ``±((p_+ + S) - (p_- + S))``."""
    phi = phi or scene.phi
    chain = Chain("xi[2]")
    for i in (1, 2):
        cv = scene.curves[i]
        div = [(SumToken(drop_x5(cv.nu(u))), m) for u, m in phi[i].divisor()]
        chain.add(f"C{i}+S", f"phi{i}^[2]", div)
    return chain


def assemble_xi_p(scene: Scene, p: ProjPoint, phi: dict | None = None) -> Chain:
    """``(C_1 + p, phi_1) + (C_2 + p, phi_2)``; the divisors are pairs ``{p_±, p}``."""
    if len(p) != 5 or not scene.on_S(p):
        raise NotOnSError("p must lie on S")
    pts = label_points_S(scene)
    if p in (pts["+"], pts["-"]):
        raise ValueError("p lies in the support of div(phi_i)")
    phi = phi or scene.phi
    chain = Chain("xi_p")
    for i in (1, 2):
        cv = scene.curves[i]
        div = [(PairToken.of(drop_x5(cv.nu(u)), p), m) for u, m in phi[i].divisor()]
        chain.add(f"C{i}+p", phi[i], div)
    return chain


# ---------------------------------------------------------------------------
# points of S over F_q and elliptic fibers


def s_points(scene: Scene) -> np.ndarray:
    """``S(F_q)`` as canonical rows (cached on the scene)."""
    if "s_points" not in scene.cache:
        q = scene.field.q
        eqs = [CompiledPoly(e) for e in reversed(scene.S_eqs)]
        scene.cache["s_points"] = zero_locus(eqs, projective_points(4, q))
    return scene.cache["s_points"]


@dataclass(frozen=True)
class EllipticFiber:
    """The fiber of S over ``u`` for the ruling ``[x0, x1, x2, x3] = [u0*v0, u0*v1, u1*v0, u1*v1]``.

    It is the plane cubic ``x4^3 = F(u0*v0, u0*v1, u1*v0, u1*v1)`` in ``(v0 : v1 : x4)``.
    """

    u: tuple
    field: Field

    def embed(self, v0, v1, x4) -> ProjPoint:
        u0, u1 = self.u
        return ProjPoint([u0 * v0, u0 * v1, u1 * v0, u1 * v1, x4], self.field)

    def linear_conditions(self) -> list[list]:
        """Rows ``h`` with ``h . x = 0`` cutting the fiber's plane in P^4."""
        u0, u1 = self.u
        z = self.field.zero
        return [[u1, z, -u0, z, z], [z, u1, z, -u0, z]]

    def contains(self, scene: Scene, p: ProjPoint) -> bool:
        c = p.coords
        if any(sum((h_ * x for h_, x in zip(h, c)), self.field.zero) for h in self.linear_conditions()):
            return False
        return scene.on_S(p)

    def points_over(self, scene: Scene, v0, v1) -> list[ProjPoint]:
        """The points of the fiber over ``(v0 : v1)``: cube roots of F there."""
        u0, u1 = self.u
        val = scene.F.eval([u0 * v0, u0 * v1, u1 * v0, u1 * v1])
        return [self.embed(v0, v1, r) for r in self.field.cube_roots(val)]

    def points(self, scene: Scene) -> list[ProjPoint]:
        fld = self.field
        params = [(fld.one, fld.zero)] + [(x, fld.one) for x in fld.elements()]
        out = []
        for v0, v1 in params:
            out.extend(self.points_over(scene, v0, v1))
        return sorted(set(out), key=lambda p: p.sort_key())

    def meet_curve(self, scene: Scene, i: int) -> list[ProjPoint]:
        """``C_i ∩ fiber`` by substituting the fiber parametrization into ``x0 = x_i = 0``."""
        u0, u1 = self.u
        z = self.field.zero
        coeff = {0: (u0, z), 1: (z, u0), 2: (u1, z), 3: (z, u1)}
        rows = [list(coeff[0]), list(coeff[scene.curves[i].zero_coord])]
        sol = nullspace(rows, self.field, 2)
        if len(sol) == 2:
            raise ValueError("the fiber is the curve itself")
        if not sol:
            return []
        v0, v1 = sol[0]
        return self.points_over(scene, v0, v1)


def fiber(scene: Scene, u) -> EllipticFiber:
    fld = scene.field
    u = (fld(u[0]), fld(u[1])) if isinstance(u, tuple) else (fld(u), fld.one)
    return EllipticFiber(u, fld)


# ---------------------------------------------------------------------------
# the intersection identity


@dataclass
class IdentityReport:
    passed: bool
    intersection: list
    brute_force_intersection: list
    samples: list = dc_field(default_factory=list)
    flagged_p_inf: int = 0
    failures: list = dc_field(default_factory=list)

    def to_jsonable(self) -> dict:
        return {
            "passed": self.passed,
            "intersection": [repr(p) for p in self.intersection],
            "brute_force_intersection": [repr(p) for p in self.brute_force_intersection],
            "samples": len(self.samples),
            "flagged_p_inf": self.flagged_p_inf,
            "failures": self.failures,
        }


def xi_C_identity_check(scene: Scene, C: EllipticFiber, i: int, samples: int = 20, seed: int = 0) -> IdentityReport:
    """Set-level check of ``(C_i+S . C+S) = (C_i+C) + sum_{p in C_i ∩ C} (S+p)`` on sampled pairs.

    Half the samples are drawn from the left side and tested against the right, the
    other half go the other way.
    """
    pts = label_points_S(scene)
    cpts = C.points(scene)
    if pts["+"] in cpts or pts["-"] in cpts:
        raise ValueError("the curve meets the support of div(phi_i)")
    rng = random.Random(seed)
    inter = sorted(C.meet_curve(scene, i), key=lambda p: p.sort_key())
    curve_pts = [p for p in cpts if on_curve_S(scene, p, i)]
    spts = [to_point(r, scene.field.q) for r in s_points(scene)]
    ci_pts = [to_point(list(r[:5]), scene.field.q) for r in _curve_rows(scene, i)]
    rep = IdentityReport(True, inter, sorted(curve_pts, key=lambda p: p.sort_key()))
    if set(inter) != set(curve_pts):
        rep.passed = False
        rep.failures.append("substitution and enumeration disagree on C_i ∩ C")
    inter_set = set(inter)

    def in_lhs(pair: PairPoint) -> bool:
        a, b = pair.members()
        return (on_curve_S(scene, a, i) or on_curve_S(scene, b, i)) and (C.contains(scene, a) or C.contains(scene, b))

    def in_rhs(pair: PairPoint) -> bool:
        a, b = pair.members()
        cross = (on_curve_S(scene, a, i) and C.contains(scene, b)) or (on_curve_S(scene, b, i) and C.contains(scene, a))
        return cross or a in inter_set or b in inter_set

    # the left side is sampled from enumerated points (membership by predicate), the
    # right side from the computed intersection; each is tested against the other side
    both = [p for p in ci_pts if C.contains(scene, p)]

    def draw_lhs(k: int) -> PairPoint | None:
        x = rng.choice(both) if (k % 2 and both) else rng.choice(ci_pts)
        y = rng.choice(spts) if x in both else rng.choice(cpts)
        return None if x == y else PairPoint.of(scene, x, y)

    def draw_rhs(k: int) -> PairPoint | None:
        if k % 2 and inter:
            x, y = rng.choice(inter), rng.choice(spts)
        else:
            x, y = rng.choice(ci_pts), rng.choice(cpts)
        return None if x == y else PairPoint.of(scene, x, y)

    pinf = pts["inf"]
    for direction, draw, test in (("lhs", draw_lhs, in_rhs), ("rhs", draw_rhs, in_lhs)):
        want = (samples + 1) // 2 if direction == "lhs" else samples // 2
        done = attempts = 0
        while done < want and attempts < 20 * (want + 1):
            attempts += 1
            pair = draw(done)
            if pair is None:
                continue
            ok = test(pair)
            if pinf in pair.members():
                rep.flagged_p_inf += 1
            rep.samples.append({"pair": [repr(pair.p), repr(pair.q)], "drawn_from": direction, "ok": ok})
            if not ok:
                rep.passed = False
                rep.failures.append(rep.samples[-1])
            done += 1
        if done < want:
            rep.passed = False
            rep.failures.append(f"only {done} of {want} {direction} samples drawn")
    return rep


def _curve_rows(scene: Scene, i: int) -> np.ndarray:
    from .fano import curve_points

    return np.array([[int(c) for c in p.coords] for p in curve_points(scene, i)], dtype=np.int64)


# ---------------------------------------------------------------------------
# degeneration t -> 0


@dataclass
class DegenerationReport:
    passed: bool
    pair: tuple | None
    values: dict
    note: str = ""

    def to_jsonable(self, field: Field) -> dict:
        fmt = lambda v: "pole" if v is POLE else (None if v is None else field.format(v))
        return {
            "passed": self.passed,
            "pair": None if self.pair is None else [repr(x) for x in self.pair],
            "values": {k: fmt(v) for k, v in self.values.items()},
            "note": self.note,
        }


def forward_line(scene0: Scene, p: ProjPoint, q: ProjPoint) -> LineOnY:
    """The residual line of the plane spanned by ``p0 p`` and ``p0 q`` on ``Y_0``."""
    lift = lambda x: ProjPoint(list(x.coords) + [scene0.field.zero], scene0.field)
    l1 = certify(scene0, ProjLine(scene0.p0, lift(p)))
    l2 = certify(scene0, ProjLine(scene0.p0, lift(q)))
    return residual_line(scene0, l1, l2)


def recover_pair(scene0: Scene, line: ProjLine) -> tuple[ProjPoint, ProjPoint]:
    """The two points of S whose cone lines meet ``line`` (roots of Q on the line)."""
    x = Poly.gens(scene0.field, 6)
    Q6 = x[0] * x[3] - x[1] * x[2]
    quad = line_restriction(Q6, line)
    if quad.is_zero():
        raise ValueError("the line lies on the cone over Q")
    coeffs = [quad.coefficient((2 - k, k)) for k in range(3)]
    roots = binary_form_roots(coeffs, scene0.field)
    if len(roots) != 2:
        raise ValueError(f"expected two intersection points with the cone over Q, got {len(roots)}")
    pts = [line.point(s, r) for s, r in roots]
    return tuple(drop_from_p0(scene0, m) for m in pts)


def drop_from_p0(scene: Scene, m: ProjPoint) -> ProjPoint:
    return ProjPoint(m.coords[:5], scene.field)


def same_value(x, y) -> bool:
    if x is POLE or y is POLE:
        return x is y
    return x == y


def degeneration_check(scene0: Scene, l: LineOnY, i: int) -> DegenerationReport:
    """Recover the pair behind ``l`` and compare the three evaluations of ``phi_i``."""
    if scene0.t is None or scene0.t:
        raise ValueError("the degeneration check runs on the t = 0 scene")
    line = l.line
    if span([line.p, line.q, scene0.p0]).dim == 1:
        raise ValueError("line passes through p0")
    meet = meets_cone(scene0, line, i)
    if meet.single is None:
        return DegenerationReport(False, None, {}, "line is not in D_i(0)°")
    try:
        a, b = recover_pair(scene0, line)
    except ValueError as exc:
        return DegenerationReport(False, None, {}, str(exc))
    if not (scene0.on_S(a) and scene0.on_S(b)):
        return DegenerationReport(False, (a, b), {}, "recovered points are not on S")
    on = [x for x in (a, b) if on_curve_S(scene0, x, i)]
    if len(on) != 1:
        return DegenerationReport(False, (a, b), {}, "expected exactly one recovered point on C_i")
    p = on[0]
    qq = b if p == a else a
    v_line = phi_tilde(scene0, line, i)
    v_curve = phi_at(scene0, p, i)
    v_pair = phi2_eval(scene0, PairPoint.of(scene0, p, qq), i)
    ok = same_value(v_line, v_curve) and same_value(v_curve, v_pair)
    return DegenerationReport(ok, (p, qq), {"phi_tilde": v_line, "phi": v_curve, "phi2": v_pair})
