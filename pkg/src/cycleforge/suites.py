"""Verification suites: each runs a group of checks and yields :class:`CheckRecord` objects."""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from typing import Callable, Iterator

from . import fano, hilb2, lagrangian
from .ffenum import to_point
from .fields import SpecializationError
from .poly import TripleRootError, double_root
from .projective import ProjPoint, collinear
from .report import CheckRecord
from .scene import (
    POLE,
    Scene,
    SceneError,
    SymbolicTError,
    assemble_xi,
    certify_smoothness,
    drop_x5,
    finite_scene,
    format_param,
)

# a rational hyperplane missing p0 on which the general-hyperplane construction is run
DEFAULT_GENERAL_H = (1, 2, -1, 3, 1, 1)


@dataclass
class Context:
    scene: Scene
    primes: tuple[int, ...] = (7, 13)
    samples: int = 25
    seed: int = 0

    def finite(self, q: int) -> Scene:
        key = ("finite", q)
        if key not in self.scene.cache:
            self.scene.cache[key] = finite_scene(self.scene, q)
        return self.scene.cache[key]

    def rng(self, *salt) -> random.Random:
        return random.Random(repr((self.seed,) + salt))


def _fmt(fld, v):
    return "pole" if v is POLE else fld.format(v)


def _status(ok: bool) -> str:
    return "pass" if ok else "fail"


class _Skip(Exception):
    pass


def _good_prime(ctx: Context, q: int) -> Scene:
    sc = ctx.finite(q)
    if sc.degenerate:
        raise _Skip(f"bad reduction at q = {q}: " + "; ".join(sc.degenerate))
    return sc


def _numeric(sc: Scene, nonzero: bool = False):
    try:
        return sc.require_t(nonzero)
    except SymbolicTError:
        raise _Skip("needs a numeric t")
    except ValueError:
        raise _Skip("needs t != 0")


def _run(suite: str, name: str, fn: Callable[[], tuple[str, object]]) -> CheckRecord:
    start = time.perf_counter()
    try:
        status, witness = fn()
    except _Skip as exc:
        status, witness = "skipped", {"reason": str(exc)}
    except (SceneError, SpecializationError) as exc:
        status, witness = "skipped", {"reason": str(exc)}
    return CheckRecord(suite, name, status, witness, (time.perf_counter() - start) * 1000)


# ---------------------------------------------------------------------------


def suite_tangency(ctx: Context) -> Iterator[CheckRecord]:
    sc = ctx.scene
    fld = sc.field

    def restriction(i):
        def run():
            ok = sc.restrict_F(i) == sc.G(i)
            return _status(ok), {"F|R": sc.restrict_F(i).to_text(), "G": sc.G(i).to_text()}
        return run

    def root(i):
        def run():
            cv = sc.curves[i]
            try:
                d = double_root(cv.branch_form(), fld)
            except TripleRootError:
                return "fail", {"reason": "triple root"}
            ok = d is not None and ProjPoint(list(d.root), fld) == ProjPoint([cv.a, fld.one], fld)
            return _status(ok), {"double_root": None if d is None else format_param(d.root, fld)}
        return run

    def x3cube():
        c = sc.F.coefficient((0, 0, 0, 3))
        return _status(bool(c)), {"x3^3 coefficient": fld.format(c)}

    def avoid():
        v = sc.F.eval([fld.zero, fld.zero, fld.zero, fld.one])
        return _status(bool(v)), {"F(0,0,0,1)": fld.format(v)}

    yield _run("tangency", "F|R1 = G1", restriction(1))
    yield _run("tangency", "F|R2 = G2", restriction(2))
    yield _run("tangency", "double root of G1", root(1))
    yield _run("tangency", "double root of G2", root(2))
    yield _run("tangency", "x3^3 coefficient nonzero", x3cube)
    yield _run("tangency", "B avoids [0,0,0,1]", avoid)
    for q in ctx.primes:
        def cert(q=q):
            f = _good_prime(ctx, q)
            t = f.t
            check_y = t is not None and bool(t)
            rep = certify_smoothness(f.F, t, q, check_y=check_y)
            w = rep.to_jsonable()
            if not check_y:
                # Y_0 is singular at p0 by construction; only B and S are certified
                w["Y"] = "not checked (t = 0 or symbolic)"
            return _status(rep.passed), w
        yield _run("tangency", f"smoothness certificate q={q}", cert)


def suite_cones(ctx: Context) -> Iterator[CheckRecord]:
    sc = ctx.scene
    for i in (1, 2):
        def run(i=i):
            f = fano.cone_family_restriction(sc, i)
            return _status(f.is_zero()), {"variables": list(f.names), "terms": len(f.terms)}
        yield _run("cones", f"Y vanishes on the cone over C{i}", run)


def suite_lines_p0(ctx: Context) -> Iterator[CheckRecord]:
    sc = ctx.scene

    def symbolic():
        try:
            system = fano.lines_through_p0_symbolic(sc)
        except SceneError as exc:
            return "fail", {"reason": str(exc)}
        return "pass", {"conditions": [f.to_text() for f in system.polys]}

    yield _run("lines-p0", "lambda-collection", symbolic)
    for q in ctx.primes:
        def enum(q=q):
            f = ctx.finite(q)
            _numeric(f, nonzero=True)
            found = fano.enumerate_lines_through_p0(f)
            cones = fano.cone_line_set(f)
            c1 = set(fano.curve_points(f, 1))
            c2 = set(fano.curve_points(f, 2))
            expected = len(c1) + len(c2) - len(c1 & c2)
            ok = found == cones and len(found) == expected
            w = {"q": q, "enumerated": len(found), "cone_lines": len(cones), "#C1": len(c1), "#C2": len(c2),
                 "#C1∩C2": len(c1 & c2), "sets_equal": found == cones}
            if f.degenerate:
                w["note"] = "bad reduction: " + "; ".join(f.degenerate)
            return _status(ok), w
        yield _run("lines-p0", f"enumeration equals cone lines q={q}", enum)


def _random_char0(rng: random.Random, fld):
    if fld.is_finite:
        return fld(rng.randrange(fld.q))
    v = fld(rng.randint(-6, 6))
    if hasattr(fld, "zeta") and rng.random() < 0.5:
        v = v + fld(rng.randint(-3, 3)) * fld.zeta
    return v


def suite_residual(ctx: Context) -> Iterator[CheckRecord]:
    sc = ctx.scene
    fld = sc.field
    for i in (1, 2):
        def run(i=i):
            sc.require_curves()
            rng = ctx.rng("residual", i)
            n = ctx.samples
            tangent = max(1, n // 10) if n else 0
            done = tangents = cusp_skips = 0
            failures = []
            while done < n and done + cusp_skips < 20 * (n + 1):
                u1 = _random_char0(rng, fld)
                u2 = u1 if tangents < tangent else _random_char0(rng, fld)
                if u1 == u2 and tangents >= tangent:
                    continue
                try:
                    u3 = fano.third_point(sc, i, (u1, fld.one), (u2, fld.one))
                except fano.CuspLineError:
                    cusp_skips += 1
                    continue
                l1 = fano.cone_line(sc, i, (u1, fld.one))
                if u1 == u2:
                    l2 = l1
                    res = fano.residual_line(sc, l1, l2, fano.tangent_plane(sc, i, (u1, fld.one)))
                    tangents += 1
                else:
                    l2 = fano.cone_line(sc, i, (u2, fld.one))
                    res = fano.residual_line(sc, l1, l2)
                cv = sc.curves[i]
                expect = fano.cone_line(sc, i, u3)
                pts = [cv.nu((u1, fld.one)), cv.nu((u2, fld.one)), cv.nu(u3)]
                ok = res.line == expect.line and (u1 == u2 or collinear(pts))
                if not ok:
                    failures.append({"u1": fld.format(u1), "u2": fld.format(u2), "u3": format_param(u3, fld)})
                done += 1
            status = "fail" if failures else ("pass" if done >= n and n else "inconclusive")
            return status, {"pairs": done, "tangent_cases": tangents, "cusp_lines_skipped": cusp_skips, "failures": failures}
        yield _run("residual", f"residual line = cone line at the third point on C{i}", run)


def _sample_points(sc: Scene) -> dict:
    """Three points of S for the chain checks: p_inf and one more point on each curve."""
    fld = sc.field
    out = {"p_inf": drop_x5(sc.labels[1].p_inf)}
    labels = set(hilb2.label_points_S(sc).values())
    for i in (1, 2):
        for k in range(2, 40):
            p = drop_x5(sc.curves[i].nu((fld(k), fld.one)))
            if p not in labels:
                out[f"point on C{i}"] = p
                break
    return out


def _ledger_record(suite: str, name: str, build: Callable):
    def run():
        chain = build()
        return _status(chain.is_cocycle()), chain.to_jsonable()
    return _run(suite, name, run)


def suite_cocycle(ctx: Context) -> Iterator[CheckRecord]:
    sc = ctx.scene
    fld = sc.field
    yield _ledger_record("cocycle", "xi ledger", lambda: assemble_xi(sc))
    yield _ledger_record("cocycle", "xi[2] ledger", lambda: hilb2.assemble_xi2_induced(sc))
    for label, p in _sample_points(sc).items():
        yield _ledger_record("cocycle", f"xi_p ledger ({label})", lambda p=p: hilb2.assemble_xi_p(sc, p))

    def xi4():
        if sc.t is not None and not sc.t:
            raise _Skip("xi4 needs t != 0")
        chain = fano.assemble_xi4(sc)
        return _status(chain.is_cocycle()), chain.to_jsonable()

    yield _run("cocycle", "xi4 ledger", xi4)

    def normal():
        vals = {i: sc.phi[i](sc.labels[i].u_inf) for i in (1, 2)}
        ok = all(not (v is POLE) and v == fld.one for v in vals.values())
        return _status(ok), {f"phi{i}(p_inf)": _fmt(fld, v) for i, v in vals.items()}

    yield _run("cocycle", "phi1(p_inf) = phi2(p_inf) = 1", normal)


def suite_induced(ctx: Context) -> Iterator[CheckRecord]:
    sc = ctx.scene
    yield _ledger_record("induced", "xi[2] ledger", lambda: hilb2.assemble_xi2_induced(sc))


def suite_xi_p(ctx: Context) -> Iterator[CheckRecord]:
    sc = ctx.scene
    for label, p in _sample_points(sc).items():
        yield _ledger_record("xi-p", f"xi_p ledger ({label})", lambda p=p: hilb2.assemble_xi_p(sc, p))

    def refuse():
        refused = []
        for sign, p in hilb2.label_points_S(sc).items():
            if sign == "inf":
                continue
            try:
                hilb2.assemble_xi_p(sc, p)
            except ValueError:
                refused.append(sign)
        return _status(sorted(refused) == ["+", "-"]), {"refused": sorted(refused)}

    yield _run("xi-p", "p_+ and p_- refused", refuse)


def suite_eckardt(ctx: Context) -> Iterator[CheckRecord]:
    for q in ctx.primes:
        def run(q=q):
            f = _good_prime(ctx, q)
            _numeric(f)
            fld = f.field
            rng = ctx.rng("eckardt", q)
            n = ctx.samples
            if not n:
                return "inconclusive", {"q": q, "points": 0, "reason": "no sample points"}
            pts = []
            # the cusp lines first
            for k in range(min(3, n)):
                cv = f.curves[1 + k % 2]
                lam = fld(rng.randrange(q))
                base = cv.cusp.coords
                pts.append(ProjPoint([c + (lam if j == 5 else fld.zero) for j, c in enumerate(base)], fld))
            while len(pts) < n:
                i = 1 + rng.randrange(2)
                u = fano._random_param(rng, fld, q)
                lam = fld(rng.randrange(q))
                base = f.curves[i].nu_coords(u)
                pts.append(ProjPoint([c + (lam if j == 5 else fld.zero) for j, c in enumerate(base)], fld))
            results = [fano.eckardt_witness(f, p, 64, rng) for p in pts]
            inc = sum(r.status == "inconclusive" for r in results)
            status = "pass" if not inc else "inconclusive"
            return status, {"q": q, "points": len(pts), "inconclusive": inc, "results": [r.to_jsonable() for r in results]}
        yield _run("eckardt", f"non-cone witnesses q={q}", run)


def _bilinear_Q(p: ProjPoint, q: ProjPoint):
    a, b = p.coords, q.coords
    return a[0] * b[3] + a[3] * b[0] - a[1] * b[2] - a[2] * b[1]


def suite_degeneration(ctx: Context) -> Iterator[CheckRecord]:
    for q in ctx.primes:
        for i in (1, 2):
            def run(q=q, i=i):
                f = _good_prime(ctx, q).with_t(0)
                rng = ctx.rng("degeneration", q, i)
                labels = set(hilb2.label_points_S(f).values())
                cpts = [drop_x5(p) for p in fano.curve_points(f, i)]
                cpts = [p for p in cpts if p not in labels]
                spts = [to_point(r, q) for r in hilb2.s_points(f)]
                n = ctx.samples
                done = attempts = 0
                failures, shown = [], []
                while done < n and attempts < 50 * (n + 1):
                    attempts += 1
                    p = cpts[rng.randrange(len(cpts))]
                    x = spts[rng.randrange(len(spts))]
                    # a pair with B(p, x) = 0 gives a residual line through p0
                    if x == p or hilb2.on_curve_S(f, x, i) or not _bilinear_Q(p, x):
                        continue
                    line = hilb2.forward_line(f, p, x)
                    rep = hilb2.degeneration_check(f, line, i)
                    ok = rep.passed and rep.pair is not None and set(rep.pair) == {p, x}
                    if not ok:
                        failures.append({"pair": [repr(p), repr(x)], **rep.to_jsonable(f.field)})
                    elif len(shown) < 3:
                        shown.append(rep.to_jsonable(f.field))
                    done += 1
                status = "fail" if failures else ("pass" if done >= n and n else "inconclusive")
                return status, {"q": q, "round_trips": done, "failures": failures, "examples": shown}
            yield _run("degeneration", f"round trip in D{i}(0) q={q}", run)


def suite_xi_c(ctx: Context) -> Iterator[CheckRecord]:
    for q in ctx.primes:
        def run(q=q):
            f = _good_prime(ctx, q)
            fibers = lagrangian.choose_fibers(f, 1)
            if not fibers:
                return "inconclusive", {"reason": "no fiber meets C2 in three F_q-points"}
            C = hilb2.EllipticFiber(fibers[0], f.field)
            reps = {i: hilb2.xi_C_identity_check(f, C, i, samples=ctx.samples, seed=ctx.seed) for i in (1, 2)}
            ok = all(r.passed for r in reps.values())
            w = {"q": q, "fiber": format_param(C.u, f.field)}
            w.update({f"C{i}": r.to_jsonable() for i, r in reps.items()})
            return _status(ok), w
        yield _run("xi-C", f"intersection identity q={q}", run)


def suite_lagrangian_elliptic(ctx: Context) -> Iterator[CheckRecord]:
    for q in ctx.primes:
        def run(q=q):
            f = _good_prime(ctx, q)
            fibers = lagrangian.choose_fibers(f, 2)
            if len(fibers) < 2:
                return "inconclusive", {"reason": "fewer than two fibers meet C2 rationally"}
            out = lagrangian.elliptic_restriction_check(f, fibers[0], fibers[1], samples=ctx.samples, seed=ctx.seed)
            return out.status, {"q": q, "fibers": [format_param(u, f.field) for u in fibers], **out.details}
        yield _run("lagrangian-elliptic", f"constancy on F1 x F2 q={q}", run)


def suite_lagrangian_h0(ctx: Context) -> Iterator[CheckRecord]:
    for q in ctx.primes:
        def run(q=q):
            f = _good_prime(ctx, q)
            _numeric(f)
            h = lagrangian.find_split_hyperplane(f, seed=ctx.seed)
            out = lagrangian.hyperplane_through_p0_check(f, h, samples=ctx.samples, seed=ctx.seed)
            return out.status, {"q": q, **out.details}
        yield _run("lagrangian-h0", f"three-line splitting and constancy q={q}", run)


def suite_lagrangian_general(ctx: Context) -> Iterator[CheckRecord]:
    sc = ctx.scene

    def structure():
        sc.require_curves()
        setup = lagrangian.general_hyperplane_setup(sc, DEFAULT_GENERAL_H)
        return _status(setup.passed), {"H": list(DEFAULT_GENERAL_H), "checks": setup.checks,
                                       "surface_terms": len(setup.surface.terms)}

    yield _run("lagrangian-general", "structure over the scene field", structure)
    for q in ctx.primes:
        def run(q=q):
            f = _good_prime(ctx, q)
            _numeric(f)
            setup = lagrangian.general_hyperplane_setup(f, DEFAULT_GENERAL_H)
            if not setup.passed:
                setup = lagrangian.general_hyperplane_setup(f, lagrangian.find_general_hyperplane(f, ctx.seed))
            out = lagrangian.pullback_constancy_check(f, setup, samples=ctx.samples, seed=ctx.seed)
            counts = lagrangian.fiber_counts(f, setup, points=5, seed=ctx.seed)
            w = {"q": q, "H": [int(v) for v in setup.h], "checks": setup.checks, **out.details, "fiber_counts": counts}
            status = out.status if setup.passed else "fail"
            return status, w
        yield _run("lagrangian-general", f"dual-path agreement q={q}", run)


def suite_xi2(ctx: Context) -> Iterator[CheckRecord]:
    for q in ctx.primes:
        def run(q=q):
            f = _good_prime(ctx, q)
            _numeric(f, nonzero=True)
            chain, samples = fano.assemble_xi2(f, samples=ctx.samples, seed=ctx.seed)
            bad = [s.to_jsonable(f.field) for s in samples if not s.consistent]
            per = {i: sum(s.component == i for s in samples) for i in (1, 2)}
            if not samples:
                status = "inconclusive"
            else:
                status = "pass" if chain.is_cocycle() and not bad and min(per.values()) >= ctx.samples else "fail"
            return status, {"q": q, "ledger": chain.to_jsonable()["ledger"], "samples_per_component": per,
                            "zeros": sum(s.value is not POLE and not s.value for s in samples),
                            "poles": sum(s.value is POLE for s in samples), "failures": bad,
                            "conic_fiber_counts": {i: fano.conic_fiber_counts(f, i, 5, ctx.seed) for i in (1, 2)}}
        yield _run("xi2", f"zero/pole structure q={q}", run)


SUITES: dict[str, Callable[[Context], Iterator[CheckRecord]]] = {
    "tangency": suite_tangency,
    "cones": suite_cones,
    "lines-p0": suite_lines_p0,
    "residual": suite_residual,
    "cocycle": suite_cocycle,
    "eckardt": suite_eckardt,
    "degeneration": suite_degeneration,
    "induced": suite_induced,
    "xi-p": suite_xi_p,
    "xi-C": suite_xi_c,
    "xi2": suite_xi2,
    "lagrangian-elliptic": suite_lagrangian_elliptic,
    "lagrangian-h0": suite_lagrangian_h0,
    "lagrangian-general": suite_lagrangian_general,
}


def run_suite(name: str, ctx: Context) -> list[CheckRecord]:
    if name == "all":
        return [r for s in SUITES.values() for r in s(ctx)]
    if name not in SUITES:
        raise KeyError(name)
    return list(SUITES[name](ctx))
