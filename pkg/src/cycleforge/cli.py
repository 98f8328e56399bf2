"""Command-line harness: ``cycleforge scene|verify|count``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .fano import curve_points, enumerate_lines_through_p0, y_lines
from .fields import is_prime
from .hilb2 import s_points
from .report import VerificationReport
from .scene import (
    SceneError,
    build_scene,
    canonical_scene,
    dumps_scene,
    finite_scene,
    generated_params,
    loads_scene,
)
from .suites import SUITES, Context, run_suite

EXIT_USAGE = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _parse_t(text: str | None):
    if text is None:
        return "keep"
    if text == "symbolic":
        return None
    return text


def _load(source: str, t="keep"):
    if source == "canonical":
        scene = canonical_scene()
    else:
        path = Path(source)
        if not path.exists():
            raise UsageError(f"scene file not found: {source}")
        scene = loads_scene(path.read_text())
    if t != "keep":
        value = None if t is None else scene.field.parse(t)
        scene = scene.with_t(value)
    return scene


def _primes(text: str) -> tuple[int, ...]:
    try:
        out = tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise UsageError(f"bad prime list: {text!r}")
    if not out:
        raise UsageError("empty prime list")
    for q in out:
        if not is_prime(q) or q % 3 != 1:
            raise UsageError(f"q = {q} must be a prime with q = 1 mod 3")
    return out


def cmd_scene(args) -> int:
    if args.action == "canonical":
        scene = canonical_scene()
    elif args.action == "new":
        scene = build_scene(generated_params(args.seed))
    else:
        if not args.file:
            raise UsageError("scene show needs a FILE")
        scene = _load(args.file)
    text = dumps_scene(scene)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    print(f"scene {scene!r} fingerprint {scene.fingerprint()}", file=sys.stderr)
    return 0


def cmd_verify(args) -> int:
    if args.suite != "all" and args.suite not in SUITES:
        raise UsageError(f"unknown suite {args.suite!r}; choose from {', '.join(list(SUITES) + ['all'])}")
    if args.samples < 0:
        raise UsageError("--samples must be nonnegative")
    scene = _load(args.scene, _parse_t(args.t))
    primes = _primes(args.q) if args.q else (7, 13)
    if scene.field.is_finite:
        primes = (scene.field.q,)
    ctx = Context(scene, primes, args.samples, args.seed)
    report = VerificationReport(
        args.suite,
        scene.fingerprint(),
        __version__,
        {"primes": list(primes), "samples": args.samples, "seed": args.seed,
         "t": "symbolic" if scene.t is None else scene.field.format(scene.t)},
        run_suite(args.suite, ctx),
    )
    sys.stdout.write(report.dumps(timings=args.timings))
    print(report.summary(), file=sys.stderr)
    return report.exit_code(args.allow_inconclusive)


def cmd_count(args) -> int:
    scene = _load(args.scene)
    (q,) = _primes(str(args.q))
    f = finite_scene(scene, q)
    c1, c2 = set(curve_points(f, 1)), set(curve_points(f, 2))
    out = {"q": q, "#C1": len(c1), "#C2": len(c2), "#C1∩C2": len(c1 & c2), "#S": int(len(s_points(f)))}
    if f.t is not None and f.t:
        out["#lines-through-p0"] = len(enumerate_lines_through_p0(f))
    else:
        out["#lines-through-p0"] = None
    if f.t is not None:
        pts = y_lines(f).points
        # W is the branch locus Y ∩ {x4 = 0}
        out["#W"] = int((pts[:, 4] == 0).sum())
    else:
        out["#W"] = None
    if f.degenerate:
        out["note"] = "bad reduction: " + "; ".join(f.degenerate)
    sys.stdout.write(json.dumps(out, indent=2, ensure_ascii=False) + "\n")
    print(" ".join(f"{k}={v}" for k, v in out.items() if k != "note"), file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cycleforge", description="Construct the scene and run the verification suites.")
    p.add_argument("--version", action="version", version=f"cycleforge {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("scene", help="write or inspect a scene file")
    s.add_argument("action", choices=["new", "canonical", "show"])
    s.add_argument("file", nargs="?", help="scene file for 'show'")
    s.add_argument("--seed", type=int, default=0, help="seed for 'new'")
    s.add_argument("--out", help="write the scene here instead of stdout")
    s.set_defaults(func=cmd_scene)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("--scene", default="canonical", help="scene file or 'canonical'")
    v.add_argument("--suite", required=True, help="suite name or 'all'")
    v.add_argument("--q", help="comma-separated primes (default 7,13)")
    v.add_argument("--samples", type=int, default=25)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--t", help="override t with a value or 'symbolic'")
    v.add_argument("--timings", action="store_true", help="include elapsed_ms per record")
    v.add_argument("--allow-inconclusive", action="store_true", help="exit 0 when nothing failed")
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("count", help="point and line census over F_q")
    c.add_argument("--scene", default="canonical")
    c.add_argument("--q", type=int, required=True)
    c.set_defaults(func=cmd_count)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"cycleforge: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SceneError as exc:
        print(f"cycleforge: scene error {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, json.JSONDecodeError) as exc:
        print(f"cycleforge: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
