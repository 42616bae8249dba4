"""Command-line interface.

Every command prints one JSON run report on standard output::

    {"command": ..., "args": {...}, "input_digest": ..., "outputs": {...}, "timing": ...}

Everything except ``timing`` is byte-identical across runs with the same
inputs and flags.  Exit codes: 0 ok, 2 usage or parse error, 3 bound
violation, 4 monotonicity violation, 5 degenerate input refused.
"""
import argparse
import hashlib
import json
import sys
import time

from .charging import DegenerateScene, verify_injection
from .engine import BoundViolation, census, check_bound, vertices_bruteforce
from .families import (
    ColorMismatch,
    gen_extremal,
    interval_scene,
    product_scene,
    product_vertex_count,
    rotated_polygon_scene,
)
from .perturb import (
    MonotonicityViolation,
    check_general_position,
    log_text,
    perturb_scene,
    verify_monotonicity,
)
from .scene import ParseError, add_bounding_simplex, export_hrep, read_scene, write_scene

EXIT_USAGE = 2
EXIT_BOUND = 3
EXIT_MONOTONE = 4
EXIT_DEGENERATE = 5


class CommandError(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _read(path):
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise CommandError(EXIT_USAGE, str(exc)) from None
    try:
        return read_scene(data.decode("utf-8")), hashlib.sha256(data).hexdigest()
    except (ParseError, UnicodeDecodeError) as exc:
        raise CommandError(EXIT_USAGE, f"{path}: {exc}") from None


def _write(path, text):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def cmd_gen(args):
    try:
        scene, predicted = gen_extremal(args.d, args.m, args.ell)
    except ValueError as exc:
        raise CommandError(EXIT_USAGE, str(exc)) from None
    text = write_scene(scene)
    _write(args.out, text)
    factors = [rotated_polygon_scene(args.ell, args.m)] * (args.d // 2)
    if args.d % 2:
        factors.append(interval_scene(args.m))
    outputs = {
        "n": str(scene.n),
        "facets": str(predicted.facets),
        "predicted_vertices": str(predicted.vertices),
        "product_law_vertices": str(product_vertex_count(*factors)),
    }
    return None, outputs


def cmd_census(args):
    scene, digest = _read(args.input)
    if args.method == "subset":
        v = len(vertices_bruteforce(scene))
        report = check_bound(v, scene.n, scene.m, scene.dim, strict=False)
        outputs = {
            "d": str(scene.dim),
            "n": str(scene.n),
            "m": str(scene.m),
            "counts": None,
            "vertices": str(v),
            "bound": str(report.bound),
            "bound_ok": report.ok,
            "warnings": [],
        }
    else:
        outputs = census(scene, args.include_delta_boundary, args.threads).to_dict()
    if not outputs["bound_ok"]:
        raise CommandError(EXIT_BOUND, f"vertex bound violated: {outputs['vertices']} > {outputs['bound']}")
    return digest, outputs


def cmd_perturb(args):
    scene, digest = _read(args.input)
    if scene.delta_color is None:
        scene = add_bounding_simplex(scene)
    perturbed, steps = perturb_scene(scene)
    _write(args.out, write_scene(perturbed))
    if args.log:
        _write(args.log, log_text(steps))
    gp = check_general_position(perturbed)
    return digest, {"steps": str(len(steps)), "general_position": gp.ok}


def cmd_verify(args):
    before, d1 = _read(args.before)
    after, d2 = _read(args.after)
    try:
        report = verify_monotonicity(before, after)
    except MonotonicityViolation as exc:
        raise CommandError(EXIT_MONOTONE, str(exc)) from None
    except ValueError as exc:
        raise CommandError(EXIT_USAGE, str(exc)) from None
    return f"{d1}:{d2}", report


def cmd_charge(args):
    scene, digest = _read(args.input)
    try:
        report = verify_injection(scene)
    except DegenerateScene:
        raise CommandError(
            EXIT_DEGENERATE, "input is not in general position; run 'polysub perturb' first"
        ) from None
    if not report.bound_ok:
        raise CommandError(EXIT_BOUND, "vertex bound violated")
    return digest, report.to_dict()


def cmd_product(args):
    a, d1 = _read(args.a)
    b, d2 = _read(args.b)
    try:
        scene = product_scene(a, b)
    except (ColorMismatch, ValueError) as exc:
        raise CommandError(EXIT_USAGE, str(exc)) from None
    _write(args.out, write_scene(scene))
    return f"{d1}:{d2}", {"d": str(scene.dim), "n": str(scene.n), "m": str(scene.m)}


def cmd_export_ine(args):
    scene, digest = _read(args.input)
    try:
        text = export_hrep(scene, args.color)
    except ValueError as exc:
        raise CommandError(EXIT_USAGE, str(exc)) from None
    _write(args.out, text)
    return digest, {"rows": str(len(scene.ids_of_color(args.color)))}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=1, help="worker processes (output does not depend on it)")
    parser = argparse.ArgumentParser(prog="polysub", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", parents=[common], help="write a lower-bound family scene")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("census", parents=[common], help="count faces of the induced subdivision")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--include-delta-boundary", action="store_true")
    p.add_argument("--method", choices=["merge", "subset"], default="merge")
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("perturb", parents=[common], help="perturb into general position")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--log")
    p.set_defaults(func=cmd_perturb)

    p = sub.add_parser("verify", parents=[common], help="check census monotonicity under perturbation")
    p.add_argument("--before", required=True)
    p.add_argument("--after", required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("charge", parents=[common], help="run the charging checks")
    p.add_argument("--in", dest="input", required=True)
    p.set_defaults(func=cmd_charge)

    p = sub.add_parser("product", parents=[common], help="color-by-color product of two scenes")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_product)

    p = sub.add_parser("export-ine", parents=[common], help="export one color as an H-representation")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--color", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export_ine)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    echo = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "command", "threads")}
    start = time.perf_counter()
    try:
        digest, outputs = args.func(args)
    except CommandError as exc:
        print(f"polysub {args.command}: {exc}", file=sys.stderr)
        return exc.code
    except BoundViolation as exc:
        print(f"polysub {args.command}: {exc}", file=sys.stderr)
        return EXIT_BOUND
    report = {
        "command": args.command,
        "args": echo,
        "input_digest": digest,
        "outputs": outputs,
        "timing": f"{time.perf_counter() - start:.3f}",
    }
    print(json.dumps(report, sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
