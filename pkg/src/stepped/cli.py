"""Command-line front end: ``stepped <command> ...``.

Exit codes: 0 on success, 2 on bad input, 3 when recognition is Inconclusive.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import io
from .brun import brun_expansion, brun_step, format_vector, parse_vector
from .dual import DualMap, apply_dual
from .patch import PlaneSpec, generate_plane_patch, to_fraction
from .recognition import Verdict, recognize_planarity, surface_brun_expansion
from .render import RenderConfig, render_svg
from .surface import on_layer, pseudo_flip_decomposition, random_valid_flips, surface_check_d3
from .words import brun_substitution, brun_substitution_inverse, parse_morphism

EXIT_OK, EXIT_INPUT, EXIT_INCONCLUSIVE = 0, 2, 3


class InputError(Exception):
    pass


def _brun_triple(text: str) -> tuple[int, int, int]:
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected a,i,j")
    try:
        return tuple(int(p) for p in parts)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _plane(args) -> PlaneSpec:
    return PlaneSpec(parse_vector(args.alpha), to_fraction(args.rho))


def cmd_generate(args) -> int:
    plane = _plane(args)
    radius = to_fraction(args.radius)
    patch = generate_plane_patch(plane, radius)
    if args.kind == "surface":
        exclude = on_layer(plane) if args.avoid_layer else None
        patch, _ = random_valid_flips(patch, args.flips, args.seed, exclude=exclude)
        report = surface_check_d3(patch)
        if report.status.value == "invalid":
            raise InputError(f"generated patch failed the surface check: {report.first_violation}")
    _emit(io.dumps(io.patch_to_dict(patch)), args.out)
    return EXIT_OK


def _dual_from_args(args, d: int) -> DualMap:
    if args.brun and args.morphism:
        raise InputError("give either --brun or --morphism, not both")
    if args.brun:
        a, i, j = args.brun
        make = brun_substitution_inverse if args.inverse else brun_substitution
        return DualMap(make(a, i, j, d))
    if args.inverse:
        raise InputError("--inverse is only meaningful with --brun")
    if not args.morphism:
        raise InputError("one of --brun or --morphism is required")
    sigma = parse_morphism(args.morphism, d)
    return DualMap(sigma)


def cmd_apply(args) -> int:
    patch = io.read_patch(args.input)
    dual = _dual_from_args(args, patch.d)
    _emit(io.dumps(io.patch_to_dict(apply_dual(dual, patch))), args.out)
    return EXIT_OK


def cmd_expand(args) -> int:
    if args.kind == "vector":
        if not args.alpha:
            raise InputError("expand vector needs --alpha")
        alpha = parse_vector(args.alpha)
        exp = brun_expansion(alpha, args.max_steps)
        lines = []
        current = alpha
        for n, step in enumerate(exp.steps, start=1):
            _, current = brun_step(current)
            lines.append(f"step {n}: a={step.a},i={step.i},j={step.j}  T={format_vector(current)}")
        lines.append(f"termination: {exp.termination.value} (steps {len(exp)})")
        _emit("\n".join(lines) + "\n", args.out)
        return EXIT_OK
    if not args.input:
        raise InputError("expand patch needs --in")
    patch = io.read_patch(args.input)
    exp, residual = surface_brun_expansion(patch, args.max_steps)
    doc = {"expansion": io.expansion_to_list(exp), "termination": exp.termination.value,
           "residual": io.patch_to_dict(residual)}
    _emit(io.dumps(doc), args.out)
    return EXIT_OK


def cmd_recognize(args) -> int:
    patch = io.read_patch(args.input)
    report = recognize_planarity(patch, args.max_steps)
    ref = None
    if args.residual_out:
        io.write_patch(report.residual, args.residual_out)
        ref = str(args.residual_out)
    _emit(io.dumps(io.report_to_dict(report, ref)), args.out)
    return EXIT_INCONCLUSIVE if report.verdict is Verdict.INCONCLUSIVE else EXIT_OK


def cmd_render(args) -> int:
    patch = io.read_patch(args.input)
    cfg = RenderConfig(scale=float(args.scale))
    _emit(render_svg(patch, cfg, show_defects=args.show_defects), args.svg_out)
    return EXIT_OK


def cmd_decompose(args) -> int:
    patch = io.read_patch(args.input)
    flips = pseudo_flip_decomposition(patch, _plane(args), args.n_max)
    doc = {"flips": [{"x": list(f.x), "sign": f.sign} for f in flips]}
    _emit(io.dumps(doc), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stepped", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a plane or random surface patch")
    gen.add_argument("kind", choices=["plane", "surface"])
    gen.add_argument("--alpha", required=True, help="normal vector, e.g. 3,2,1")
    gen.add_argument("--rho", default="0")
    gen.add_argument("--radius", required=True)
    gen.add_argument("--flips", type=int, default=10, help="number of random flips (surface)")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--avoid-layer", action="store_true",
                     help="never flip at points of the layer <x|alpha> = rho")
    gen.add_argument("--out")
    gen.set_defaults(func=cmd_generate)

    app = sub.add_parser("apply", help="apply a dual map to a patch")
    app.add_argument("--in", dest="input", required=True)
    app.add_argument("--morphism", help="e.g. 1:12,2:13,3:1 (apostrophe = inverse letter)")
    app.add_argument("--brun", type=_brun_triple, help="a,i,j")
    app.add_argument("--inverse", action="store_true", help="use the inverse Brun substitution")
    app.add_argument("--out")
    app.set_defaults(func=cmd_apply)

    exp = sub.add_parser("expand", help="Brun expansion of a vector or a patch")
    exp.add_argument("kind", choices=["vector", "patch"])
    exp.add_argument("--alpha")
    exp.add_argument("--in", dest="input")
    exp.add_argument("--max-steps", type=int, default=30)
    exp.add_argument("--out")
    exp.set_defaults(func=cmd_expand)

    rec = sub.add_parser("recognize", help="planarity report for a patch")
    rec.add_argument("--in", dest="input", required=True)
    rec.add_argument("--max-steps", type=int, default=30)
    rec.add_argument("--residual-out", help="write the residual patch here instead of inline")
    rec.add_argument("--out")
    rec.set_defaults(func=cmd_recognize)

    ren = sub.add_parser("render", help="SVG of a d=3 patch")
    ren.add_argument("--in", dest="input", required=True)
    ren.add_argument("--svg-out")
    ren.add_argument("--scale", default="20")
    ren.add_argument("--show-defects", action="store_true", help="draw weight -1 faces dashed")
    ren.set_defaults(func=cmd_render)

    dec = sub.add_parser("decompose", help="signed flips from a plane to a surface patch")
    dec.add_argument("--in", dest="input", required=True)
    dec.add_argument("--alpha", required=True)
    dec.add_argument("--rho", default="0")
    dec.add_argument("--n-max", type=int, required=True)
    dec.add_argument("--out")
    dec.set_defaults(func=cmd_decompose)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        return args.func(args)
    except (InputError, ValueError, ZeroDivisionError, LookupError, OSError) as exc:
        print(f"stepped: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
