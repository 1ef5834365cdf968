"""Command line for the figure scripts.

    hjbfigs field --field P_a.txt --mask mask.txt --level 0 --out fig.png
    hjbfigs field --spec figure.json
    hjbfigs front --front front_000.txt --out front.png

Exits nonzero when an input is missing or malformed.
"""

from __future__ import annotations

import argparse
import sys

from .formats import InputError
from .render import FigureSpec, LevelOverlay, TrajectoryOverlay, render_field_figure, render_front_figure


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hjbfigs", description="Render exported planning fields")
    sub = ap.add_subparsers(dest="command", required=True)

    f = sub.add_parser("field", help="filled contour map with overlays")
    f.add_argument("--spec", help="JSON figure spec (overrides other flags)")
    f.add_argument("--field", help="field file to render")
    f.add_argument("--mask", help="mask field (values > 0.5 inside)")
    f.add_argument("--level", type=float, action="append", default=[],
                   help="dashed level-set overlay on the base field (repeatable)")
    f.add_argument("--level-field", action="append", default=[], metavar="PATH:LEVEL",
                   help="level-set overlay from another field file")
    f.add_argument("--traj", action="append", default=[], help="trajectory file overlay")
    f.add_argument("--title", default="")
    f.add_argument("--cmap", default="viridis")
    f.add_argument("--out", help="output image path")

    fr = sub.add_parser("front", help="payoff sweep and Pareto front panels")
    fr.add_argument("--front", required=True, help="front file (lambda J1 J2 payoff rows)")
    fr.add_argument("--title", default="")
    fr.add_argument("--out", required=True)
    return ap


def _spec_from_flags(args) -> FigureSpec:
    if args.spec:
        return FigureSpec.from_json(args.spec)
    if not args.field or not args.out:
        raise InputError("field figures need --field and --out (or --spec)")
    levels = [LevelOverlay(level=lv) for lv in args.level]
    for item in args.level_field:
        path, _, lv = item.rpartition(":")
        if not path:
            raise InputError(f"--level-field expects PATH:LEVEL, got {item!r}")
        levels.append(LevelOverlay(level=float(lv), source=path, color="red"))
    trajs = [TrajectoryOverlay(source=t) for t in args.traj]
    return FigureSpec(field=args.field, output=args.out, mask=args.mask,
                      title=args.title, cmap=args.cmap,
                      levels=tuple(levels), trajectories=tuple(trajs))


def run_cli(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        if args.command == "field":
            out = render_field_figure(_spec_from_flags(args))
        else:
            out = render_front_figure(args.front, args.out, args.title)
        print(out)
        return 0
    except (InputError, OSError, ValueError) as exc:
        print(f"hjbfigs: error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run_cli())
