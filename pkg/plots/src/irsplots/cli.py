"""CLI: irsplots render --csv <path> --figure <id> --out <path>."""

from __future__ import annotations

import argparse
import sys

from .render import FIGURES, FigureSpec, SchemaMismatch, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="irsplots", description="render experiment figures")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render", help="render one figure from a harness CSV")
    p.add_argument("--csv", required=True, help="harness CSV file")
    p.add_argument("--figure", required=True, choices=FIGURES, help="figure identifier")
    p.add_argument("--out", required=True, help="output image path (png or svg)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        render(FigureSpec(input_csv=args.csv, figure=args.figure, output_image=args.out))
    except (SchemaMismatch, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
