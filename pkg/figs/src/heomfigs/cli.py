"""Command-line entry point: one figure per invocation.

    heomfigs --spec population_vs_bath --data-dir runs/ --out-dir figures/
    heomfigs --spec my_custom_figure.toml
    heomfigs --list
"""

from __future__ import annotations

import argparse
import sys

from .csvio import FigError
from .figspec import list_shipped_specs, load_spec, shipped_spec_path
from .render import render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="heomfigs",
        description="Render simulator CSV output as PNG and SVG figures.",
    )
    parser.add_argument(
        "--spec",
        help="figure spec: a TOML file path or the name of a shipped spec",
    )
    parser.add_argument(
        "--data-dir",
        default=".",
        help="directory holding the input CSV files (default: current)",
    )
    parser.add_argument(
        "--out-dir",
        default=".",
        help="directory for the rendered images (default: current)",
    )
    parser.add_argument(
        "--list",
        action="store_true",
        help="list the shipped figure specs and exit",
    )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.list:
        for name in list_shipped_specs():
            print(name)
        return 0
    if not args.spec:
        print("error: --spec is required (or use --list)", file=sys.stderr)
        return 2
    try:
        path = args.spec
        if not path.endswith(".toml"):
            path = shipped_spec_path(path)
        spec = load_spec(path)
        written = render(spec, data_dir=args.data_dir, out_dir=args.out_dir)
    except FigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for item in written:
        print(item)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
