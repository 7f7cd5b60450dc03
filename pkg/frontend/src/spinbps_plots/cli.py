"""Command line wrapper around render_bars."""

from __future__ import annotations

import argparse
import sys

from .plots import PlotSpec, SchemaError, render_bars


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinbps-plot",
        description="Plot grouped bars of per-sampler medians from a benchmark CSV.",
    )
    parser.add_argument("--in", dest="input_csv", required=True, help="benchmark CSV path")
    parser.add_argument("--out", dest="output", required=True, help="image path (.png, .svg, ...)")
    parser.add_argument("--metric", default="mse_total", help="metric column (default mse_total)")
    parser.add_argument(
        "--group-by",
        default="sigma_m,sigma_r",
        help="comma-separated grouping columns (default sigma_m,sigma_r)",
    )
    parser.add_argument("--linear", action="store_true", help="linear metric axis instead of log")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        spec = PlotSpec(
            input_csv=args.input_csv,
            output=args.output,
            group_by=tuple(col.strip() for col in args.group_by.split(",") if col.strip()),
            metric=args.metric,
            log_scale=not args.linear,
        )
        render_bars(spec)
    except (SchemaError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
