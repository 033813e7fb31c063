"""Command-line entry point: render one figure from experiment CSVs."""

import argparse
import sys

from qaus_figures.render import FIGURES, SchemaError, render_figure

EXIT_OK = 0
EXIT_SCHEMA = 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qaus-figures",
        description="Render a figure from experiment CSV artifacts. Guide "
        "constants are read from the plot_params.json sidecar next to the "
        "inputs; writes a PDF, a PNG, and a JSON dump of the plotted arrays.",
    )
    parser.add_argument("--figure", required=True, choices=sorted(FIGURES),
                        help="which figure to render")
    parser.add_argument("--csv", required=True, nargs="+", metavar="PATH",
                        help="input CSV file(s) for the figure")
    parser.add_argument("--out", required=True, metavar="DIR",
                        help="output directory")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        written = render_figure(args.figure, args.csv, args.out)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    for kind in ("vector", "raster", "data"):
        print(f"{kind}: {written[kind]}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
