"""Batch figure regeneration: hetero-rd-plot --figure <id> --in <dir> --out <file>."""

from __future__ import annotations

import argparse
import sys

from .errors import MissingSeries, SchemaError
from .figures import FIGURE_IDS, FigureRecipe, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="hetero-rd-plot",
        description="Regenerate experiment figures from artifact files.",
    )
    parser.add_argument("--figure", required=True, choices=FIGURE_IDS)
    parser.add_argument("--in", dest="input_dir", required=True,
                        help="artifact directory written by hetero-rd")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--zoom-center", type=float, default=1.0)
    parser.add_argument("--zoom-halfwidth", type=float, default=0.05)
    args = parser.parse_args(argv)

    recipe = FigureRecipe(figure=args.figure, input_dir=args.input_dir,
                          output=args.out, zoom_center=args.zoom_center,
                          zoom_halfwidth=args.zoom_halfwidth)
    try:
        out = render(recipe)
    except (SchemaError, MissingSeries) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
