"""qdc-figures: render one image per figure-spec file."""
from __future__ import annotations

import argparse
import sys

from .figspec import FigureError, load_spec
from .render import render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="qdc-figures",
        description="Render multi-panel figures from qdcsim sweep CSVs",
    )
    parser.add_argument("specs", nargs="+", help="figure spec files (YAML)")
    args = parser.parse_args(argv)
    status = 0
    for spec_path in args.specs:
        try:
            result = render(load_spec(spec_path))
        except (FigureError, OSError) as exc:
            print(f"error: {spec_path}: {exc}", file=sys.stderr)
            status = 2
            continue
        print(f"{result.output_path} ({result.n_panels} panel(s), "
              f"{result.points} points)")
    return status


if __name__ == "__main__":
    sys.exit(main())
