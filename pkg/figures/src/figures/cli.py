"""`figures <kind> --in <csv> --out <img>`: regenerate experiment figures.

Exit codes: 0 success, 1 usage error, 2 data/schema error.
"""

from __future__ import annotations

import argparse
import sys

from .render import KINDS, FigureSpec, SchemaError, render


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def build_parser() -> _Parser:
    parser = _Parser(prog="figures", description=__doc__)
    parser.add_argument("kind", choices=KINDS)
    parser.add_argument("--in", dest="input_csv", required=True, help="input CSV path")
    parser.add_argument("--out", dest="output_image", required=True, help="output image path")
    parser.add_argument("--title", default="")
    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        spec = FigureSpec(
            kind=args.kind,
            input_csv=args.input_csv,
            output_image=args.output_image,
            title=args.title,
        )
        render(spec)
        return 0
    except _UsageError as exc:
        print(f"figures: usage error: {exc}", file=sys.stderr)
        return 1
    except (SchemaError, OSError) as exc:
        print(f"figures: data error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
