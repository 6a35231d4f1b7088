#!/usr/bin/env python3
"""Run every bundled preset and collect outputs under one directory."""
from __future__ import annotations

import argparse
import sys

from symform import cli

PRESETS = ("example2_c4", "example3_c6", "maneuver_c6", "cube")


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="out", help="output directory (default: out)")
    parser.add_argument("--verify", action="store_true",
                        help="also run the construction checks per preset")
    args = parser.parse_args(argv)

    worst = 0
    for name in PRESETS:
        code = cli.main(["run", name, "--out", args.out])
        worst = max(worst, code)
        if args.verify:
            worst = max(worst, cli.main(["verify", name]))
    return worst


if __name__ == "__main__":
    sys.exit(main())
