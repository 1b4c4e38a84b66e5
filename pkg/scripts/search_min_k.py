#!/usr/bin/env python3
"""Search the minimal window length that makes a specification realizable.

The window reduction needs a length as input; this iterates candidate
values upward and reports the first realizable one.
"""

import argparse
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from aigsynt.aiger import read_aiger
from aigsynt.game import build_game, is_realizable, solve
from aigsynt.transforms import justice_to_safety


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("aag", type=Path,
                        help="extended-format game with a justice section")
    parser.add_argument("--max-k", type=int, default=32)
    args = parser.parse_args()

    doc = read_aiger(args.aag.read_text())
    for k in range(args.max_k + 1):
        t0 = time.monotonic()
        game = build_game(justice_to_safety(doc, k))
        realizable = is_realizable(game, solve(game))
        print(f"k={k}: {'realizable' if realizable else 'unrealizable'} "
              f"({time.monotonic() - t0:.2f}s)")
        if realizable:
            print(f"minimal realizable window: {k}")
            return 0
    print(f"unrealizable for every k up to {args.max_k}")
    return 1


if __name__ == "__main__":
    sys.exit(main())
