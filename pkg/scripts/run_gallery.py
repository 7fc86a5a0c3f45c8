"""Run every registered scenario and print a pass/fail table."""

from __future__ import annotations

import argparse
import json
import sys

from lorentz_lab import gallery
from lorentz_lab.config import RunConfig


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--tag", help="only scenarios carrying this tag")
    parser.add_argument("--json", action="store_true", help="print the full report as JSON")
    args = parser.parse_args(argv)
    summary = gallery.run_all(args.tag, RunConfig())
    if args.json:
        print(json.dumps(summary.to_dict(), indent=2, sort_keys=True, default=str))
    else:
        print(summary.table())
    return 0 if summary.passed else 1


if __name__ == "__main__":
    sys.exit(main())
