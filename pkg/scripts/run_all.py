"""Run every CLI command into out/<command>/ and print one exit code per line."""

import argparse
import sys

from kitecc import cli

COMMANDS = [
    ["certify-max"],
    ["certify-max", "--domain", "full"],
    ["exclusion"],
    ["root-b1"],
    ["signs"],
    ["trace", "--samples", "200"],
    ["extrema"],
    ["solve", "--m", "0.4"],
    ["solve", "--m", "1.5"],
    ["solve", "--m", "1", "--full-planar"],
    ["classify", "--at", "fold"],
    ["classify", "--at", "pitchfork", "--cross-check"],
    ["table1"],
]


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--out", default="out")
    p.add_argument("--workers", type=int, default=1)
    args = p.parse_args()
    worst = 0
    for argv in COMMANDS:
        name = "_".join(a.lstrip("-") for a in argv)
        code = cli.main(["--out", f"{args.out}/{name}", "--workers", str(args.workers), *argv])
        print(f"{code}  {' '.join(argv)}", flush=True)
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    sys.exit(main())
