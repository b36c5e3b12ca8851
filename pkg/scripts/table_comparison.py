"""Recompute the reference position table and print the deviation of every row."""

import argparse

from kitecc import runs


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--tol", type=float, default=1e-8)
    args = p.parse_args()
    out = runs.table1(args.tol)
    print(f"{'row':4} {'method':12} {'deviation':>12}  match")
    for row in out.table:
        print(f"{row['label']:4} {row['method']:12} {row['deviation']:12.3e}  {row['match']}")
    for label, diag in out.report.get("diagnostics", {}).items():
        print(f"{label}: {diag}")
    print("all rows match" if out.ok else "some rows differ (see decisions ledger)")


if __name__ == "__main__":
    main()
