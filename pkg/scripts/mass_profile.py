"""Mass ratio along the shape curve: samples, endpoint decay and the certified maximum."""

import argparse
import csv

from kitecc.continuation import fold_point, solve_b_hat, trace_curve
from kitecc.interval import Interval


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--samples", type=int, default=400)
    p.add_argument("--csv", default="mass_profile.csv")
    args = p.parse_args()

    pts = trace_curve(1.001, 1.999, args.samples)
    with open(args.csv, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["a_lo", "a_hi", "b_lo", "b_hi", "m_lo", "m_hi"])
        for q in pts:
            w.writerow([repr(v) for v in (q.a.lo, q.a.hi, q.b.lo, q.b.hi, q.m.lo, q.m.hi)])
    print(f"wrote {len(pts)} certified samples to {args.csv}")

    fp = fold_point()
    print(f"maximum: a in [{fp.point[0].lo!r}, {fp.point[0].hi!r}]  m in [{fp.m.lo!r}, {fp.m.hi!r}]")
    print(" k   m(1+10^-k)            m(2-10^-k)")
    for k in range(3, 9):
        left = solve_b_hat(Interval(1.0 + 10.0 ** -k)).m
        right = solve_b_hat(Interval(2.0 - 10.0 ** -k)).m
        print(f"{k:2d}   [{left.lo:.6e}, {left.hi:.6e}]   [{right.lo:.6e}, {right.hi:.6e}]")


if __name__ == "__main__":
    main()
