"""Wall time and certificate counts of the mass-maximum campaign across grids and worker counts."""

import argparse
import time

from kitecc import runs


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--grids", type=int, nargs="+", default=[10, 25, 50, 100])
    p.add_argument("--workers", type=int, nargs="+", default=[1, 2])
    args = p.parse_args()
    print(f"{'grid':>5} {'workers':>7} {'seconds':>8} {'leaves':>7} {'unknown':>7}  m0")
    for grid in args.grids:
        for workers in args.workers:
            t = time.perf_counter()
            out = runs.certify_max({"initial_grid": grid, "worker_count": workers})
            dt = time.perf_counter() - t
            m0, d0 = out.report["m0"], out.report["D0"]
            print(f"{grid:5d} {workers:7d} {dt:8.2f} {d0['leaves']:7d} {d0['unknown']:7d}  [{m0[0]!r}, {m0[1]!r}]",
                  flush=True)


if __name__ == "__main__":
    main()
