#!/usr/bin/env python3
"""Time the selector on synthetic flow graphs of growing size."""
import argparse
import sys

from typepycker import bench


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+",
                    default=[10**4, 2 * 10**4, 10**5, 2 * 10**5, 10**6, 2 * 10**6])
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--dirty", type=float, default=0.3, help="fraction of dirty source vertices")
    args = ap.parse_args(argv)

    times = {}
    print(f"{'vertices':>10} {'edges':>10} {'seconds':>9} {'ratio':>6}")
    prev = None
    for n in args.sizes:
        g = bench.scaling_graph(n, seed=n, dirty=args.dirty)
        edges = len(g.edges)
        times[n] = bench.time_select(g, repeats=args.repeats)
        ratio = f"{times[n] / times[prev]:6.2f}" if prev else ""
        print(f"{n:>10} {edges:>10} {times[n]:9.4f} {ratio}")
        prev = n
        del g
    return 0


if __name__ == "__main__":
    sys.exit(main())
