#!/usr/bin/env python
"""Count anchored single contours by total mass and compare the weighted
counts with the closed-form ceiling.  Masses above 5 take minutes."""

import argparse
import time

from trigas import enumerate_G


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--m-max", type=int, default=5)
    ap.add_argument("--b", type=float, default=8.0)
    ap.add_argument("--alpha", type=float, default=0.0)
    ap.add_argument("--c", type=float, default=15.0)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()

    print(f"b={args.b} alpha={args.alpha} c={args.c}")
    print(f"{'m':>3} {'configs':>12} {'G':>13} {'G white':>13} {'bound':>13} {'ok':>4} {'sec':>7}")
    for m in range(1, args.m_max + 1):
        t0 = time.perf_counter()
        rep = enumerate_G(m, args.c, args.b, args.alpha, threads=args.threads)
        dt = time.perf_counter() - t0
        print(
            f"{m:>3} {rep.configurations:>12} {rep.g_total:>13.6e} "
            f"{rep.g_white:>13.6e} {rep.bound:>13.6e} {str(rep.ok):>4} {dt:>7.2f}"
        )


if __name__ == "__main__":
    main()
