#!/usr/bin/env python
"""Tabulate the pair energy kernel slack over its floor for several decay
exponents and report the smallest nearest-neighbour coupling that keeps
the floor valid over the scanned range."""

import argparse

from trigas import walpha_scan


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--alphas", default="0.0,0.125,0.25,0.375,0.5")
    ap.add_argument("--j1", type=float, default=10.0)
    ap.add_argument("--l-max", type=int, default=100_000)
    args = ap.parse_args()

    print(f"j1={args.j1} l_max={args.l_max}")
    print(f"{'alpha':>7} {'min slack':>12} {'at L':>8} {'violations':>11} {'minimal j1':>11}")
    for tok in args.alphas.split(","):
        alpha = float(tok)
        rep = walpha_scan(alpha, args.j1, args.l_max)
        print(
            f"{alpha:>7.3f} {rep.min_slack:>12.4f} {rep.argmin_length:>8} "
            f"{rep.violations:>11} {rep.minimal_j1:>11.4f}"
        )


if __name__ == "__main__":
    main()
