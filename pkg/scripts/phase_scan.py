#!/usr/bin/env python
"""Sweep beta at a fixed window and compare the sampled contour event
frequency with the certified series bound.

Example:
    python scripts/phase_scan.py --window 256 --sweeps 2048 \
        --betas 0.25,0.5,1,2,4 --alpha 0.5 --j1 10 --zeta 2
"""

import argparse

from trigas import ModelParams, SamplerConfig, contour_event_estimate, peierls_series_bound


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--window", type=int, default=256)
    ap.add_argument("--sweeps", type=int, default=2048)
    ap.add_argument("--burn-in", type=int, default=512)
    ap.add_argument("--betas", default="0.25,0.5,1.0,2.0,4.0")
    ap.add_argument("--alpha", type=float, default=0.5)
    ap.add_argument("--j1", type=float, default=10.0)
    ap.add_argument("--zeta", type=float, default=2.0)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()

    params = ModelParams(alpha=args.alpha, j1=args.j1)
    print(f"window={args.window} sweeps={args.sweeps} alpha={args.alpha} j1={args.j1}")
    print(f"{'beta':>8} {'P(minus)':>10} {'P(event)':>10} {'stderr':>9} {'series':>12} {'<1/2':>5}")
    for tok in args.betas.split(","):
        beta = float(tok)
        cfg = SamplerConfig(
            window_size=args.window,
            beta=beta,
            params=params,
            sweeps=args.sweeps,
            burn_in=args.burn_in,
            seed=args.seed,
        )
        rep = contour_event_estimate(cfg)
        series = peierls_series_bound(beta, args.zeta, args.alpha)
        bound = f"{series.value + series.remainder:.4e}" if series.converged else "div"
        print(
            f"{beta:>8.3f} {rep.spin_estimate:>10.5f} {rep.event_estimate:>10.5f} "
            f"{rep.event_stderr:>9.5f} {bound:>12} {str(series.below_half):>5}"
        )


if __name__ == "__main__":
    main()
