"""Command line front end.

Subcommands cover the pipeline stages: decompose spins into contours,
encode contours as trees, scan the pair energy kernel, count anchored
contours, check the convexity margin, run the sampler, and sweep the
covering series over beta.

Conventions shared by all subcommands:
  * exit code 0 on success, 2 on bad input, 1 on internal failure;
  * JSON output is sorted and indented, CSV output starts with a single
    '# key=value ...' comment line followed by a header row;
  * --output writes to a file (relative paths land in $TRIGAS_OUTPUT_DIR
    when that is set), otherwise results go to stdout;
  * --config FILE reads key=value lines; explicit flags win over the file.

Outputs are deterministic byte for byte for a fixed command line.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path

from .bounds import convexity_check, enumerate_G, walpha_scan
from .contours import DEFAULT_C, decompose
from .model import ALPHA_PLUS, ModelParams, SpinConfiguration
from .sampler import (
    SamplerConfig,
    beta_threshold,
    contour_event_estimate,
    peierls_series_bound,
)
from .squares import InternalConsistencyError, run_square_process
from .trees import extract_tree, tree_to_record, validate_tree_constraints
from .triangles import (
    Triangle,
    TriangleConfiguration,
    build_triangles,
    w_kernel_batch,
)


def _json_text(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _csv_text(meta: dict, header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    pairs = " ".join(f"{k}={v}" for k, v in meta.items())
    buf.write(f"# {pairs}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _emit(text: str, output: str | None) -> None:
    if output is None or output == "-":
        sys.stdout.write(text)
        return
    path = Path(output)
    base = os.environ.get("TRIGAS_OUTPUT_DIR")
    if base and not path.is_absolute():
        path = Path(base) / path
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _apply_config(
    args: argparse.Namespace, argv: list[str], types: dict
) -> None:
    """Fill argument values from a key=value file for options the user did
    not pass explicitly on the command line.  types maps each option dest
    to its argparse type callable (None for plain strings and flags)."""
    if getattr(args, "config", None) is None:
        return
    explicit = set()
    for tok in argv:
        if tok.startswith("--"):
            explicit.add(tok[2:].split("=", 1)[0].replace("-", "_"))
    text = Path(args.config).read_text()
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{args.config}:{ln}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        dest = key.replace("-", "_")
        if dest in ("config", "func", "command") or dest not in types:
            raise ValueError(f"{args.config}:{ln}: unknown option {key!r}")
        if dest in explicit:
            continue
        conv = types[dest]
        if conv is not None:
            setattr(args, dest, conv(value))
        elif isinstance(getattr(args, dest), bool):
            setattr(args, dest, value.lower() in ("1", "true", "yes", "on"))
        else:
            setattr(args, dest, value)


def _parse_triangles(text: str) -> TriangleConfiguration:
    tris = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        lo, _, hi = chunk.partition(":")
        if not _:
            raise ValueError(f"triangle {chunk!r} is not of the form lo:hi")
        tris.append(Triangle(lo=int(lo), hi=int(hi)))
    if not tris:
        raise ValueError("no triangles given")
    return TriangleConfiguration(tuple(tris))


def _input_triangles(args: argparse.Namespace) -> TriangleConfiguration:
    if args.spins is not None and args.triangles is not None:
        raise ValueError("give either a spin string or --triangles, not both")
    if args.spins is not None:
        sigma = SpinConfiguration.from_string(args.spins, origin=args.origin)
        return build_triangles(sigma)
    if args.triangles is not None:
        return _parse_triangles(args.triangles)
    raise ValueError("give a spin string or --triangles")


def _triangle_list(tris) -> list[list[int]]:
    return [[t.lo, t.hi] for t in tris]


# ---------------------------------------------------------------------------
# Subcommand bodies


def _cmd_decompose(args) -> int:
    tris = _input_triangles(args)
    partition = decompose(tris, c=args.c)
    record = {
        "c": args.c,
        "triangles": _triangle_list(tris.triangles),
        "contours": [
            {
                "triangles": _triangle_list(gamma.triangles),
                "mass": gamma.mass,
                "span": [gamma.x_minus, gamma.x_plus],
            }
            for gamma in partition
        ],
    }
    _emit(_json_text(record), args.output)
    return 0


def _cmd_tree(args) -> int:
    tris = _input_triangles(args)
    partition = decompose(tris, c=args.c)
    entries = []
    for gamma in partition:
        trace = run_square_process(TriangleConfiguration(gamma.triangles), c=args.c)
        tree = extract_tree(trace)
        report = validate_tree_constraints(tree, c=args.c)
        entries.append(
            {
                "tree": tree_to_record(tree),
                "valid": report.ok,
                "violations": list(report.violations),
                "steps": len(trace.steps),
            }
        )
    record = {"c": args.c, "contours": entries}
    _emit(_json_text(record), args.output)
    return 0


def _cmd_wbound(args) -> int:
    report = walpha_scan(args.alpha, args.j1, args.l_max)
    if args.format == "json":
        record = {
            "alpha": report.alpha,
            "j1": report.j1,
            "l_max": report.l_max,
            "min_slack": report.min_slack,
            "argmin_length": report.argmin_length,
            "violations": report.violations,
            "first_violation": report.first_violation,
            "minimal_j1": report.minimal_j1,
        }
        _emit(_json_text(record), args.output)
        return 0
    import numpy as np

    from .model import zeta_alpha

    params = ModelParams(alpha=args.alpha, j1=args.j1)
    w = w_kernel_batch(args.l_max, params)
    lengths = np.arange(1, args.l_max + 1, dtype=np.float64)
    if args.alpha == 0.0:
        floor = 2.0 * np.log(lengths) + 8.0
    else:
        floor = zeta_alpha(args.alpha) * lengths ** args.alpha
    rows = [
        [int(n), repr(float(w[n - 1])), repr(float(floor[n - 1])),
         repr(float(w[n - 1] - floor[n - 1]))]
        for n in range(1, args.l_max + 1)
    ]
    meta = {"alpha": args.alpha, "j1": args.j1, "l_max": args.l_max}
    _emit(_csv_text(meta, ["length", "w", "floor", "slack"], rows), args.output)
    return 0


def _cmd_entropy(args) -> int:
    report = enumerate_G(args.m, args.c, args.b, args.alpha, threads=args.threads)
    record = {
        "m": report.m,
        "alpha": report.alpha,
        "b": report.b,
        "c": report.c,
        "g_total": report.g_total,
        "g_white": report.g_white,
        "g_black": report.g_black,
        "bound": report.bound,
        "configurations": report.configurations,
        "ok": report.ok,
    }
    _emit(_json_text(record), args.output)
    return 0


def _cmd_convexity(args) -> int:
    report = convexity_check(
        args.alpha, args.a, args.b, n_max=args.n_max, x_max=args.x_max
    )
    record = {
        "alpha": report.alpha,
        "a": report.a,
        "b": report.b,
        "n_max": report.n_max,
        "x_max": report.x_max,
        "min_margin": report.min_margin,
        "argmin": list(report.argmin),
        "violations": report.violations,
    }
    _emit(_json_text(record), args.output)
    return 0


def _cmd_sample(args) -> int:
    params = ModelParams(alpha=args.alpha, j1=args.j1)
    cfg = SamplerConfig(
        window_size=args.window,
        beta=args.beta,
        params=params,
        sweeps=args.sweeps,
        burn_in=args.burn_in,
        seed=args.seed,
        chains=args.chains,
    )
    report = contour_event_estimate(cfg, c=args.c)
    record = {
        "window": args.window,
        "beta": args.beta,
        "alpha": args.alpha,
        "j1": args.j1,
        "sweeps": args.sweeps,
        "burn_in": args.burn_in,
        "seed": args.seed,
        "chains": args.chains,
        "c": args.c,
        "spin_estimate": report.spin_estimate,
        "spin_stderr": report.spin_stderr,
        "event_estimate": report.event_estimate,
        "event_stderr": report.event_stderr,
        "inclusion_violations": report.inclusion_violations,
    }
    if args.zeta is not None:
        series = peierls_series_bound(args.beta, args.zeta, args.alpha)
        record["series_value"] = series.value
        record["series_remainder"] = series.remainder
        record["series_converged"] = series.converged
        record["series_below_half"] = series.below_half
    _emit(_json_text(record), args.output)
    return 0


def _cmd_peierls_sweep(args) -> int:
    if args.series_beta is not None:
        report = peierls_series_bound(args.series_beta, args.zeta, args.alpha)
        record = {
            "beta": report.beta,
            "zeta": report.zeta,
            "alpha": report.alpha,
            "kappa": report.kappa,
            "value": report.value,
            "remainder": report.remainder,
            "converged": report.converged,
            "below_half": report.below_half,
        }
        _emit(_json_text(record), args.output)
        return 0
    if args.threshold:
        star = beta_threshold(args.zeta, args.alpha)
        _emit(_json_text({"alpha": args.alpha, "zeta": args.zeta, "beta_star": star}),
              args.output)
        return 0
    if args.beta_max <= args.beta_min:
        raise ValueError("beta-max must exceed beta-min")
    if args.steps < 2:
        raise ValueError("steps must be at least 2")
    rows = []
    for k in range(args.steps):
        beta = args.beta_min + (args.beta_max - args.beta_min) * k / (args.steps - 1)
        rep = peierls_series_bound(beta, args.zeta, args.alpha)
        rows.append(
            [
                repr(round(beta, 12)),
                repr(rep.kappa),
                repr(rep.value),
                repr(rep.remainder),
                int(rep.converged),
                int(rep.below_half),
            ]
        )
    meta = {
        "alpha": args.alpha,
        "zeta": args.zeta,
        "beta_min": args.beta_min,
        "beta_max": args.beta_max,
        "steps": args.steps,
    }
    header = ["beta", "kappa", "value", "remainder", "converged", "below_half"]
    _emit(_csv_text(meta, header, rows), args.output)
    return 0


# ---------------------------------------------------------------------------
# Parser assembly


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--output", default=None, metavar="PATH",
                     help="write to PATH instead of stdout")
    sub.add_argument("--config", default=None, metavar="FILE",
                     help="key=value file supplying defaults for this command")


def _add_geometry_inputs(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("spins", nargs="?", default=None,
                     help="spin string over + and -, e.g. '++--+-++'")
    sub.add_argument("--origin", type=int, default=None,
                     help="lattice coordinate of the first character")
    sub.add_argument("--triangles", default=None, metavar="LIST",
                     help="comma separated lo:hi pairs instead of spins")
    sub.add_argument("--c", type=float, default=DEFAULT_C,
                     help="separation constant (default %(default)s)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trigas",
        description="Triangle contours, tree encodings, bounds and sampling "
        "for the long-range Ising chain.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("decompose", help="split spins or triangles into contours")
    _add_geometry_inputs(p)
    _add_common(p)
    p.set_defaults(func=_cmd_decompose)

    p = subs.add_parser("tree", help="encode each contour as a validated tree")
    _add_geometry_inputs(p)
    _add_common(p)
    p.set_defaults(func=_cmd_tree)

    p = subs.add_parser("wbound", help="scan the pair energy kernel against its floor")
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--j1", type=float, default=10.0)
    p.add_argument("--l-max", type=int, default=100_000)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    _add_common(p)
    p.set_defaults(func=_cmd_wbound)

    p = subs.add_parser("entropy", help="count anchored contours of a given mass")
    p.add_argument("--m", type=int, required=True, help="total triangle mass")
    p.add_argument("--b", type=float, default=8.0, help="weight exponent scale")
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--c", type=float, default=DEFAULT_C)
    p.add_argument("--threads", type=int, default=1)
    _add_common(p)
    p.set_defaults(func=_cmd_entropy)

    p = subs.add_parser("convexity", help="scan the splitting margin of the mass terms")
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--b", type=float, default=2.0)
    p.add_argument("--n-max", type=int, default=4)
    p.add_argument("--x-max", type=int, default=200)
    _add_common(p)
    p.set_defaults(func=_cmd_convexity)

    p = subs.add_parser("sample", help="Metropolis run with contour event estimate")
    p.add_argument("--window", type=int, default=512)
    p.add_argument("--beta", type=float, default=2.0)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--j1", type=float, default=10.0)
    p.add_argument("--sweeps", type=int, default=4096)
    p.add_argument("--burn-in", type=int, default=1024)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--chains", type=int, default=1)
    p.add_argument("--c", type=float, default=DEFAULT_C)
    p.add_argument("--zeta", type=float, default=None,
                   help="also evaluate the covering series at this slope")
    _add_common(p)
    p.set_defaults(func=_cmd_sample)

    p = subs.add_parser("peierls-sweep", help="covering series over a beta range")
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--zeta", type=float, default=2.0)
    p.add_argument("--beta-min", type=float, default=1.0)
    p.add_argument("--beta-max", type=float, default=12.0)
    p.add_argument("--steps", type=int, default=12)
    p.add_argument("--series-beta", type=float, default=None,
                   help="evaluate a single beta and emit JSON")
    p.add_argument("--threshold", action="store_true",
                   help="emit the smallest beta with a certified bound below 1/2")
    _add_common(p)
    p.set_defaults(func=_cmd_peierls_sweep)

    parser.option_types = {
        name: {a.dest: a.type for a in sp._actions}
        for name, sp in subs.choices.items()
    }
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config(args, argv, parser.option_types.get(args.command, {}))
        if getattr(args, "c", DEFAULT_C) <= 0:
            raise ValueError("separation constant c must be positive")
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:
        print(f"internal error: {exc!r}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
