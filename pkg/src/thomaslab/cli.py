"""Command line interface.

Every subcommand emits one delimited report (CSV or JSON) to --out, or to
stdout when --out is omitted.  The first record of each report is metadata
carrying the tool version, the canonical resolved argument vector and the
seed; re-running that argv reproduces the report byte for byte.  --plot
additionally renders a PNG next to the output file.

Exit codes: 0 success, 2 invalid arguments or domain errors, 3 numerical
failure (integration breakdown or too little data for a statistic).
"""
from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import equilibria as eq
from . import metrics, output, sections, walk
from ._version import __version__
from .errors import (DomainError, InsufficientDataError, IntegrationError,
                     ThomasLabError)
from .integrate import IntegratorConfig, Method, integrate

EXIT_OK = 0
EXIT_DOMAIN = 2
EXIT_NUMERICAL = 3

OUTDIR_ENV = "THOMASLAB_OUTDIR"


def _f(v) -> str:
    """Canonical argv token for a number (repr round-trips doubles)."""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not v > 0.0 or not np.isfinite(v):
        raise argparse.ArgumentTypeError(f"must be a positive number, got {text}")
    return v


def _nonneg_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if v < 0.0 or not np.isfinite(v):
        raise argparse.ArgumentTypeError(f"must be >= 0, got {text}")
    return v


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text}")
    return v


def _nonneg_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {text}")
    return v


def _resolve_out(out: str | None) -> str:
    """Map --out to a write target; relative paths honour THOMASLAB_OUTDIR."""
    if out is None:
        return "-"
    outdir = os.environ.get(OUTDIR_ENV)
    if outdir and not os.path.isabs(out):
        out = os.path.join(outdir, out)
    parent = os.path.dirname(out)
    if parent:
        os.makedirs(parent, exist_ok=True)
    return out


def _plot_path(args, target: str) -> str | None:
    if not args.plot:
        return None
    if target == "-":
        raise DomainError("--plot requires --out (the PNG lands next to it)")
    stem, _ = os.path.splitext(target)
    return stem + ".png"


def _tail_argv(args, argv: list[str]) -> list[str]:
    """Common trailing tokens: --out as given, --plot flag."""
    if args.out is not None:
        argv += ["--out", args.out]
    if args.plot:
        argv += ["--plot"]
    return argv


def _add_out_opts(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", help="output file (default: stdout); relative "
                   f"paths are placed under ${OUTDIR_ENV} when it is set")
    p.add_argument("--plot", action="store_true",
                   help="also render a PNG next to --out")


def _add_window_opts(p: argparse.ArgumentParser, t_end: float,
                     skip: float) -> None:
    p.add_argument("--t-end", type=_positive_float, default=t_end,
                   help=f"integration horizon (default {t_end:g})")
    p.add_argument("--skip", type=_nonneg_float, default=skip,
                   help=f"transient to discard (default {skip:g})")
    p.add_argument("--step", type=_positive_float, default=0.01,
                   help="RK4 step (default 0.01)")


def _config(args, method: Method = Method.RK4_FIXED) -> IntegratorConfig:
    return IntegratorConfig(step_h=args.step, t_end=args.t_end,
                            transient_skip=args.skip, method=method)


# ---------------------------------------------------------------- simulate

def _cmd_simulate(args) -> int:
    method = Method.RK45_ADAPTIVE if args.method == "rk45" else Method.RK4_FIXED
    cfg = _config(args, method)
    traj = integrate(args.s0, args.b, cfg)
    argv = ["simulate", "--b", _f(args.b),
            "--s0", _f(args.s0[0]), _f(args.s0[1]), _f(args.s0[2]),
            "--t-end", _f(args.t_end), "--skip", _f(args.skip),
            "--step", _f(args.step), "--method", args.method]
    target = _resolve_out(args.out)
    png = _plot_path(args, target)
    output.write_trajectory(target, traj,
                            output.build_meta("simulate", _tail_argv(args, argv)))
    if png:
        from . import figures
        figures.plot_trajectory(traj, png, args.b)
    return EXIT_OK


# ------------------------------------------------------------ fixed-points

def _cmd_fixed_points(args) -> int:
    x_max = args.x_max if args.x_max is not None else max(np.pi, 1.2 / args.b)
    eqs = eq.find_fixed_points(args.b, scan_step=args.scan_step, x_max=x_max)
    argv = ["fixed-points", "--b", _f(args.b),
            "--scan-step", _f(args.scan_step), "--x-max", _f(x_max)]
    target = _resolve_out(args.out)
    png = _plot_path(args, target)
    output.write_equilibria(target, eqs, args.b,
                            output.build_meta("fixed-points", _tail_argv(args, argv)))
    if png:
        from . import figures
        figures.plot_equilibria(eqs, png, args.b)
    return EXIT_OK


# ------------------------------------------------------------ bifurcations

def _cmd_bifurcations(args) -> int:
    events = eq.all_bifurcations(n_max=args.n_max)
    argv = ["bifurcations", "--n-max", _f(args.n_max)]
    target = _resolve_out(args.out)
    png = _plot_path(args, target)
    output.write_bifurcations(target, events,
                              output.build_meta("bifurcations", _tail_argv(args, argv)))
    if png:
        from . import figures
        figures.plot_bifurcations(events, png)
    return EXIT_OK


# ---------------------------------------------------------------- lyapunov

def _cmd_lyapunov(args) -> int:
    if args.b_range is not None:
        try:
            lo, hi = float(args.b_range[0]), float(args.b_range[1])
            n = int(args.b_range[2])
        except ValueError:
            raise DomainError(f"--b-range expects LO HI N, got {args.b_range}")
        if not (0.0 <= lo <= hi and n >= 1):
            raise DomainError("--b-range needs 0 <= LO <= HI and N >= 1")
        bs = list(np.linspace(lo, hi, n))
    else:
        bs = list(args.b)
    cfg = _config(args)
    policy = "continue" if args.policy == "continue" else tuple(args.s0)
    reports = metrics.spectrum_scan(bs, cfg, renorm_every=args.renorm,
                                    s0_policy=policy,
                                    s0_start=tuple(args.s0),
                                    threads=args.threads)
    argv = ["lyapunov", "--b"] + [_f(b) for b in bs] + [
        "--t-end", _f(args.t_end), "--skip", _f(args.skip),
        "--step", _f(args.step), "--renorm", _f(args.renorm),
        "--policy", args.policy,
        "--s0", _f(args.s0[0]), _f(args.s0[1]), _f(args.s0[2])]
    target = _resolve_out(args.out)
    png = _plot_path(args, target)
    output.write_lyapunov(target, reports,
                          output.build_meta("lyapunov", _tail_argv(args, argv)))
    failed = [r for r in reports if r.error is not None]
    for r in failed:
        print(f"warning: b = {r.b:g} failed: {r.error}", file=sys.stderr)
    if png:
        from . import figures
        figures.plot_lyapunov(reports, png)
    return EXIT_OK


# ----------------------------------------------------------------- section

_DIRECTIONS = {"up": sections.Direction.UP,
               "down": sections.Direction.DOWN,
               "both": None}


def _cmd_section(args) -> int:
    cfg = _config(args)
    direction = _DIRECTIONS[args.direction]
    target = _resolve_out(args.out)
    png = _plot_path(args, target)
    if args.ensemble is not None:
        ens = sections.ensemble_section(
            args.ensemble, args.b, cfg, rng_seed=args.seed,
            mean=tuple(args.mean), scale=args.scale, direction=direction,
            max_hits_per_init=args.max_hits, threads=args.threads)
        hits = ens.hits
        if ens.n_failed:
            print(f"warning: {ens.n_failed} of {ens.n_init} trajectories "
                  f"failed (ids {list(ens.failed_init_ids)})", file=sys.stderr)
        argv = ["section", "--b", _f(args.b), "--ensemble", _f(args.ensemble),
                "--seed", _f(args.seed),
                "--mean", _f(args.mean[0]), _f(args.mean[1]), _f(args.mean[2]),
                "--scale", _f(args.scale)]
        seed = args.seed
    else:
        hits = sections.poincare_section(args.s0, args.b, cfg,
                                         direction=direction,
                                         max_hits=args.max_hits)
        argv = ["section", "--b", _f(args.b),
                "--s0", _f(args.s0[0]), _f(args.s0[1]), _f(args.s0[2])]
        seed = None
    argv += ["--t-end", _f(args.t_end), "--skip", _f(args.skip),
             "--step", _f(args.step), "--direction", args.direction]
    if args.max_hits is not None:
        argv += ["--max-hits", _f(args.max_hits)]
    output.write_section(target, hits,
                         output.build_meta("section", _tail_argv(args, argv),
                                           seed=seed))
    if png:
        from . import figures
        figures.plot_section(hits, png, args.b)
    return EXIT_OK


# ------------------------------------------------------------------- sweep

def _cmd_sweep(args) -> int:
    cfg = _config(args)
    policy = "continue" if args.policy == "continue" else tuple(args.s0)
    rows = sections.bifurcation_sweep(
        args.b_min, args.b_max, args.n_b, cfg, record=args.record,
        max_hits=args.max_hits, s0_policy=policy, s0_start=tuple(args.s0),
        direction=_DIRECTIONS[args.direction], threads=args.threads)
    argv = ["sweep", "--b-min", _f(args.b_min), "--b-max", _f(args.b_max),
            "--n-b", _f(args.n_b), "--record", args.record,
            "--max-hits", _f(args.max_hits),
            "--t-end", _f(args.t_end), "--skip", _f(args.skip),
            "--step", _f(args.step), "--policy", args.policy,
            "--s0", _f(args.s0[0]), _f(args.s0[1]), _f(args.s0[2]),
            "--direction", args.direction]
    target = _resolve_out(args.out)
    png = _plot_path(args, target)
    output.write_sweep(target, rows,
                       output.build_meta("sweep", _tail_argv(args, argv)))
    failed = [r for r in rows if r.error is not None]
    for r in failed:
        print(f"warning: b = {r.b:g} failed: {r.error}", file=sys.stderr)
    if png:
        from . import figures
        figures.plot_sweep(rows, png, args.record)
    return EXIT_OK


# -------------------------------------------------------------------- walk

def _cmd_walk(args) -> int:
    target = _resolve_out(args.out)
    png = _plot_path(args, target)
    # the two modes have very different natural horizons
    t_end = args.t_end if args.t_end is not None else \
        (200.0 if args.density else 50000.0)
    if args.density:
        report = walk.density_check(n_init=args.n_init, t_end=t_end,
                                    cells_per_side=args.cells,
                                    rng_seed=args.seed, step_h=args.step,
                                    b=args.b)
        argv = ["walk", "--density", "--n-init", _f(args.n_init),
                "--t-end", _f(t_end), "--cells", _f(args.cells),
                "--seed", _f(args.seed), "--step", _f(args.step),
                "--b", _f(args.b)]
        output.write_density(target, report,
                             output.build_meta("walk", _tail_argv(args, argv),
                                               seed=args.seed))
        if png:
            from . import figures
            figures.plot_density(report, png)
        return EXIT_OK

    if args.b != 0.0:
        raise DomainError("walk statistics are defined for b = 0 "
                          "(use --density for damped occupancy checks)")
    speed, _ = walk.streamed_speed_stats(args.s0, t_end, step_h=args.step)
    traj = integrate(args.s0, 0.0,
                     IntegratorConfig(step_h=args.step, t_end=t_end,
                                      transient_skip=0.0),
                     rec_stride=args.msd_stride)
    lags = np.geomspace(1.0, traj.duration / 4.0, args.lags)
    curve = walk.msd_curve(traj, lags)
    stats = walk.WalkStats(mean_speed=speed, msd_curve=tuple(curve),
                           diffusion_estimate=walk.diffusion_estimate(curve))
    argv = ["walk", "--b", _f(0.0),
            "--s0", _f(args.s0[0]), _f(args.s0[1]), _f(args.s0[2]),
            "--t-end", _f(t_end), "--step", _f(args.step),
            "--lags", _f(args.lags), "--msd-stride", _f(args.msd_stride)]
    output.write_walk_stats(target, stats,
                            output.build_meta("walk", _tail_argv(args, argv)))
    if png:
        from . import figures
        figures.plot_walk(stats, png)
    return EXIT_OK


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="thomaslab", allow_abbrev=False,
        description="Dynamics of the cyclically symmetric Thomas flow: "
                    "equilibria, bifurcations, Lyapunov spectra, Poincare "
                    "sections and zero-damping walk statistics.")
    parser.add_argument("--version", action="version",
                        version=f"thomaslab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", allow_abbrev=False,
                       help="integrate one trajectory to CSV (t,x,y,z)")
    p.add_argument("--b", type=_nonneg_float, required=True)
    p.add_argument("--s0", type=float, nargs=3, default=[0.1, 0.2, 0.3],
                   metavar=("X", "Y", "Z"))
    _add_window_opts(p, t_end=5000.0, skip=500.0)
    p.add_argument("--method", choices=["rk4", "rk45"], default="rk4")
    _add_out_opts(p)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("fixed-points", allow_abbrev=False,
                       help="enumerate and classify equilibria to JSON")
    p.add_argument("--b", type=_positive_float, required=True)
    p.add_argument("--scan-step", type=_positive_float, default=1e-3)
    p.add_argument("--x-max", type=_positive_float, default=None)
    _add_out_opts(p)
    p.set_defaults(func=_cmd_fixed_points)

    p = sub.add_parser("bifurcations", allow_abbrev=False,
                       help="bifurcation catalogue to CSV (kind,b_critical,x_star)")
    p.add_argument("--n-max", type=_positive_int, default=4,
                   help="events per infinite family (default 4)")
    _add_out_opts(p)
    p.set_defaults(func=_cmd_bifurcations)

    p = sub.add_parser("lyapunov", allow_abbrev=False,
                       help="Lyapunov spectra to CSV (b,lambda1..3,d_ky,converged)")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--b", type=_nonneg_float, nargs="+",
                   help="one or more damping values")
    g.add_argument("--b-range", nargs=3, metavar=("LO", "HI", "N"),
                   help="uniform grid of N values on [LO, HI]")
    _add_window_opts(p, t_end=20000.0, skip=1000.0)
    p.add_argument("--renorm", type=_positive_int, default=10,
                   help="steps between re-orthonormalizations (default 10)")
    p.add_argument("--policy", choices=["continue", "fixed"], default="continue",
                   help="initial state policy for multi-b scans")
    p.add_argument("--s0", type=float, nargs=3, default=[0.1, 0.2, 0.3],
                   metavar=("X", "Y", "Z"),
                   help="scan start (continue) or per-row state (fixed)")
    p.add_argument("--threads", type=_positive_int, default=1,
                   help="worker cap for fixed-policy scans; results are "
                        "identical for any value")
    _add_out_opts(p)
    p.set_defaults(func=_cmd_lyapunov)

    p = sub.add_parser("section", allow_abbrev=False,
                       help="Poincare section hits to CSV "
                            "(init_id,t,x,y,z,direction)")
    p.add_argument("--b", type=_positive_float, required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--s0", type=float, nargs=3, default=[0.1, 0.2, 0.3],
                   metavar=("X", "Y", "Z"))
    g.add_argument("--ensemble", type=_positive_int, default=None,
                   help="number of seeded random initial states")
    p.add_argument("--seed", type=_nonneg_int, default=0,
                   help="ensemble RNG seed (default 0)")
    p.add_argument("--mean", type=float, nargs=3, default=[0.5, 0.5, 0.5],
                   metavar=("X", "Y", "Z"),
                   help="ensemble mean (default 0.5 0.5 0.5)")
    p.add_argument("--scale", type=_positive_float, default=2.0,
                   help="ensemble isotropic std dev (default 2.0)")
    _add_window_opts(p, t_end=5000.0, skip=500.0)
    p.add_argument("--direction", choices=["up", "down", "both"],
                   default="both")
    p.add_argument("--max-hits", type=_positive_int, default=None,
                   help="stop each trajectory after this many crossings")
    p.add_argument("--threads", type=_positive_int, default=1)
    _add_out_opts(p)
    p.set_defaults(func=_cmd_section)

    p = sub.add_parser("sweep", allow_abbrev=False,
                       help="section coordinates vs damping to CSV "
                            "(b,hit_index,value)")
    p.add_argument("--b-min", type=_positive_float, default=0.01)
    p.add_argument("--b-max", type=_positive_float, default=0.45)
    p.add_argument("--n-b", type=_positive_int, default=600)
    p.add_argument("--record", choices=["x", "y", "z"], default="x")
    p.add_argument("--max-hits", type=_positive_int, default=200)
    _add_window_opts(p, t_end=5000.0, skip=500.0)
    p.add_argument("--policy", choices=["continue", "fixed"], default="continue")
    p.add_argument("--s0", type=float, nargs=3, default=[0.1, 0.2, 0.3],
                   metavar=("X", "Y", "Z"))
    p.add_argument("--direction", choices=["up", "down", "both"],
                   default="both")
    p.add_argument("--threads", type=_positive_int, default=1)
    _add_out_opts(p)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("walk", allow_abbrev=False,
                       help="zero-damping statistics to JSON (speed, MSD, "
                            "diffusion), or occupancy with --density")
    p.add_argument("--density", action="store_true",
                   help="ensemble occupancy drift instead of walk statistics")
    p.add_argument("--b", type=_nonneg_float, default=0.0,
                   help="damping for --density contrast runs (default 0)")
    p.add_argument("--s0", type=float, nargs=3, default=[0.1, 0.2, 0.3],
                   metavar=("X", "Y", "Z"))
    p.add_argument("--t-end", type=_positive_float, default=None,
                   help="horizon (default 50000, or 200 with --density)")
    p.add_argument("--step", type=_positive_float, default=0.01)
    p.add_argument("--lags", type=_positive_int, default=24,
                   help="number of log-spaced MSD lags (default 24)")
    p.add_argument("--msd-stride", type=_positive_int, default=10,
                   help="record every N-th step for the MSD (default 10)")
    p.add_argument("--n-init", type=_positive_int, default=4096,
                   help="density mode: ensemble size (default 4096)")
    p.add_argument("--cells", type=_positive_int, default=8,
                   help="density mode: cells per side (default 8)")
    p.add_argument("--seed", type=_nonneg_int, default=0)
    _add_out_opts(p)
    p.set_defaults(func=_cmd_walk)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (IntegrationError, InsufficientDataError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ThomasLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
