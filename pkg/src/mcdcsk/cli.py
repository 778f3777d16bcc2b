"""Command line interface: ``mcdcsk <subcommand> ...``.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from . import analysis as an
from .chaos import estimate_energy_histogram
from .channel import ChannelProfile
from .config import (
    ebno_grid,
    load_profile,
    load_yaml,
    provenance,
    runspec_from_mapping,
    runspec_to_mapping,
    system_from_mapping,
)
from .figures import LOW_SF_LIMIT, RECIPES, awgn_analytic, emit_figure
from .frame import ConfigurationError, frequency_plan
from .montecarlo import run_monte_carlo

EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def _system_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="YAML run configuration")
    p.add_argument("--m", type=int, help="number of subcarriers M")
    p.add_argument("--beta", type=int, help="spreading factor")
    p.add_argument("--tb", type=float, help="bit duration (derives beta with --bw, --alpha)")
    p.add_argument("--bw", type=float, help="total bandwidth")
    p.add_argument("--alpha", type=float, help="roll-off factor (default 0.25)")


def _grid_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--ebno-start", type=float)
    p.add_argument("--ebno-stop", type=float)
    p.add_argument("--ebno-step", type=float, default=1.0)
    p.add_argument("--profile", help="YAML channel profile (fading + paths)")
    p.add_argument("--out", help="CSV output path (stdout when omitted)")


def _mapping(args) -> dict:
    d = load_yaml(args.config) if getattr(args, "config", None) else {}
    for key, attr in (("M", "m"), ("beta", "beta"), ("T_b", "tb"), ("B", "bw"), ("alpha", "alpha")):
        v = getattr(args, attr, None)
        if v is not None:
            d[key] = v
    if getattr(args, "tb", None) is not None and getattr(args, "beta", None) is None:
        d.pop("beta", None)
    if getattr(args, "ebno_start", None) is not None:
        stop = args.ebno_stop if args.ebno_stop is not None else args.ebno_start
        d["ebno_db"] = list(ebno_grid(args.ebno_start, stop, args.ebno_step))
    if getattr(args, "profile", None):
        d["channel"] = load_profile(args.profile).to_dict()
    for key, attr in (("seed", "seed"), ("min_errors", "min_errors"), ("max_bits", "max_bits"),
                      ("workers", "workers")):
        v = getattr(args, attr, None)
        if v is not None:
            d[key] = v
    if getattr(args, "noiseless", False):
        d["noiseless"] = True
    return d


def _emit(text_rows, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text_rows)
    else:
        sys.stdout.write(text_rows)


def cmd_simulate(args) -> int:
    spec = runspec_from_mapping(_mapping(args))
    cfg, prof = spec.config, spec.profile
    analytic = None
    if args.analytic:
        if prof.fading == "rayleigh":
            analytic = lambda e: (an.ber_rayleigh(e, cfg.M, cfg.beta, prof), "rayleigh_integral")
        else:
            analytic = awgn_analytic(cfg.M, cfg.beta, seed=spec.master_seed)
    curve = run_monte_carlo(spec, analytic)
    header = provenance("simulate", runspec_to_mapping(spec), spec.master_seed)
    if args.out:
        curve.to_csv(args.out, header)
    else:
        for line in header:
            print(f"# {line}")
        print(",".join(curve.HEADER))
        for row in curve.rows():
            print(",".join(str(v) for v in row))
    return 0


def cmd_analyze(args) -> int:
    d = _mapping(args)
    if "M" not in d:
        raise ConfigurationError("--m is required")
    cfg = system_from_mapping(d)
    grid = d.get("ebno_db", list(range(0, 16)))
    if isinstance(grid, dict):
        grid = ebno_grid(grid["start"], grid["stop"], grid.get("step", 1.0))
    prof = ChannelProfile.from_dict(d.get("channel", {}))
    method = args.method
    if method == "auto":
        if prof.fading == "rayleigh":
            method = "rayleigh_integral"
        else:
            method = "awgn_low_sf" if cfg.beta < LOW_SF_LIMIT else "awgn_high_sf"
    hist = None
    if method == "awgn_low_sf":
        hist = estimate_energy_histogram(cfg.beta, n_samples=args.hist_samples, rng_seed=args.seed or 0)
    profile_id = "awgn" if prof.fading == "none" else "rayleigh-" + "-".join(
        f"{p.gain:g}@{p.delay}" for p in prof.paths)
    points = an.analytic_curve(grid, cfg.M, cfg.beta, method, profile=prof, hist=hist, profile_id=profile_id)
    if any(not np.isfinite(p.ber) for p in points):
        raise FloatingPointError("non-finite BER value")
    if args.out:
        an.write_analytic_csv(points, args.out)
    else:
        print(",".join(an.ANALYTIC_HEADER))
        for p in points:
            print(f"{p.ebno_db},{p.ber!r},{p.method},{p.M},{p.beta},{p.profile_id}")
    return 0


def cmd_energy_hist(args) -> int:
    hist = estimate_energy_histogram(args.beta, n_samples=args.samples, class_count=args.classes,
                                     rng_seed=args.seed)
    if args.out:
        hist.to_csv(args.out)
    else:
        print("bin_center,probability")
        for c, p in zip(hist.bin_centers, hist.probabilities):
            print(f"{c!r},{p!r}")
    return 0


def cmd_dbr(args) -> int:
    Ms = args.m or list(range(2, 65))
    print("M,dbr,reference_share")
    for M in Ms:
        print(f"{M},{an.dbr(M)!r},{an.reference_share(M)!r}")
    return 0


def cmd_plan(args) -> int:
    d = _mapping(args)
    if "M" not in d:
        raise ConfigurationError("--m is required")
    cfg = system_from_mapping(d)
    plan = frequency_plan(cfg, args.fp)
    print(f"M={cfg.M} beta={cfg.beta} alpha={cfg.alpha} T_c={cfg.T_c:g}")
    print(f"B_c={plan.B_c:g} delta={plan.delta:g} B=M*B_c={plan.total_bandwidth:g}")
    print("subcarrier,frequency")
    for i, f in enumerate(plan.frequencies, start=1):
        print(f"{i},{f:g}")
    return 0


def cmd_figure(args) -> int:
    kwargs = {"seed": args.seed or 0, "workers": args.workers or 1}
    if args.max_bits is not None:
        kwargs["max_bits"] = args.max_bits
    if args.min_errors is not None:
        kwargs["min_errors"] = args.min_errors
    for path in emit_figure(args.name, args.out_dir, **kwargs):
        print(path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mcdcsk", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="Monte Carlo BER over an Eb/N0 grid")
    _system_args(p)
    _grid_args(p)
    p.add_argument("--seed", type=int)
    p.add_argument("--min-errors", type=int)
    p.add_argument("--max-bits", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--analytic", action="store_true", help="add the matching closed-form curve")
    p.add_argument("--noiseless", action="store_true", help="debug: force N0 = 0")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("analyze", help="closed-form / numerically integrated BER")
    _system_args(p)
    _grid_args(p)
    p.add_argument("--method", default="auto",
                   choices=["auto", "awgn_high_sf", "awgn_low_sf", "rayleigh_integral", "bpsk"])
    p.add_argument("--hist-samples", type=int, default=10_000_000)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("energy-hist", help="chaotic bit-energy histogram")
    p.add_argument("--beta", type=int, required=True)
    p.add_argument("--samples", type=int, default=10_000_000)
    p.add_argument("--classes", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_energy_hist)

    p = sub.add_parser("dbr", help="data-energy-to-bit-energy ratio table")
    p.add_argument("--m", type=int, nargs="*")
    p.set_defaults(func=cmd_dbr)

    p = sub.add_parser("plan", help="spreading factor and subcarrier frequency plan")
    _system_args(p)
    p.add_argument("--fp", type=float, default=0.0, help="fundamental subcarrier frequency")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("figure", help="write reproduction CSVs for one experiment")
    p.add_argument("name", choices=sorted(RECIPES))
    p.add_argument("--out-dir", default="figures")
    p.add_argument("--seed", type=int)
    p.add_argument("--min-errors", type=int)
    p.add_argument("--max-bits", type=int)
    p.add_argument("--workers", type=int)
    p.set_defaults(func=cmd_figure)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (FloatingPointError, ArithmeticError, RuntimeError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
