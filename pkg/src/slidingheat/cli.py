"""Command-line entry point: ``slidingheat <subcommand> [options]``.

Exit status is 0 only when every validity gate of the command passes.
"""
from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .config import load_config
from .controllers import GainError, StGains, validate_smc_gains, validate_st_gains
from .harness import Metrics, _fmt, export, run_experiment, sweep, write_sweep
from .heat_sim import BlowUpError, ConfigError, build_initial_state
from .reduced_ode import simulate_smc_reduced, simulate_st_reduced
from .spectral import inner_product, sample_eigenfunction, solve_eigenvalue, SampledFunction

_FLAG_KEYS = {
    "c0": "c0", "nx": "nx", "dx": "dx", "dt": "dt", "horizon": "horizon",
    "branch": "branch", "selection": "selection", "scheme": "scheme",
    "K": "gains.K", "alpha": "gains.alpha", "beta": "gains.beta",
}


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="key = value run configuration")
    p.add_argument("--out-dir", type=Path, default=Path("."), help="output directory")
    p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                   help="override any config key (repeatable)")
    for flag in _FLAG_KEYS:
        p.add_argument(f"--{flag}", dest=f"flag_{flag}", default=None,
                       help=f"override {_FLAG_KEYS[flag]}")


def _config(args, **forced):
    overrides = {}
    for item in args.overrides:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        overrides[key.strip()] = value
    for flag, key in _FLAG_KEYS.items():
        value = getattr(args, f"flag_{flag}", None)
        if value is not None:
            overrides[key] = value
    overrides.update(forced)
    return load_config(args.config, overrides)


def _write_rows(fh, header, rows) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])


def cmd_eigen(args) -> int:
    pair = solve_eigenvalue(args.c0, args.branch)
    if args.header:
        print("r,lambda,b_star_phi,residual")
    print(",".join(_fmt(v) for v in (pair.r, pair.lam, pair.b_star_phi, pair.residual)))
    return 0


def cmd_validate(args) -> int:
    config = _config(args)
    pair = config.eigenpair()
    checks = [validate_smc_gains(config.gains.K, config.disturbance, pair.b_star_phi)]
    if config.disturbance.C is not None:
        checks += validate_st_gains(StGains(config.gains.alpha, config.gains.beta),
                                    config.disturbance, pair.b_star_phi)
    else:
        print("# st: disturbance has no certified C, super-twisting not validated",
              file=sys.stderr)
    _write_rows(sys.stdout, ("law", "condition", "lhs", "rhs", "margin", "pass"),
                [c.row() for c in checks])
    return 0 if all(checks) else 1


def _simulate(args, law: str) -> int:
    config = _config(args, law=law)
    if args.no_field:
        config = replace(config, snapshot_stride=0)
    record = run_experiment(config)
    export(record, args.out_dir)
    m = record.metrics
    _write_rows(sys.stdout, Metrics.header(), [m.row()])
    return 0 if m.passed else 1


def cmd_simulate_smc(args) -> int:
    return _simulate(args, "smc")


def cmd_simulate_st(args) -> int:
    return _simulate(args, "st")


def cmd_reduced(args) -> int:
    config = _config(args)
    pair = config.eigenpair()
    b = pair.b_star_phi
    sigma0 = config.reduced.sigma0
    if sigma0 is None:
        z0 = SampledFunction(config.grid, build_initial_state(config).values)
        sigma0 = inner_product(sample_eigenfunction(pair, config.grid), z0)
    dt = config.reduced.dt
    if args.law == "smc":
        traj = simulate_smc_reduced(sigma0, config.gains.K, b, config.disturbance, dt=dt,
                                    horizon=config.horizon, selection=config.selection)
        cols = [traj.t, traj.sigma, traj.selection]
        header = "t,sigma,selection"
    else:
        w0 = config.reduced.w0
        if w0 is None:
            w0 = b * config.disturbance(0.0) + config.gains.v0
        traj = simulate_st_reduced(sigma0, w0, config.gains.alpha, config.gains.beta, b,
                                   config.disturbance, dt=dt, horizon=config.horizon)
        cols = [traj.t, traj.sigma, traj.w, traj.selection]
        header = "t,sigma,w,selection"
    args.out_dir.mkdir(parents=True, exist_ok=True)
    path = args.out_dir / f"reduced_{args.law}.csv"
    data = np.column_stack(cols)[::max(args.stride, 1)]
    np.savetxt(path, data, fmt="%.17g", delimiter=",", header=header, comments="")
    t_r = "not reached" if traj.t_reach is None else f"{traj.t_reach:.6g}"
    print(f"law={args.law} sigma0={sigma0:.6g} t_reach={t_r} -> {path}")
    return 0 if traj.reached else 1


def _parse_grid(items) -> dict:
    grid = {}
    for item in items:
        key, sep, values = item.partition("=")
        if not sep:
            raise ConfigError(f"--grid expects KEY=V1,V2,..., got {item!r}")
        grid[key.strip()] = [v.strip() for v in values.split(",") if v.strip()]
    return grid


def cmd_sweep(args) -> int:
    base = _config(args)
    rows = sweep(base, _parse_grid(args.grid), workers=args.workers)
    path = write_sweep(rows, args.out_dir / "sweep.csv")
    ok = all(r.get("error", "x") == "" and r.get("bound_ok") and r.get("reached") for r in rows)
    print(f"{len(rows)} rows -> {path}")
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="slidingheat",
        description="Sliding-mode / super-twisting boundary control of the 1D heat equation")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eigen", help="solve r tan r = c0 on one branch")
    p.add_argument("--c0", type=float, default=0.5)
    p.add_argument("--branch", type=int, default=1)
    p.add_argument("--header", action="store_true", help="print the CSV header first")
    p.set_defaults(func=cmd_eigen)

    p = sub.add_parser("validate-gains", help="check the SMC / super-twisting gain conditions")
    _add_common(p)
    p.set_defaults(func=cmd_validate)

    for name, func, text in (("simulate-smc", cmd_simulate_smc, "sliding-mode closed loop"),
                             ("simulate-st", cmd_simulate_st, "super-twisting closed loop")):
        p = sub.add_parser(name, help=text)
        _add_common(p)
        p.add_argument("--no-field", action="store_true", help="skip field.csv")
        p.set_defaults(func=func)

    p = sub.add_parser("reduced-ode", help="scalar sliding-variable dynamics")
    _add_common(p)
    p.add_argument("--law", choices=("smc", "st"), required=True)
    p.add_argument("--stride", type=int, default=1, help="write every N-th sample")
    p.set_defaults(func=cmd_reduced)

    p = sub.add_parser("sweep", help="metrics over a parameter grid")
    _add_common(p)
    p.add_argument("--grid", action="append", default=[], metavar="KEY=V1,V2",
                   help="grid axis over a config key (repeatable)")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, GainError, BlowUpError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
