from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import List

import numpy as np

from . import config
from .augmented import proper_covariance, validate_augmented
from .data_io import load_channel, load_covariance, load_experiment_config, write_trace_csv
from .errors import ConfigError, SecrecyToolkitError
from .experiments import format_report, reproduce_table, run_single, run_sweep
from .models import ExperimentConfig, PowerBudget, RateValue, SolverConfig
from .properties import SCOPE_ALIASES, SCOPES, check_properties, format_properties
from .secrecy_rates import degradedness, general_rate, proper_rate
from .solvers import saddle_solve

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAIL = 2


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with 1; 2 is reserved for property / acceptance failures."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fmt(rate: RateValue, unit: str) -> str:
    return f"{rate.to(unit).value:.6f} {unit}"


def _channel(args: argparse.Namespace):
    return load_channel(args.channel if args.channel else config.REFERENCE_CHANNEL_JSON)


def _solver_config(args: argparse.Namespace, method: str | None = None) -> SolverConfig:
    return SolverConfig(
        max_iters=args.max_iters,
        tol_increase=args.tol,
        method=method or args.method,
        seed=args.seed,
        random_start=args.random_start,
        improper_start=args.improper_start,
    )


# ---------- Commands ----------

def cmd_rate(args: argparse.Namespace) -> int:
    """Evaluate the proper (and, with a pseudo-covariance, general) secrecy rate of a given covariance."""
    ch = _channel(args)
    if args.covariance:
        K, K_tilde = load_covariance(args.covariance)
    else:
        P = PowerBudget.from_snr_db(args.snr).P
        K, K_tilde = (P / ch.n_t) * np.eye(ch.n_t, dtype=complex), None
        print(f"Using white covariance (P/n_t) I with P = {P:.6g}")

    deg = degradedness(ch)
    print(f"Delta eigenvalues: min {deg.min_eig:.4f}, max {deg.max_eig:.4f} (degraded: {deg.is_degraded})")
    print(f"Proper rate R_p(K): {_fmt(proper_rate(ch, K), args.unit)}")
    aug = proper_covariance(K) if K_tilde is None else validate_augmented(K, K_tilde)
    print(f"General rate R_g(K, K~): {_fmt(general_rate(ch, aug), args.unit)}")
    return EXIT_OK


def cmd_optimize(args: argparse.Namespace) -> int:
    ch = _channel(args)
    cfg = _solver_config(args)
    if args.mode == "saddle":
        res = saddle_solve(ch, PowerBudget.from_snr_db(args.snr), cfg, pseudo=args.pseudo)
        print(f"Saddle value: {_fmt(res.value, args.unit)} after {res.iterations} outer iterations "
              f"(converged: {res.converged})")
        print(f"||A*||_2 = {np.linalg.norm(res.noise.A, 2):.4g}, ||B*||_F = {np.linalg.norm(res.noise.B):.4g}")
        values = res.outer_values
    else:
        trace = run_single(ch, args.snr, args.mode, cfg)
        print(f"{args.mode} / {cfg.method} at {args.snr:g} dB: {_fmt(trace.terminal_rate, args.unit)} "
              f"after {trace.iterations} iterations (converged: {trace.converged})")
        values = trace.objective_values
    if args.out:
        write_trace_csv(args.out, values, args.unit)
        print(f"Wrote trace to {args.out}")
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    if args.config:
        cfg = load_experiment_config(args.config)
    else:
        if not args.snr:
            raise ConfigError("give --snr or --config", field="snr_db")
        cfg = ExperimentConfig(
            snr_db=args.snr,
            channel_path=args.channel,
            mode=args.mode,
            methods=args.method,
            seeds=args.seed,
            out_dir=args.out,
            unit=args.unit,
            tol_increase=args.tol,
            max_iters=args.max_iters,
            random_start=args.random_start,
            improper_start=args.improper_start,
        )
    rows = run_sweep(cfg, progress=not args.quiet)
    for r in rows:
        print(f"{r.mode:8} {r.solver:20} {r.snr_db:6g} dB  seed {r.seed:<3} "
              f"{r.rate:.6f} {r.unit}  iters={r.iterations} converged={r.converged}")
    print(f"Wrote {len(rows)} traces and {config.SUMMARY_CSV_NAME} under {cfg.out_dir}")
    return EXIT_OK


def cmd_reproduce_table(args: argparse.Namespace) -> int:
    ch = load_channel(args.channel) if args.channel else None
    report = reproduce_table(ch, tol_increase=args.tol, max_iters=args.max_iters, progress=not args.quiet)
    print(format_report(report))
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_check_properties(args: argparse.Namespace) -> int:
    report = check_properties(
        scope=args.scope,
        instances=args.instances,
        seed=args.seed,
        inject_fault=args.inject_fault,
        progress=not args.quiet,
    )
    print(format_properties(report))
    return EXIT_OK if report.passed else EXIT_FAIL


# ---------- Parser / main ----------

def _add_solver_flags(p: argparse.ArgumentParser, many: bool = False) -> None:
    p.add_argument("--channel", type=Path, default=None,
                   help=f"Channel JSON with H_r / H_e as [re, im] pairs (default: {config.REFERENCE_CHANNEL_JSON.name})")
    p.add_argument("--tol", type=float, default=config.TOL_INCREASE, help="Stop when the increase drops below this")
    p.add_argument("--max-iters", type=int, default=config.MAX_ITERS)
    p.add_argument("--unit", choices=config.RATE_UNITS, default="nats")
    p.add_argument("--random-start", action="store_true", help="Random PSD start instead of (P/n_t) I")
    p.add_argument("--improper-start", action="store_true", help="General mode: start from a random improper covariance")
    if many:
        p.add_argument("--method", nargs="+", choices=config.SOLVER_METHODS, default=["projected-gradient"])
        p.add_argument("--seed", nargs="+", type=int, default=[0])
    else:
        p.add_argument("--method", choices=config.SOLVER_METHODS, default="projected-gradient")
        p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="mimo_secrecy",
        description="Secrecy rates of complex MIMO wiretap channels under proper and improper signaling",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    parser.add_argument("--quiet", action="store_true", help="No progress bars")
    sub = parser.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    p_rate = sub.add_parser("rate", help="Evaluate R_p / R_g for a given covariance")
    p_rate.add_argument("--channel", type=Path, default=None)
    p_rate.add_argument("--covariance", type=Path, default=None, help="JSON with K (and optional K_tilde)")
    p_rate.add_argument("--snr", type=float, default=6.0, help="SNR in dB for the white default covariance")
    p_rate.add_argument("--unit", choices=config.RATE_UNITS, default="nats")
    p_rate.set_defaults(func=cmd_rate)

    p_opt = sub.add_parser("optimize", help="Single optimization run")
    p_opt.add_argument("--mode", choices=("proper", "general", "saddle"), default="proper")
    p_opt.add_argument("--pseudo", action="store_true", help="Saddle mode: optimize the pseudo cross-covariance B too")
    p_opt.add_argument("--snr", type=float, default=6.0)
    p_opt.add_argument("--out", type=Path, default=None, help="Write the trace CSV here")
    _add_solver_flags(p_opt)
    p_opt.set_defaults(func=cmd_optimize)

    p_sweep = sub.add_parser("sweep", help="Run (SNR x mode x method x seed) and write traces + summary.csv")
    p_sweep.add_argument("--config", type=Path, default=None, help="Experiment JSON (overrides the flags below)")
    p_sweep.add_argument("--snr", type=float, nargs="+", default=None)
    p_sweep.add_argument("--mode", choices=("proper", "general", "both"), default="both")
    p_sweep.add_argument("--out", type=Path, default=config.OUTPUT_DIR)
    _add_solver_flags(p_sweep, many=True)
    p_sweep.set_defaults(func=cmd_sweep)

    p_tab = sub.add_parser("reproduce-table", help="Reproduce the 6 / 12 dB iteration-result table")
    p_tab.add_argument("--channel", type=Path, default=None)
    p_tab.add_argument("--tol", type=float, default=config.TOL_INCREASE)
    p_tab.add_argument("--max-iters", type=int, default=config.MAX_ITERS)
    p_tab.set_defaults(func=cmd_reproduce_table)

    p_prop = sub.add_parser("check-properties", help="Randomized property suites")
    p_prop.add_argument("--scope", choices=SCOPES + tuple(SCOPE_ALIASES), default="all")
    p_prop.add_argument("--instances", type=int, default=None, help="Override every suite's instance count")
    p_prop.add_argument("--seed", type=int, default=0)
    p_prop.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    p_prop.set_defaults(func=cmd_check_properties)

    return parser


def main(argv: List[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (SecrecyToolkitError, OSError) as e:
        log.error("%s", e)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
