"""Batch runs: single optimizations, SNR sweeps and the reference-rate reproduction.

Solver runs execute one after another; every run writes to its own trace
file and the summary is assembled once all runs are done.
"""

from __future__ import annotations

import logging
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from tqdm import tqdm

from . import config
from .data_io import load_channel, write_summary_csv, write_trace_csv
from .models import (
    ChannelPair,
    ConvergenceTrace,
    ExperimentConfig,
    PowerBudget,
    ReproductionReport,
    SolverConfig,
    SummaryRow,
    convert_rate,
)
from .secrecy_rates import degradedness
from .solvers import maximize_general, maximize_proper

log = logging.getLogger(__name__)


def run_single(
    ch: ChannelPair,
    snr_db: float,
    mode: str,
    cfg: SolverConfig = SolverConfig(),
) -> ConvergenceTrace:
    budget = PowerBudget.from_snr_db(snr_db)
    if mode == "proper":
        return maximize_proper(ch, budget, cfg)
    if mode == "general":
        return maximize_general(ch, budget, cfg)
    raise ValueError(f"unknown signaling mode {mode!r}")


def trace_filename(mode: str, method: str, snr_db: float, seed: int) -> str:
    return f"trace_{mode}_{method}_snr{snr_db:g}_seed{seed}.csv"


def _resolve_channel(cfg: ExperimentConfig) -> ChannelPair:
    if cfg.channel is not None:
        return cfg.channel
    return load_channel(cfg.channel_path or config.REFERENCE_CHANNEL_JSON)


def run_sweep(cfg: ExperimentConfig, progress: bool = True) -> List[SummaryRow]:
    """One solver run per (SNR, mode, method, seed); writes traces and summary.csv under cfg.out_dir."""
    ch = _resolve_channel(cfg)
    jobs = [
        (snr, mode, method, seed)
        for snr in cfg.snr_db
        for mode in cfg.modes
        for method in cfg.methods
        for seed in cfg.seeds
    ]
    trace_dir = cfg.out_dir / config.TRACE_SUBDIR
    rows: List[SummaryRow] = []

    for snr, mode, method, seed in tqdm(jobs, desc="sweep", unit="run", disable=not progress):
        solver_cfg = SolverConfig(
            max_iters=cfg.max_iters,
            tol_increase=cfg.tol_increase,
            method=method,
            seed=seed,
            random_start=cfg.random_start,
            improper_start=cfg.improper_start,
        )
        trace = run_single(ch, snr, mode, solver_cfg)
        if not trace.converged:
            log.warning("%s/%s at %g dB (seed %d) did not converge", mode, method, snr, seed)
        write_trace_csv(trace_dir / trace_filename(mode, method, snr, seed), trace.objective_values, cfg.unit)
        rows.append(
            SummaryRow(
                mode=mode,
                solver=method,
                snr_db=float(snr),
                rate=convert_rate(trace.terminal_rate.value, "nats", cfg.unit),
                unit=cfg.unit,
                iterations=trace.iterations,
                converged=trace.converged,
                seed=seed,
            )
        )

    write_summary_csv(cfg.out_dir / config.SUMMARY_CSV_NAME, rows)
    log.info("sweep finished: %d runs, summary in %s", len(rows), cfg.out_dir)
    return rows


# ---------- Reference rates ----------

def _reference(mode: str, solver: str, snr: float) -> float:
    return config.REFERENCE_RATES[(mode, solver)][snr]


def resolve_unit(rows: Sequence[SummaryRow]) -> Tuple[Optional[str], Dict[str, float]]:
    """Pick the log base whose terminal rates sit within UNIT_MATCH_TOL of the reference table.

    Rows carry nats. Returns (unit or None, worst error per unit).
    """
    errors = {}
    for unit in config.RATE_UNITS:
        errors[unit] = max(
            abs(convert_rate(r.rate, "nats", unit) - _reference(r.mode, r.solver, r.snr_db)) for r in rows
        )
    matching = [u for u in config.RATE_UNITS if errors[u] <= config.UNIT_MATCH_TOL]
    unit = min(matching, key=errors.get) if matching else None
    return unit, errors


def _comparison_table(rows: Sequence[SummaryRow], unit: str) -> pd.DataFrame:
    records = []
    for (mode, solver), group in pd.DataFrame([r.__dict__ for r in rows]).groupby(["mode", "solver"], sort=False):
        rec = {"mode": mode, "solver": solver}
        for snr in config.REFERENCE_SNRS:
            nats = float(group.loc[group.snr_db == snr, "rate"].iloc[0])
            rec[f"rate_{snr:g}dB"] = convert_rate(nats, "nats", unit)
            rec[f"reference_{snr:g}dB"] = _reference(mode, solver, snr)
        records.append(rec)
    return pd.DataFrame.from_records(records)


def reproduce_table(
    ch: Optional[ChannelPair] = None,
    tol_increase: float = config.TOL_INCREASE,
    max_iters: int = config.MAX_ITERS,
    progress: bool = True,
) -> ReproductionReport:
    """Both solver methods x both modes at 6 and 12 dB on the built-in channel, with a verdict."""
    ch = ch or load_channel(config.REFERENCE_CHANNEL_JSON)

    deg = degradedness(ch)
    eig = (deg.min_eig, deg.max_eig)
    eig_ok = all(abs(a - b) <= config.EIGENVALUE_TOL for a, b in zip(eig, config.REFERENCE_EIGENVALUES))

    jobs = [
        (snr, mode, method)
        for method in config.SOLVER_METHODS
        for mode in config.SIGNALING_MODES
        for snr in config.REFERENCE_SNRS
    ]
    rows: List[SummaryRow] = []
    for snr, mode, method in tqdm(jobs, desc="reference rates", unit="run", disable=not progress):
        trace = run_single(ch, snr, mode, SolverConfig(max_iters=max_iters, tol_increase=tol_increase, method=method))
        rows.append(
            SummaryRow(mode, method, snr, trace.terminal_rate.value, "nats", trace.iterations, trace.converged)
        )

    unit, unit_errors = resolve_unit(rows)
    log.info("unit errors vs reference: %s", {u: f"{e:.2e}" for u, e in unit_errors.items()})
    shown = unit or "nats"

    gaps = []
    for method in config.SOLVER_METHODS:
        for snr in config.REFERENCE_SNRS:
            by_mode = {r.mode: r.rate for r in rows if r.solver == method and r.snr_db == snr}
            gaps.append(abs(convert_rate(by_mode["general"] - by_mode["proper"], "nats", shown)))
    max_gap = float(np.max(gaps))

    checks = {
        "eigenvalues": eig_ok,
        "unit_resolved": unit is not None,
        "table_match": unit is not None and unit_errors[unit] <= config.UNIT_MATCH_TOL,
        "proper_general_agreement": max_gap <= config.AGREEMENT_TOL,
    }
    return ReproductionReport(
        rows=rows,
        table=_comparison_table(rows, shown),
        unit=unit,
        eigenvalues=eig,
        checks=checks,
        max_agreement_gap=max_gap,
    )


def format_report(report: ReproductionReport) -> str:
    lines = [
        "== Iteration results (terminal secrecy rate) ==",
        report.table.to_string(index=False, float_format=lambda v: f"{v:.5f}"),
        "",
        f"Delta eigenvalues: {report.eigenvalues[0]:.4f} / {report.eigenvalues[1]:.4f} "
        f"(reference {config.REFERENCE_EIGENVALUES[0]} / {config.REFERENCE_EIGENVALUES[1]})",
        f"Resolved rate unit: {report.unit or 'none matched'}",
        f"Max proper/general gap: {report.max_agreement_gap:.2e}",
    ]
    for name, ok in report.checks.items():
        lines.append(f"  [{'ok' if ok else 'FAIL'}] {name}")
    lines.append(f"Verdict: {'PASS' if report.passed else 'FAIL'}")
    return "\n".join(lines)
