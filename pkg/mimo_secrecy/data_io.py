"""Small I/O helpers: channel / covariance JSON, trace and summary CSVs."""

from __future__ import annotations

import csv
import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

import numpy as np
import pandas as pd

from .errors import ConfigError
from .models import ChannelPair, ExperimentConfig, SummaryRow, convert_rate

log = logging.getLogger(__name__)

SUMMARY_COLUMNS = ["mode", "solver", "snr_db", "rate", "unit", "iterations", "converged"]


def ensure_parent(path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)


def write_json(path: Path, obj) -> None:
    ensure_parent(path)
    with path.open("w", encoding="utf-8") as f:
        json.dump(obj, f, indent=2)


def write_csv(path: Path, rows: Iterable[Dict[str, Any]], fieldnames) -> None:
    ensure_parent(path)
    with path.open("w", encoding="utf-8", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=fieldnames, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


# ---------- Complex matrices as [re, im] pairs ----------

def _line_of(text: str, key: str) -> Optional[int]:
    pos = text.find(f'"{key}"')
    return None if pos < 0 else text.count("\n", 0, pos) + 1


def _parse_json_text(path: Path) -> tuple[dict, str]:
    text = path.read_text(encoding="utf-8")
    if not text.strip():
        raise ConfigError(f"{path} is empty", line=1)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"cannot parse {path}: {e.msg}", line=e.lineno) from e
    if not isinstance(doc, dict):
        raise ConfigError(f"{path} must hold a JSON object", line=1)
    return doc, text


def decode_matrix(raw, key: str, line: Optional[int] = None) -> np.ndarray:
    """[[[re, im], ...], ...] -> complex 2-D array."""
    try:
        arr = np.asarray(raw, dtype=float)
    except (TypeError, ValueError) as e:
        raise ConfigError("entries must be numeric [re, im] pairs", field=key, line=line) from e
    if arr.ndim != 3 or arr.shape[2] != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
        raise ConfigError(
            f"expected a non-empty rows x cols x 2 array, got shape {arr.shape}", field=key, line=line
        )
    return arr[..., 0] + 1j * arr[..., 1]


def encode_matrix(M: np.ndarray) -> List[List[List[float]]]:
    M = np.asarray(M, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in M]


def _matrix_field(doc: dict, text: str, key: str, required: bool = True) -> Optional[np.ndarray]:
    if key not in doc:
        if required:
            raise ConfigError("missing key", field=key)
        return None
    return decode_matrix(doc[key], key, _line_of(text, key))


def load_channel(path: Path) -> ChannelPair:
    """Read {"H_r": ..., "H_e": ...} with [re, im] entries; n_t mismatch raises DimensionError."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"channel file not found: {path}")
    doc, text = _parse_json_text(path)
    ch = ChannelPair(_matrix_field(doc, text, "H_r"), _matrix_field(doc, text, "H_e"))
    log.debug("loaded channel %s: n_t=%d n_r=%d n_e=%d", path, ch.n_t, ch.n_r, ch.n_e)
    return ch


def write_channel(path: Path, ch: ChannelPair) -> None:
    write_json(Path(path), {"H_r": encode_matrix(ch.H_r), "H_e": encode_matrix(ch.H_e)})


def load_covariance(path: Path) -> tuple[np.ndarray, Optional[np.ndarray]]:
    """Read {"K": ..., "K_tilde": ...}; K_tilde is optional (None when absent)."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"covariance file not found: {path}")
    doc, text = _parse_json_text(path)
    return _matrix_field(doc, text, "K"), _matrix_field(doc, text, "K_tilde", required=False)


def write_covariance(path: Path, K: np.ndarray, K_tilde: Optional[np.ndarray] = None) -> None:
    doc = {"K": encode_matrix(K)}
    if K_tilde is not None:
        doc["K_tilde"] = encode_matrix(K_tilde)
    write_json(Path(path), doc)


# ---------- Traces and summaries ----------

def write_trace_csv(path: Path, values: Sequence[float], unit: str = "nats") -> None:
    """One row per accepted iteration; values arrive in nats and are converted here only."""
    column = f"objective_{unit}"
    rows = ({"iteration": i, column: repr(convert_rate(v, "nats", unit))} for i, v in enumerate(values))
    write_csv(Path(path), rows, ["iteration", column])


def read_trace_csv(path: Path) -> pd.DataFrame:
    return pd.read_csv(path)


def summary_frame(rows: Sequence[SummaryRow]) -> pd.DataFrame:
    df = pd.DataFrame([{c: getattr(r, c) for c in SUMMARY_COLUMNS} for r in rows], columns=SUMMARY_COLUMNS)
    return df


def write_summary_csv(path: Path, rows: Sequence[SummaryRow]) -> None:
    ensure_parent(Path(path))
    summary_frame(rows).to_csv(path, index=False, float_format="%.10g")


# ---------- Experiment config ----------

_EXPERIMENT_KEYS = {
    "snr_db", "channel", "mode", "methods", "seeds", "out_dir", "unit",
    "tol_increase", "max_iters", "random_start", "improper_start",
}


def load_experiment_config(path: Path, base_dir: Optional[Path] = None) -> ExperimentConfig:
    """JSON experiment file. "channel" is either a path (relative to the file) or inline H_r/H_e."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"experiment file not found: {path}")
    doc, text = _parse_json_text(path)
    unknown = set(doc) - _EXPERIMENT_KEYS
    if unknown:
        key = sorted(unknown)[0]
        raise ConfigError("unknown key", field=key, line=_line_of(text, key))
    if "snr_db" not in doc:
        raise ConfigError("missing key", field="snr_db")

    base_dir = base_dir or path.parent
    kwargs: Dict[str, Any] = {k: doc[k] for k in doc if k != "channel"}
    if isinstance(kwargs.get("snr_db"), (int, float)):
        kwargs["snr_db"] = [kwargs["snr_db"]]
    if "out_dir" in kwargs:
        kwargs["out_dir"] = base_dir / kwargs["out_dir"]

    channel = doc.get("channel")
    if isinstance(channel, str):
        kwargs["channel_path"] = base_dir / channel
    elif isinstance(channel, dict):
        kwargs["channel"] = ChannelPair(
            _matrix_field(channel, text, "H_r"), _matrix_field(channel, text, "H_e")
        )
    elif channel is not None:
        raise ConfigError("channel must be a file path or an object with H_r / H_e", field="channel")

    return ExperimentConfig(**kwargs)
