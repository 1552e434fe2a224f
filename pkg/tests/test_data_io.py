import json
import math

import numpy as np
import pandas as pd
import pytest

from mimo_secrecy.config import REFERENCE_CHANNEL_JSON
from mimo_secrecy.data_io import (
    SUMMARY_COLUMNS,
    load_channel,
    load_covariance,
    load_experiment_config,
    read_trace_csv,
    write_channel,
    write_covariance,
    write_summary_csv,
    write_trace_csv,
)
from mimo_secrecy.errors import ConfigError, DimensionError
from mimo_secrecy.models import SummaryRow
from mimo_secrecy.secrecy_rates import random_channel


def test_reference_channel_file():
    ch = load_channel(REFERENCE_CHANNEL_JSON)
    assert ch.H_r.shape == (2, 2) and ch.H_e.shape == (2, 2)
    assert ch.H_r[0, 0] == 1.8 + 0.2j
    assert ch.H_e[1, 1] == -1.1 - 0.3j


def test_empty_channel_file(tmp_path):
    path = tmp_path / "empty.json"
    path.write_text("")
    with pytest.raises(ConfigError):
        load_channel(path)


def test_parse_error_reports_line(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{\n  "H_r": [[[1, 0]]],\n  "H_e": [[[1, 0]]\n}\n')
    with pytest.raises(ConfigError) as exc:
        load_channel(path)
    assert exc.value.line is not None


def test_bad_entry_reports_field(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"H_r": [[1.0, 2.0]], "H_e": [[[1.0, 0.0]]]}, indent=2))
    with pytest.raises(ConfigError) as exc:
        load_channel(path)
    assert exc.value.field == "H_r"
    assert exc.value.line == 2


def test_missing_key(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"H_r": [[[1.0, 0.0]]]}))
    with pytest.raises(ConfigError) as exc:
        load_channel(path)
    assert exc.value.field == "H_e"


def test_transmit_dimension_mismatch(tmp_path):
    path = tmp_path / "mismatch.json"
    pair = [1.0, 0.0]
    path.write_text(json.dumps({"H_r": [[pair] * 2] * 2, "H_e": [[pair] * 3] * 2}))
    with pytest.raises(DimensionError):
        load_channel(path)


def test_channel_round_trip_is_exact(tmp_path, rng):
    ch = random_channel(rng, 3, 2, 4)
    path = tmp_path / "ch.json"
    write_channel(path, ch)
    back = load_channel(path)
    assert np.array_equal(back.H_r, ch.H_r)
    assert np.array_equal(back.H_e, ch.H_e)


def test_covariance_file(tmp_path):
    path = tmp_path / "cov.json"
    write_covariance(path, np.eye(2))
    K, K_tilde = load_covariance(path)
    assert np.array_equal(K, np.eye(2))
    assert K_tilde is None


def test_trace_csv_header_and_units(tmp_path):
    path = tmp_path / "trace.csv"
    write_trace_csv(path, [0.5, math.log(2.0)], unit="bits")
    lines = path.read_text().splitlines()
    assert lines[0] == "iteration,objective_bits"
    df = read_trace_csv(path)
    assert list(df["iteration"]) == [0, 1]
    assert df["objective_bits"].iloc[1] == pytest.approx(1.0)


def test_summary_csv_columns(tmp_path):
    path = tmp_path / "summary.csv"
    rows = [SummaryRow("proper", "projected-gradient", 6.0, 1.9, "nats", 12, True, seed=3)]
    write_summary_csv(path, rows)
    assert path.read_text().splitlines()[0] == ",".join(SUMMARY_COLUMNS)
    df = pd.read_csv(path)
    assert df.loc[0, "iterations"] == 12
    assert bool(df.loc[0, "converged"])


def test_experiment_config_with_channel_path(tmp_path):
    write_channel(tmp_path / "ch.json", random_channel(np.random.default_rng(0), 2, 2, 2))
    cfg_path = tmp_path / "exp.json"
    cfg_path.write_text(json.dumps({"snr_db": [6, 12], "channel": "ch.json", "mode": "proper", "out_dir": "out"}))
    cfg = load_experiment_config(cfg_path)
    assert cfg.channel_path == tmp_path / "ch.json"
    assert cfg.out_dir == tmp_path / "out"
    assert cfg.modes == ("proper",)
    assert cfg.powers()[0] == pytest.approx(2 * 10 ** 0.6)


def test_experiment_config_inline_channel_and_errors(tmp_path):
    cfg_path = tmp_path / "exp.json"
    cfg_path.write_text(json.dumps({"snr_db": 6, "channel": {"H_r": [[[2, 0]]], "H_e": [[[1, 0]]]}}))
    cfg = load_experiment_config(cfg_path)
    assert cfg.channel.H_r[0, 0] == 2.0
    assert list(cfg.snr_db) == [6]

    cfg_path.write_text(json.dumps({"snr_db": [6], "colour": "blue"}))
    with pytest.raises(ConfigError) as exc:
        load_experiment_config(cfg_path)
    assert exc.value.field == "colour"

    cfg_path.write_text(json.dumps({"snr_db": []}))
    with pytest.raises(ConfigError):
        load_experiment_config(cfg_path)
