"""Unit tests for configuration parsing and CSV input/output."""

import math
import os

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from betsim import io as csvio
from betsim.config import (
    InferenceConfig,
    IoConfig,
    RunConfig,
    SuperstatConfig,
    emit_config,
    parse_config,
)
from betsim.conservative import ConservativeConfig, run_conservative
from betsim.dissipative import DissipativeConfig, run_dissipative
from betsim.errors import ConfigError, DataError
from betsim.inference import GAUSSIAN_KNOWN_MEAN, InvGammaParams, ModelPosterior, ModelSpec
from betsim.superstat import ReturnSeries


# ---------------------------------------------------------------------------
# config documents

def test_parse_minimal_document():
    cfg = parse_config("[conservative]\nsteps = 5\n")
    assert cfg.conservative is not None
    assert cfg.conservative.steps == 5
    assert cfg.conservative.n_microstates == 50  # default
    assert cfg.dissipative is None and cfg.io is None


def test_parse_full_document():
    text = """
[dissipative]
steps = 100
grain_sizes = 150, 225, 425, 750
seed = 7
bets_per_grain = 2
injection_prob = 0.1
injection_size_range = 50, 200
removal_prob = 0.05
removal_policy = closest-to-equilibrium
eps_eq = 0.05
sustain = 50

[io]
input = data/prices.csv
write_microstates = false
histogram_bins = 32
histogram_every = 10
"""
    cfg = parse_config(text)
    assert cfg.dissipative.grain_sizes == (150, 225, 425, 750)
    assert cfg.dissipative.bets_per_grain == 2
    assert cfg.dissipative.removal_policy == "closest-to-equilibrium"
    assert cfg.io.write_microstates is False
    assert cfg.io.input == "data/prices.csv"


def test_round_trip_all_sections():
    cfg = RunConfig(
        conservative=ConservativeConfig(
            steps=11, n_microstates=9, bets_per_step=2, seed=3, smoothing_window=4, eps_class=1e-8
        ),
        dissipative=DissipativeConfig(
            steps=7,
            grain_sizes=(5, 9),
            seed=1,
            bets_fraction=0.25,
            injection_prob=0.125,
            removal_prob=0.0625,
            removal_policy="random",
        ),
        superstat=SuperstatConfig(
            kind="generalized-inverse-gamma", alpha=2.5, beta=1.25, gamma=1.75, n=64, tau=4, seed=2
        ),
        inference=InferenceConfig(mu=0.5, prior_alpha=2.75, prior_beta=1.125),
        io=IoConfig(input="x.csv", write_microstates=False, histogram_bins=10, histogram_every=5),
    )
    assert parse_config(emit_config(cfg)) == cfg


def test_round_trip_unset_optional_stays_unset():
    cfg = RunConfig(dissipative=DissipativeConfig(steps=3))
    text = emit_config(cfg)
    assert "bets_per_grain" not in text
    back = parse_config(text)
    assert back.dissipative.bets_per_grain is None
    with_budget = RunConfig(dissipative=DissipativeConfig(steps=3, bets_per_grain=1))
    assert parse_config(emit_config(with_budget)).dissipative.bets_per_grain == 1


@given(
    steps=st.integers(0, 10_000),
    seed=st.integers(0, 2**31),
    frac=st.floats(0.01, 1.0, allow_nan=False),
    eps=st.floats(1e-6, 0.5, allow_nan=False),
)
def test_round_trip_preserves_exact_floats(steps, seed, frac, eps):
    cfg = RunConfig(
        dissipative=DissipativeConfig(steps=steps, seed=seed, bets_fraction=frac, eps_eq=eps)
    )
    back = parse_config(emit_config(cfg))
    assert back.dissipative.bets_fraction == frac
    assert back.dissipative.eps_eq == eps


def test_parse_rejects_unknown_section():
    with pytest.raises(ConfigError, match="unknown section"):
        parse_config("[market]\nsteps = 1\n")


def test_parse_rejects_unknown_key():
    with pytest.raises(ConfigError, match="unknown key"):
        parse_config("[conservative]\nsteps = 1\nwarmup = 5\n")


def test_parse_keys_are_case_sensitive():
    with pytest.raises(ConfigError, match="unknown key"):
        parse_config("[conservative]\nSteps = 1\n")


def test_parse_rejects_bad_value():
    with pytest.raises(ConfigError, match="bad value"):
        parse_config("[conservative]\nsteps = lots\n")
    with pytest.raises(ConfigError, match="bad value"):
        parse_config("[io]\nwrite_microstates = yes\n")


def test_parse_requires_steps():
    with pytest.raises(ConfigError, match="requires key 'steps'"):
        parse_config("[conservative]\nseed = 1\n")


def test_parse_rejects_invariant_violation():
    with pytest.raises(ConfigError, match="invalid \\[conservative\\]"):
        parse_config("[conservative]\nsteps = -4\n")


def test_parse_rejects_duplicate_section():
    with pytest.raises(ConfigError, match="syntax"):
        parse_config("[io]\ninput = a\n[io]\ninput = b\n")


# ---------------------------------------------------------------------------
# price ingestion

def _write_prices(path, rows, header="t,price"):
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(str(c) for c in row) + "\n")


def test_ingest_log_returns(tmp_path):
    path = tmp_path / "prices.csv"
    prices = [100.0, 105.0, 103.0, 110.0]
    _write_prices(path, list(enumerate(prices)))
    series = csvio.ingest_price_csv(str(path), tau=1)
    assert series.tau == 1
    assert series.seed is None
    expect = [math.log(prices[i + 1] / prices[i]) for i in range(3)]
    assert np.allclose(series.samples, expect, atol=1e-15)


def test_ingest_multi_step_horizon(tmp_path):
    path = tmp_path / "prices.csv"
    prices = [100.0, 105.0, 103.0, 110.0, 99.0]
    _write_prices(path, list(enumerate(prices)))
    series = csvio.ingest_price_csv(str(path), tau=2)
    assert len(series.samples) == 3
    assert series.samples[0] == pytest.approx(math.log(103.0 / 100.0))


def test_ingest_accepts_date_header(tmp_path):
    path = tmp_path / "prices.csv"
    _write_prices(
        path,
        [("2024-01-02", 10.0), ("2024-01-03", 11.0), ("2024-01-04", 12.0)],
        header="date,price",
    )
    series = csvio.ingest_price_csv(str(path), tau=1)
    assert len(series.samples) == 2


def test_ingest_missing_file():
    with pytest.raises(DataError):
        csvio.ingest_price_csv("/nonexistent/prices.csv", tau=1)


def test_ingest_rejects_bad_header(tmp_path):
    path = tmp_path / "prices.csv"
    _write_prices(path, [(0, 1.0)], header="time;price")
    with pytest.raises(DataError, match="header"):
        csvio.ingest_price_csv(str(path), tau=1)


def test_ingest_rejects_wrong_field_count(tmp_path):
    path = tmp_path / "prices.csv"
    with open(path, "w") as fh:
        fh.write("t,price\n0,1.0,extra\n")
    with pytest.raises(DataError, match="line 2"):
        csvio.ingest_price_csv(str(path), tau=1)


def test_ingest_rejects_nonpositive_price(tmp_path):
    path = tmp_path / "prices.csv"
    _write_prices(path, [(0, 5.0), (1, 0.0), (2, 5.0)])
    with pytest.raises(DataError, match="line 3"):
        csvio.ingest_price_csv(str(path), tau=1)


def test_ingest_rejects_nonincreasing_time(tmp_path):
    path = tmp_path / "prices.csv"
    _write_prices(path, [(0, 5.0), (2, 5.5), (1, 6.0)])
    with pytest.raises(DataError, match="increas"):
        csvio.ingest_price_csv(str(path), tau=1)


def test_ingest_needs_enough_rows(tmp_path):
    path = tmp_path / "prices.csv"
    _write_prices(path, [(0, 5.0), (1, 5.5)])
    with pytest.raises(DataError, match="rows"):
        csvio.ingest_price_csv(str(path), tau=2)


# ---------------------------------------------------------------------------
# return series files

def test_returns_round_trip_exact(tmp_path):
    path = str(tmp_path / "returns.csv")
    samples = np.random.default_rng(0).normal(0, 1e-3, 50)
    csvio.emit_returns_csv(ReturnSeries(tau=3, samples=samples), path)
    back = csvio.read_returns_csv(path, tau=3)
    assert back.tau == 3
    assert np.array_equal(back.samples, samples), "full-precision round trip"


def test_read_returns_rejects_bad_header(tmp_path):
    path = tmp_path / "returns.csv"
    path.write_text("index,ret\n0,0.1\n")
    with pytest.raises(DataError, match="header"):
        csvio.read_returns_csv(str(path))


def test_read_returns_rejects_bad_value(tmp_path):
    path = tmp_path / "returns.csv"
    path.write_text("i,value\n0,0.1\n1,abc\n")
    with pytest.raises(DataError, match="line 3"):
        csvio.read_returns_csv(str(path))


# ---------------------------------------------------------------------------
# simulation emitters

def test_trajectory_csv_layout(tmp_path):
    traj = run_conservative(ConservativeConfig(steps=6, n_microstates=8, seed=1))
    path = str(tmp_path / "trajectory.csv")
    csvio.emit_trajectory_csv(traj, path)
    lines = open(path).read().splitlines()
    assert lines[0] == csvio.TRAJECTORY_HEADER
    assert len(lines) == 1 + 7
    first = lines[1].split(",")
    assert first[0] == "0"
    assert float(first[1]) == traj.snapshots[0].mean_posterior


def test_microstates_csv_needs_recording(tmp_path):
    traj = run_conservative(ConservativeConfig(steps=2, n_microstates=4, seed=0))
    with pytest.raises(DataError, match="microstate"):
        csvio.emit_microstates_csv(traj, str(tmp_path / "m.csv"))


def test_microstates_csv_layout(tmp_path):
    traj = run_conservative(
        ConservativeConfig(steps=2, n_microstates=4, seed=0), record_microstates=True
    )
    path = str(tmp_path / "m.csv")
    csvio.emit_microstates_csv(traj, path)
    lines = open(path).read().splitlines()
    assert lines[0] == "step,microstate,wins,losses,posterior"
    assert len(lines) == 1 + 3 * 4
    assert lines[1] == "0,0,1,0,1"


def test_histogram_csv_layout(tmp_path):
    result = run_dissipative(DissipativeConfig(steps=3, grain_sizes=(6, 9), seed=2), bins=4)
    snap = result.pooled[-1]
    path = str(tmp_path / "h.csv")
    csvio.emit_histogram_csv(snap, path)
    lines = open(path).read().splitlines()
    assert lines[0] == "bin_left,bin_right,count"
    assert len(lines) == 5
    counts = [int(line.split(",")[2]) for line in lines[1:]]
    assert sum(counts) == 15


def test_grains_csv_layout(tmp_path):
    result = run_dissipative(DissipativeConfig(steps=2, grain_sizes=(6, 4), seed=3))
    path = str(tmp_path / "g.csv")
    csvio.emit_grains_csv(result.grain_tracks, path)
    lines = open(path).read().splitlines()
    assert lines[0] == "step,grain,size,birth_step,mean_posterior,entropy"
    assert len(lines) == 1 + 2 * 3
    # grain ids in sorted order, three snapshots each
    assert [line.split(",")[1] for line in lines[1:4]] == ["0", "0", "0"]
    assert lines[1].split(",")[2] == "6"


def test_fit_csv_layout(tmp_path):
    path = str(tmp_path / "fit.csv")
    csvio.emit_fit_csv([("n", 10), ("posterior_alpha", 8.0)], path)
    lines = open(path).read().splitlines()
    assert lines[0] == "quantity,value"
    assert lines[1] == "n,10"
    assert lines[2] == "posterior_alpha,8"


def test_models_csv_marks_selection(tmp_path):
    prior = InvGammaParams(3.0, 2.0)
    specs = [
        ModelSpec(id="a", likelihood_kind=GAUSSIAN_KNOWN_MEAN, prior=prior),
        ModelSpec(id="b", likelihood_kind=GAUSSIAN_KNOWN_MEAN, prior=prior),
    ]
    posteriors = [
        ModelPosterior("a", 0.5, -10.0, 0.8),
        ModelPosterior("b", 0.5, -11.0, 0.2),
    ]
    path = str(tmp_path / "models.csv")
    csvio.emit_models_csv(posteriors, specs, 0, path)
    lines = open(path).read().splitlines()
    assert lines[0].startswith("model,")
    assert lines[1].split(",")[-1] == "1"
    assert lines[2].split(",")[-1] == "0"

    tie = [ModelPosterior("a", 0.5, -10.0, 0.5), ModelPosterior("b", 0.5, -10.0, 0.5)]
    csvio.emit_models_csv(tie, specs, None, path)
    lines = open(path).read().splitlines()
    assert lines[1].split(",")[-1] == "tie"
    assert lines[2].split(",")[-1] == "tie"


def test_ensure_out_dir(tmp_path):
    target = str(tmp_path / "a" / "b")
    csvio.ensure_out_dir(target)
    csvio.ensure_out_dir(target)  # idempotent
    assert os.path.isdir(target)
