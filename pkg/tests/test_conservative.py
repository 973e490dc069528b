"""Unit tests for the closed-ensemble simulation."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from betsim import rng as rngmod
from betsim.conservative import (
    ConservativeConfig,
    draw_pairing,
    init_ensemble,
    resolve_bet,
    run_conservative,
    smooth_series,
    step_conservative,
)
from betsim.core import posterior_win_many


def test_init_ensemble_virtual_win():
    state = init_ensemble(5)
    assert state.wins.tolist() == [1, 1, 1, 1, 1]
    assert state.losses.tolist() == [0, 0, 0, 0, 0]
    assert state.posteriors().tolist() == [1.0] * 5


def test_init_ensemble_too_small():
    with pytest.raises(ValueError):
        init_ensemble(1)


def test_config_validation():
    with pytest.raises(ValueError, match="n_microstates"):
        ConservativeConfig(steps=1, n_microstates=1)
    with pytest.raises(ValueError, match="bets_per_step"):
        ConservativeConfig(steps=1, n_microstates=4, bets_per_step=3)
    with pytest.raises(ValueError, match="steps"):
        ConservativeConfig(steps=-1)
    with pytest.raises(ValueError, match="seed"):
        ConservativeConfig(steps=1, seed=-3)
    with pytest.raises(ValueError, match="smoothing_window"):
        ConservativeConfig(steps=1, smoothing_window=0)


def test_with_seed_returns_new_config():
    cfg = ConservativeConfig(steps=3, seed=1)
    other = cfg.with_seed(9)
    assert other.seed == 9 and cfg.seed == 1
    assert other.steps == cfg.steps


# ---------------------------------------------------------------------------
# pairing and bet resolution

def test_draw_pairing_disjoint_and_sized():
    rng = rngmod.stream(0, rngmod.GENERIC)
    pairs = draw_pairing(10, 4, rng)
    assert len(pairs) == 4
    flat = [i for p in pairs for i in p]
    assert len(set(flat)) == 8
    assert all(0 <= i < 10 for i in flat)


def test_draw_pairing_rejects_overdraw():
    rng = rngmod.stream(0, rngmod.GENERIC)
    with pytest.raises(ValueError, match="disjoint pairs"):
        draw_pairing(5, 3, rng)
    with pytest.raises(ValueError, match="bets_per_step"):
        draw_pairing(5, 0, rng)


def test_draw_pairing_deterministic_per_stream():
    a = draw_pairing(20, 5, rngmod.stream(7, rngmod.BETS, 0, 3))
    b = draw_pairing(20, 5, rngmod.stream(7, rngmod.BETS, 0, 3))
    assert a == b


def test_resolve_bet_returns_winner_loser():
    rng = rngmod.stream(1, rngmod.GENERIC)
    seen = set()
    for _ in range(50):
        winner, loser = resolve_bet((3, 8), rng)
        assert {winner, loser} == {3, 8}
        seen.add(winner)
    assert seen == {3, 8}, "fair coin should pick both sides eventually"


def test_resolve_bet_rejects_self_pair():
    with pytest.raises(ValueError, match="itself"):
        resolve_bet((4, 4), rngmod.stream(0, rngmod.GENERIC))


# ---------------------------------------------------------------------------
# stepping

def test_step_forced_validations():
    state = init_ensemble(6)
    with pytest.raises(ValueError, match="itself"):
        step_conservative(state, None, forced=[((2, 2), 2)])
    with pytest.raises(ValueError, match="not part of pair"):
        step_conservative(state, None, forced=[((0, 1), 2)])
    with pytest.raises(ValueError, match="disjoint"):
        step_conservative(state, None, forced=[((0, 1), 0), ((1, 2), 2)])
    with pytest.raises(ValueError, match="rng required"):
        step_conservative(state, None)


def test_step_forced_books_one_win_one_loss():
    state = init_ensemble(4)
    step_conservative(state, None, forced=[((0, 3), 3)])
    assert state.wins.tolist() == [1, 1, 1, 2]
    assert state.losses.tolist() == [1, 0, 0, 0]


@settings(max_examples=60, deadline=None)
@given(
    n=st.integers(2, 30),
    seed=st.integers(0, 2**32 - 1),
    steps=st.integers(0, 40),
    data=st.data(),
)
def test_conservation_invariant(n, seed, steps, data):
    """Total wins minus total losses equals the population size forever."""
    bets = data.draw(st.integers(1, n // 2))
    state = init_ensemble(n)
    for t in range(steps):
        step_conservative(state, rngmod.stream(seed, rngmod.BETS, 0, t), bets_per_step=bets)
        totals = state.totals
        assert totals.total_wins - totals.total_losses == n
        assert totals.total_losses == bets * (t + 1)


# ---------------------------------------------------------------------------
# smoothing

def _brute_smooth(values, window):
    return [
        float(np.mean(values[max(0, i - window + 1): i + 1]))
        for i in range(len(values))
    ]


@given(
    values=st.lists(st.floats(-10, 10, allow_nan=False, width=32), min_size=0, max_size=50),
    window=st.integers(1, 60),
)
def test_smooth_series_matches_brute_force(values, window):
    got = smooth_series(values, window)
    assert got.shape == (len(values),)
    expect = _brute_smooth(values, window)
    assert np.allclose(got, expect, atol=1e-9)


def test_smooth_series_window_one_is_identity():
    x = [0.2, 0.9, 0.4]
    assert np.allclose(smooth_series(x, 1), x, atol=1e-12)


def test_smooth_series_rejects_bad_window():
    with pytest.raises(ValueError):
        smooth_series([1.0], 0)


# ---------------------------------------------------------------------------
# full runs

def test_run_snapshot_count_and_steps():
    traj = run_conservative(ConservativeConfig(steps=17, n_microstates=8, seed=2))
    assert len(traj.snapshots) == 18
    assert [s.step for s in traj.snapshots] == list(range(18))
    assert traj.per_microstate is None


def test_run_zero_steps():
    traj = run_conservative(ConservativeConfig(steps=0, n_microstates=4, seed=0))
    assert len(traj.snapshots) == 1
    assert traj.snapshots[0].mean_posterior == 1.0


def test_run_reproducible_and_seed_sensitive():
    cfg = ConservativeConfig(steps=200, n_microstates=12, bets_per_step=3, seed=4)
    a = run_conservative(cfg)
    b = run_conservative(cfg)
    means_a = [s.mean_posterior for s in a.snapshots]
    assert means_a == [s.mean_posterior for s in b.snapshots]
    c = run_conservative(cfg.with_seed(5))
    assert means_a != [s.mean_posterior for s in c.snapshots]


def test_run_recorded_ledgers_consistent():
    cfg = ConservativeConfig(steps=25, n_microstates=6, bets_per_step=2, seed=9)
    traj = run_conservative(cfg, record_microstates=True)
    assert traj.per_microstate is not None
    assert len(traj.per_microstate) == 26
    for t, led in enumerate(traj.per_microstate):
        assert int(led.wins.sum()) == 6 + 2 * t
        assert int(led.losses.sum()) == 2 * t
        assert np.array_equal(led.posteriors, posterior_win_many(led.wins, led.losses))
        snap = traj.snapshots[t]
        assert snap.mean_posterior == pytest.approx(float(led.posteriors.mean()))


def test_run_smoothed_series_definition():
    cfg = ConservativeConfig(steps=40, n_microstates=10, seed=3, smoothing_window=7)
    traj = run_conservative(cfg)
    means = [s.mean_posterior for s in traj.snapshots]
    assert np.allclose(traj.smoothed_mean_posterior, smooth_series(means, 7))


def test_run_entropy_bounded_by_pair_count():
    cfg = ConservativeConfig(steps=300, n_microstates=14, bets_per_step=3, seed=6)
    traj = run_conservative(cfg)
    cap = math.log(math.comb(14, 2))
    assert all(s.entropy <= cap + 1e-12 for s in traj.snapshots)


def test_run_forced_schedule_length_checked():
    cfg = ConservativeConfig(steps=3, n_microstates=5, bets_per_step=2, seed=0)
    with pytest.raises(ValueError, match="forced_schedule"):
        run_conservative(cfg, forced_schedule=[[((0, 1), 0)]])
