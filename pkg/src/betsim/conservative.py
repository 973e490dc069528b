"""Closed-ensemble betting simulation.

A fixed population of participants, each initialized with one win and
zero losses, bets pairwise on fair coin flips.  Every bet adds exactly
one win and one loss, so total_wins - total_losses stays pinned at the
population size while the posterior population spreads out and the
ensemble mean decays toward 0.5.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import rng as rngmod
from .core import (
    EPS_CLASS,
    EnsembleState,
    MacroSnapshot,
    macro_snapshot,
)

DEFAULT_SMOOTHING_WINDOW = 25

# a forced bet: ((i, j), winner) with winner one of i, j
ForcedBet = tuple[tuple[int, int], int]


@dataclass(frozen=True)
class ConservativeConfig:
    """Parameters of one closed-ensemble run.

    ``steps`` may be 0, in which case the trajectory is just the
    initial snapshot.
    """

    steps: int
    n_microstates: int = 50
    bets_per_step: int = 1
    seed: int = 0
    smoothing_window: int = DEFAULT_SMOOTHING_WINDOW
    eps_class: float = EPS_CLASS

    def __post_init__(self):
        if self.n_microstates < 2:
            raise ValueError("n_microstates must be >= 2")
        if not 1 <= self.bets_per_step <= self.n_microstates // 2:
            raise ValueError(
                f"bets_per_step must be in [1, {self.n_microstates // 2}] "
                f"for {self.n_microstates} microstates"
            )
        if self.steps < 0:
            raise ValueError("steps must be >= 0")
        if self.seed < 0:
            raise ValueError("seed must be a nonnegative 64-bit integer")
        if self.smoothing_window < 1:
            raise ValueError("smoothing_window must be >= 1")
        if self.eps_class <= 0:
            raise ValueError("eps_class must be positive")

    def with_seed(self, seed: int) -> "ConservativeConfig":
        return replace(self, seed=seed)


@dataclass(frozen=True)
class StepLedgers:
    """Compact per-step copy of every ledger, for optional recording."""

    wins: np.ndarray
    losses: np.ndarray
    posteriors: np.ndarray


@dataclass
class Trajectory:
    """Per-step snapshots of one run, including the initial state.

    ``snapshots`` has length steps + 1.  ``smoothed_mean_posterior`` is
    the trailing moving average of the mean-posterior series, aligned
    with ``snapshots``.  ``per_microstate`` is populated only when the
    run records individual ledgers.
    """

    snapshots: list[MacroSnapshot] = field(default_factory=list)
    smoothed_mean_posterior: np.ndarray = field(default_factory=lambda: np.zeros(0))
    per_microstate: list[StepLedgers] | None = None


def init_ensemble(n: int) -> EnsembleState:
    """Fresh ensemble: every participant at (wins=1, losses=0), posterior 1."""
    if n < 2:
        raise ValueError(f"an ensemble needs at least 2 microstates, got {n}")
    return EnsembleState(np.ones(n, dtype=np.int64), np.zeros(n, dtype=np.int64))


def draw_pairing(
    ensemble: EnsembleState | int, bets_per_step: int, rng: np.random.Generator
) -> list[tuple[int, int]]:
    """Uniformly random disjoint unordered pairs of participant indices.

    Implemented as a Fisher-Yates shuffle (numpy's permutation) of the
    index range, taking the leading 2*bets_per_step entries pairwise;
    the prefix of a full shuffle is distributed identically to a
    partial shuffle.  Deterministic given the generator state.
    """
    n = ensemble if isinstance(ensemble, int) else ensemble.size
    if bets_per_step < 1:
        raise ValueError("bets_per_step must be >= 1")
    if 2 * bets_per_step > n:
        raise ValueError(f"cannot draw {bets_per_step} disjoint pairs from {n} microstates")
    idx = rng.permutation(n)[: 2 * bets_per_step]
    return [(int(idx[2 * b]), int(idx[2 * b + 1])) for b in range(bets_per_step)]


def resolve_bet(pair: tuple[int, int], rng: np.random.Generator) -> tuple[int, int]:
    """Fair coin picks the winner; returns (winner, loser)."""
    i, j = pair
    if i == j:
        raise ValueError(f"a participant cannot bet against itself (pair {pair})")
    return (i, j) if rng.integers(0, 2) == 0 else (j, i)


def step_conservative(
    state: EnsembleState,
    rng: np.random.Generator | None,
    bets_per_step: int = 1,
    forced: list[ForcedBet] | None = None,
) -> EnsembleState:
    """Advance the ensemble by one step of pairwise betting, in place.

    With ``forced`` given, the explicit (pair, winner) list is applied
    instead of random pairing/outcomes; this mode exists for replaying
    hand-specified bet sequences in tests and demos.
    """
    if forced is not None:
        seen: set[int] = set()
        for (i, j), winner in forced:
            if i == j:
                raise ValueError(f"a participant cannot bet against itself (pair {(i, j)})")
            if winner not in (i, j):
                raise ValueError(f"winner {winner} is not part of pair {(i, j)}")
            if i in seen or j in seen:
                raise ValueError("forced pairs must be disjoint within one step")
            seen.update((i, j))
        outcomes = [((i, j), winner) for (i, j), winner in forced]
        resolved = [(w, j if w == i else i) for (i, j), w in outcomes]
    else:
        if rng is None:
            raise ValueError("rng required unless a forced bet list is given")
        pairs = draw_pairing(state, bets_per_step, rng)
        resolved = [resolve_bet(pair, rng) for pair in pairs]
    for winner, loser in resolved:
        state.wins[winner] += 1
        state.losses[loser] += 1
    # every bet books one win and one loss; the gap stays at the size
    assert int(state.wins.sum() - state.losses.sum()) == state.size
    return state


def smooth_series(values, window: int) -> np.ndarray:
    """Trailing moving average; the first window-1 entries average the
    available prefix so the series stays causal and the same length."""
    if window < 1:
        raise ValueError("window must be >= 1")
    v = np.asarray(values, dtype=np.float64)
    if v.size == 0:
        return v.copy()
    c = np.cumsum(v)
    out = np.empty_like(v)
    head = min(window, v.size)
    out[:head] = c[:head] / np.arange(1, head + 1)
    if v.size > window:
        out[window:] = (c[window:] - c[:-window]) / window
    return out


def run_conservative(
    config: ConservativeConfig,
    record_microstates: bool = False,
    forced_schedule: list[list[ForcedBet]] | None = None,
) -> Trajectory:
    """Run a full closed-ensemble simulation.

    Each step draws its betting randomness from an independent stream
    keyed on (seed, step), so replays are bit-identical and unrelated
    runs can execute in parallel.  ``forced_schedule`` (one forced bet
    list per step) replaces the random schedule when given; its length
    must equal ``config.steps``.
    """
    if forced_schedule is not None and len(forced_schedule) != config.steps:
        raise ValueError("forced_schedule length must equal config.steps")
    state = init_ensemble(config.n_microstates)
    snapshots = [macro_snapshot(state, 0, config.eps_class)]
    per: list[StepLedgers] | None = [] if record_microstates else None
    if per is not None:
        per.append(StepLedgers(state.wins.copy(), state.losses.copy(), state.posteriors()))
    for t in range(1, config.steps + 1):
        gen = rngmod.stream(config.seed, rngmod.BETS, 0, t)
        forced = forced_schedule[t - 1] if forced_schedule is not None else None
        step_conservative(state, gen, config.bets_per_step, forced)
        snapshots.append(macro_snapshot(state, t, config.eps_class))
        if per is not None:
            per.append(StepLedgers(state.wins.copy(), state.losses.copy(), state.posteriors()))
    means = [s.mean_posterior for s in snapshots]
    return Trajectory(
        snapshots=snapshots,
        smoothed_mean_posterior=smooth_series(means, config.smoothing_window),
        per_microstate=per,
    )
