"""Open system of coarse grains with injection and removal.

The population is partitioned into coarse grains: sub-ensembles whose
members bet only among themselves.  Each grain is a closed conservative
system on its own, so small grains equilibrate quickly while large ones
lag behind; pooling the posteriors of grains at different distances
from equilibrium is what produces the fat-tailed aggregate statistics.
Optional Bernoulli injection (fresh grains at posterior 1) and removal
keep the system away from global equilibrium indefinitely.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import rng as rngmod
from .conservative import DEFAULT_SMOOTHING_WINDOW, Trajectory, init_ensemble, smooth_series, step_conservative
from .core import (
    EPS_CLASS,
    EnsembleState,
    MacroSnapshot,
    boltzmann_entropy,
    distinct_posterior_classes,
    heterogeneous_pair_count,
    macro_snapshot,
    population_moments,
)

DEFAULT_GRAIN_SIZES = (750, 225, 150, 425)
DEFAULT_BINS = 50
REMOVAL_POLICIES = ("oldest", "random", "closest-to-equilibrium")


@dataclass(frozen=True)
class DissipativeConfig:
    """Parameters of one coarse-grained run.

    ``bets_fraction`` is the per-capita betting rate: each step, every
    grain draws floor(bets_fraction * size / 2) internal pairs, the same
    rate per participant across grain sizes.  Note that equal per-capita
    rates make the expected mean-posterior trajectory identical for all
    sizes (the participant-level ledger process does not depend on the
    grain size), so relaxation times then differ only through O(1/sqrt n)
    fluctuations.  ``bets_per_grain``, when set, gives every grain that
    fixed number of pairs per step instead; per-capita rates then scale
    as 1/size and larger grains take proportionally longer to reach
    equilibrium, which is the size-ordering regime.  Injection and
    removal default to off, which reproduces the fixed four-grain
    setting.
    """

    steps: int
    grain_sizes: tuple[int, ...] = DEFAULT_GRAIN_SIZES
    seed: int = 0
    bets_fraction: float = 0.5
    bets_per_grain: int | None = None
    injection_prob: float = 0.0
    injection_size_range: tuple[int, int] = (50, 200)
    removal_prob: float = 0.0
    removal_policy: str = "oldest"
    eps_eq: float = 0.05
    sustain: int = 50

    def __post_init__(self):
        object.__setattr__(self, "grain_sizes", tuple(int(s) for s in self.grain_sizes))
        object.__setattr__(
            self, "injection_size_range", tuple(int(s) for s in self.injection_size_range)
        )
        if self.steps < 0:
            raise ValueError("steps must be >= 0")
        if len(self.grain_sizes) == 0:
            raise ValueError("grain_sizes must not be empty")
        if any(s < 2 for s in self.grain_sizes):
            raise ValueError("every grain size must be >= 2")
        if self.seed < 0:
            raise ValueError("seed must be a nonnegative 64-bit integer")
        if not 0.0 < self.bets_fraction <= 1.0:
            raise ValueError("bets_fraction must be in (0, 1]")
        if self.bets_per_grain is not None:
            if self.bets_per_grain < 1:
                raise ValueError("bets_per_grain must be >= 1 when set")
            if any(2 * self.bets_per_grain > s for s in self.grain_sizes):
                raise ValueError(
                    "bets_per_grain must fit the smallest grain "
                    f"(needs size >= {2 * self.bets_per_grain})"
                )
        for name, p in (("injection_prob", self.injection_prob), ("removal_prob", self.removal_prob)):
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must be a probability in [0, 1]")
        lo, hi = self.injection_size_range
        if not 2 <= lo <= hi:
            raise ValueError("injection_size_range must satisfy 2 <= min <= max")
        if self.removal_policy not in REMOVAL_POLICIES:
            raise ValueError(
                f"removal_policy must be one of {REMOVAL_POLICIES}, got {self.removal_policy!r}"
            )
        if self.eps_eq <= 0:
            raise ValueError("eps_eq must be positive")
        if self.sustain < 1:
            raise ValueError("sustain must be >= 1")

    def with_seed(self, seed: int) -> "DissipativeConfig":
        return replace(self, seed=seed)


@dataclass
class CoarseGrain:
    """A local macro-state: one sub-ensemble with its own ledgers."""

    id: int
    ensemble: EnsembleState
    birth_step: int
    size: int


@dataclass
class GrainTrack:
    """Recorded history of one grain across its lifetime.

    ``snapshots[0]`` is the grain's freshly initialized state at
    ``birth_step``; one snapshot is appended for every step the grain
    participates in.  ``death_step`` stays None while the grain lives.
    """

    id: int
    size: int
    birth_step: int
    snapshots: list[MacroSnapshot] = field(default_factory=list)
    death_step: int | None = None

    @property
    def mean_series(self) -> np.ndarray:
        return np.array([s.mean_posterior for s in self.snapshots], dtype=np.float64)

    def to_trajectory(self, smoothing_window: int = DEFAULT_SMOOTHING_WINDOW) -> Trajectory:
        return Trajectory(
            snapshots=list(self.snapshots),
            smoothed_mean_posterior=smooth_series(self.mean_series, smoothing_window),
        )


@dataclass(frozen=True)
class PooledSnapshot:
    """All living grains pooled into one population at one step.

    Moments are population estimators over the pooled posteriors; the
    histogram uses fixed-width bins on [0, 1] whose counts sum to the
    number of living microstates.  ``degenerate`` flags zero pooled
    variance (skewness/kurtosis NaN).  Per-grain means and entropies
    are keyed by grain id.
    """

    step: int
    mean: float
    variance: float
    skewness: float
    excess_kurtosis: float
    degenerate: bool
    entropy: float
    distinct_classes: int
    heterogeneous_pairs: int
    bin_edges: np.ndarray
    counts: np.ndarray
    grain_means: dict[int, float]
    grain_entropies: dict[int, float]

    @property
    def population(self) -> int:
        return int(self.counts.sum())


@dataclass
class DissipativeState:
    """Mutable run state: living grains plus the recorded series."""

    config: DissipativeConfig
    grains: list[CoarseGrain]
    step: int
    next_id: int
    tracks: dict[int, GrainTrack]
    pooled: list[PooledSnapshot]


@dataclass
class DissipativeResult:
    """Outcome of a full run: per-grain trajectories and pooled series."""

    grain_tracks: dict[int, GrainTrack]
    pooled: list[PooledSnapshot]
    state: DissipativeState


def init_grains(sizes, config: DissipativeConfig | None = None, bins: int = DEFAULT_BINS) -> DissipativeState:
    """One grain per size, each freshly initialized (all posteriors 1)."""
    sizes = tuple(int(s) for s in sizes)
    if len(sizes) == 0:
        raise ValueError("at least one grain size is required")
    if any(s < 2 for s in sizes):
        raise ValueError("every grain size must be >= 2")
    if config is None:
        config = DissipativeConfig(steps=0, grain_sizes=sizes)
    grains = [CoarseGrain(i, init_ensemble(s), 0, s) for i, s in enumerate(sizes)]
    tracks = {
        g.id: GrainTrack(g.id, g.size, 0, [macro_snapshot(g.ensemble, 0, EPS_CLASS)])
        for g in grains
    }
    state = DissipativeState(
        config=config, grains=grains, step=0, next_id=len(sizes), tracks=tracks, pooled=[]
    )
    state.pooled.append(superposed_distribution(state, bins))
    return state


def superposed_distribution(state: DissipativeState, bins: int = DEFAULT_BINS) -> PooledSnapshot:
    """Pool every living microstate's posterior into one distribution."""
    if not state.grains:
        raise ValueError("no living grains to pool")
    if bins < 1:
        raise ValueError("bins must be >= 1")
    per_grain = [(g.id, g.ensemble.posteriors()) for g in state.grains]
    pooled = np.concatenate([p for _, p in per_grain])
    mom = population_moments(pooled)
    counts, edges = np.histogram(pooled, bins=bins, range=(0.0, 1.0))
    pairs = heterogeneous_pair_count(pooled, EPS_CLASS)
    return PooledSnapshot(
        step=state.step,
        mean=mom.mean,
        variance=mom.variance,
        skewness=mom.skewness,
        excess_kurtosis=mom.excess_kurtosis,
        degenerate=mom.degenerate,
        entropy=boltzmann_entropy(max(1, pairs)),
        distinct_classes=distinct_posterior_classes(pooled, EPS_CLASS),
        heterogeneous_pairs=pairs,
        bin_edges=edges,
        counts=counts.astype(np.int64),
        grain_means={gid: float(p.mean()) for gid, p in per_grain},
        grain_entropies={
            gid: boltzmann_entropy(max(1, heterogeneous_pair_count(p, EPS_CLASS)))
            for gid, p in per_grain
        },
    )


def _remove_index(state: DissipativeState, topo: np.random.Generator) -> int:
    policy = state.config.removal_policy
    if policy == "oldest":
        return min(range(len(state.grains)), key=lambda k: (state.grains[k].birth_step, state.grains[k].id))
    if policy == "random":
        return int(topo.integers(0, len(state.grains)))
    # closest-to-equilibrium: smallest |mean posterior - 0.5|, id breaks ties
    def distance(k: int) -> tuple[float, int]:
        g = state.grains[k]
        return (abs(float(g.ensemble.posteriors().mean()) - 0.5), g.id)

    return min(range(len(state.grains)), key=distance)


def step_dissipative(
    state: DissipativeState, rng: np.random.Generator | None = None, bins: int = DEFAULT_BINS
) -> DissipativeState:
    """Advance the whole system by one step.

    In order: (1) every living grain runs one conservative step with
    floor(bets_fraction * size / 2) internal bets (or the flat
    ``bets_per_grain`` budget when that is set), each grain on its
    own stream keyed (seed, grain id, step); (2) Bernoulli injection of
    a fresh grain with uniform size in ``injection_size_range``;
    (3) Bernoulli removal per ``removal_policy``, refused as a no-op
    when a single grain remains; (4) pooled snapshot appended.

    ``rng`` optionally overrides the injection/removal stream; grain
    bets always use their own per-step streams so grains can be
    processed in any order (or in parallel) with identical results.
    """
    cfg = state.config
    t = state.step + 1
    for grain in state.grains:
        bets = _grain_bets(cfg, grain.size)
        if bets >= 1:
            gen = rngmod.stream(cfg.seed, rngmod.BETS, grain.id, t)
            step_conservative(grain.ensemble, gen, bets)
        state.tracks[grain.id].snapshots.append(macro_snapshot(grain.ensemble, t, EPS_CLASS))
    topo = rng if rng is not None else rngmod.stream(cfg.seed, rngmod.TOPOLOGY, 0, t)
    if topo.random() < cfg.injection_prob:
        lo, hi = cfg.injection_size_range
        size = int(topo.integers(lo, hi + 1))
        grain = CoarseGrain(state.next_id, init_ensemble(size), t, size)
        state.next_id += 1
        state.grains.append(grain)
        state.tracks[grain.id] = GrainTrack(
            grain.id, size, t, [macro_snapshot(grain.ensemble, t, EPS_CLASS)]
        )
    if topo.random() < cfg.removal_prob and len(state.grains) > 1:
        k = _remove_index(state, topo)
        removed = state.grains.pop(k)
        state.tracks[removed.id].death_step = t
    state.step = t
    state.pooled.append(superposed_distribution(state, bins))
    return state


def convergence_time(series, eps_eq: float = 0.05, sustain: int = 50):
    """First index s with |mean - 0.5| < eps_eq for all of [s, s + sustain).

    ``series`` is a mean-posterior sequence (or anything with a
    ``mean_series`` attribute, e.g. a GrainTrack); the returned value
    indexes that series.  The sustain window must fit entirely inside
    the observed series; a run that ends while still inside the band
    does not count as converged.  Returns None when no window
    qualifies.
    """
    if eps_eq <= 0:
        raise ValueError("eps_eq must be positive")
    if sustain < 1:
        raise ValueError("sustain must be >= 1")
    values = getattr(series, "mean_series", series)
    v = np.asarray(values, dtype=np.float64)
    if v.size < sustain:
        return None
    ok = np.abs(v - 0.5) < eps_eq
    runs = np.convolve(ok.astype(np.int64), np.ones(sustain, dtype=np.int64), mode="valid")
    hits = np.nonzero(runs == sustain)[0]
    return int(hits[0]) if hits.size else None


def run_dissipative(config: DissipativeConfig, bins: int = DEFAULT_BINS) -> DissipativeResult:
    """Full deterministic run; emits per-grain tracks and pooled series."""
    state = init_grains(config.grain_sizes, config, bins)
    for _ in range(config.steps):
        step_dissipative(state, None, bins)
    return DissipativeResult(grain_tracks=state.tracks, pooled=state.pooled, state=state)


def _grain_bets(config: DissipativeConfig, size: int) -> int:
    """Internal bets per step for a grain of the given size."""
    if config.bets_per_grain is not None:
        # equal absolute budget per grain, capped by what the grain can host
        return min(config.bets_per_grain, size // 2)
    return int(config.bets_fraction * size / 2)
