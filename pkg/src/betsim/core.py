"""Ledger mathematics shared by both simulation regimes.

A market participant ("microstate") carries a ledger of wins and
losses.  Conditional on the ensemble totals and fair marginal odds,
Bayes' rule turns a ledger into a posterior probability of profit.
Macro-level observables (mean posterior, moments, Boltzmann entropy
over heterogeneous pairs) are computed from the posterior population.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

# Posteriors are exact rationals evaluated in floating point, so ties
# between equal ledgers are near-exact; 1e-9 separates genuine classes.
EPS_CLASS = 1e-9


@dataclass(frozen=True)
class BetLedger:
    """Win/loss record of a single participant.

    Counts only ever increase; a freshly initialized participant starts
    at one win and zero losses, so ``wins >= 1`` throughout a run.
    """

    wins: int
    losses: int

    def __post_init__(self):
        if self.wins < 0 or self.losses < 0:
            raise ValueError(f"ledger counts must be nonnegative, got {self!r}")


@dataclass(frozen=True)
class EnsembleTotals:
    """Column sums of all ledgers in one ensemble."""

    total_wins: int
    total_losses: int

    def __post_init__(self):
        if self.total_wins < 0 or self.total_losses < 0:
            raise ValueError(f"totals must be nonnegative, got {self!r}")


@dataclass(frozen=True)
class MicroState:
    """Immutable view of one participant: ledger plus its posterior."""

    id: int
    ledger: BetLedger
    posterior: float


@dataclass(frozen=True)
class Moments:
    """Population moments of a value collection.

    ``degenerate`` is set when the variance is zero; skewness and
    excess kurtosis are NaN in that case rather than raising.
    """

    mean: float
    variance: float
    skewness: float
    excess_kurtosis: float
    degenerate: bool


@dataclass(frozen=True)
class MacroSnapshot:
    """Aggregate observables of one ensemble at one step.

    ``entropy`` is the Boltzmann entropy (k_B = 1, nats) of
    ``max(1, heterogeneous_pairs)``; skewness and excess kurtosis are
    NaN for a degenerate (zero-variance) posterior population.
    """

    step: int
    mean_posterior: float
    variance: float
    skewness: float
    excess_kurtosis: float
    entropy: float
    distinct_classes: int
    heterogeneous_pairs: int


class EnsembleState:
    """Mutable, array-backed population of bet ledgers.

    The simulation loops mutate ``wins``/``losses`` in place; a run owns
    its state exclusively.  Posteriors are never stored; they are
    recomputed from the ledgers and totals on demand, so they can never
    drift out of sync.
    """

    __slots__ = ("wins", "losses")

    def __init__(self, wins: Iterable[int], losses: Iterable[int]):
        wins = np.asarray(wins, dtype=np.int64).copy()
        losses = np.asarray(losses, dtype=np.int64).copy()
        if wins.ndim != 1 or wins.shape != losses.shape:
            raise ValueError("wins and losses must be 1-d arrays of equal length")
        if wins.size == 0:
            raise ValueError("ensemble must contain at least one microstate")
        if (wins < 0).any() or (losses < 0).any():
            raise ValueError("ledger counts must be nonnegative")
        self.wins = wins
        self.losses = losses

    @property
    def size(self) -> int:
        return int(self.wins.size)

    @property
    def totals(self) -> EnsembleTotals:
        return EnsembleTotals(int(self.wins.sum()), int(self.losses.sum()))

    def posteriors(self) -> np.ndarray:
        return posterior_win_many(self.wins, self.losses)

    def microstates(self) -> tuple[MicroState, ...]:
        post = self.posteriors()
        return tuple(
            MicroState(i, BetLedger(int(w), int(l)), float(p))
            for i, (w, l, p) in enumerate(zip(self.wins, self.losses, post))
        )


def posterior_win(ledger: BetLedger, totals: EnsembleTotals) -> float:
    """Posterior probability of profit for one ledger.

    With fair marginal odds P(win) = P(loss) = 0.5 the marginals cancel
    and the posterior reduces to ``L_w / (L_w + L_l)`` where the
    likelihoods are empirical frequencies ``L_w = wins/total_wins`` and
    ``L_l = losses/total_losses``.  When the ensemble has recorded no
    losses at all, the loss likelihood is defined as 0 and the
    posterior is 1.

    Raises
    ------
    ValueError
        If the ledger is empty (wins = losses = 0, undefined), or the
        totals cannot contain the ledger.
    """
    if ledger.wins == 0 and ledger.losses == 0:
        raise ValueError("posterior undefined for an empty ledger (0 wins, 0 losses)")
    if totals.total_wins < 1:
        raise ValueError("ensemble totals must include at least one win")
    if ledger.wins > totals.total_wins or ledger.losses > totals.total_losses:
        raise ValueError(f"ledger {ledger!r} inconsistent with totals {totals!r}")
    l_w = ledger.wins / totals.total_wins
    l_l = 0.0 if totals.total_losses == 0 else ledger.losses / totals.total_losses
    return l_w / (l_w + l_l)


def posterior_win_many(
    wins: np.ndarray, losses: np.ndarray, totals: EnsembleTotals | None = None
) -> np.ndarray:
    """Vectorized :func:`posterior_win` over aligned count arrays.

    ``totals`` defaults to the column sums of the arrays themselves,
    which is the self-consistent ensemble case.
    """
    wins = np.asarray(wins, dtype=np.int64)
    losses = np.asarray(losses, dtype=np.int64)
    if totals is None:
        totals = EnsembleTotals(int(wins.sum()), int(losses.sum()))
    if ((wins == 0) & (losses == 0)).any():
        raise ValueError("posterior undefined for an empty ledger (0 wins, 0 losses)")
    if totals.total_wins < 1:
        raise ValueError("ensemble totals must include at least one win")
    l_w = wins / totals.total_wins
    if totals.total_losses == 0:
        # loss likelihood defined as 0: every posterior is exactly 1
        return np.ones(wins.shape, dtype=np.float64)
    l_l = losses / totals.total_losses
    return l_w / (l_w + l_l)


def pair_combination_count(n_states: int, k: int) -> int:
    """Number of k-subsets, with the extra C(N-k, k) term when N-k > 2.

    Returns ``C(N, k) + C(N-k, k)`` when ``N - k > 2``; otherwise just
    ``C(N, k)``.  For N=5, k=2 this gives 10 + 3 = 13.  Arithmetic is
    exact arbitrary-precision integer math, so the result cannot
    overflow for any N (verified in tests up to N = 10**4).
    """
    if int(n_states) != n_states or int(k) != k:
        raise ValueError("counts must be integers")
    n_states, k = int(n_states), int(k)
    if not n_states >= k >= 1:
        raise ValueError(f"need N >= k >= 1, got N={n_states}, k={k}")
    base = math.comb(n_states, k)
    if n_states - k > 2:
        return base + math.comb(n_states - k, k)
    return base


def boltzmann_entropy(omega: float) -> float:
    """Boltzmann entropy ln(omega) in nats (k_B normalized to 1)."""
    if omega <= 0:
        raise ValueError(f"entropy undefined for omega <= 0, got {omega}")
    return math.log(omega)


def distinct_posterior_classes(posteriors: Sequence[float], eps: float = EPS_CLASS) -> int:
    """Count equivalence classes under |p_i - p_j| <= eps clustering.

    Computed by sorting and splitting on gaps larger than ``eps``
    (transitive closure of the tolerance relation).
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    p = np.sort(np.asarray(posteriors, dtype=np.float64))
    if p.size == 0:
        return 0
    return int(np.count_nonzero(np.diff(p) > eps)) + 1


def heterogeneous_pair_count(posteriors: Sequence[float], eps: float = EPS_CLASS) -> int:
    """Number of unordered pairs (i, j) with |p_i - p_j| > eps.

    Sorting reduces the pair census to a rank difference, so the count
    stays exact while running in O(N log N) instead of O(N^2).
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    p = np.sort(np.asarray(posteriors, dtype=np.float64))
    n = p.size
    if n < 2:
        return 0
    # for each right endpoint r: pairs with p_r - p_j <= eps are the
    # trailing run starting at searchsorted(p, p_r - eps)
    first_within = np.searchsorted(p, p - eps, side="left")
    within = int((np.arange(n) - first_within).sum())
    return n * (n - 1) // 2 - within


def ensemble_entropy(posteriors: Sequence[float], eps: float = EPS_CLASS) -> float:
    """Entropy of a posterior population: ln(max(1, heterogeneous pairs)).

    The floor of 1 makes a fully homogeneous population sit at entropy
    0 instead of ln 0.
    """
    return boltzmann_entropy(max(1, heterogeneous_pair_count(posteriors, eps)))


def pair_expected_return(p_buyer: float, p_seller: float) -> float:
    """Expected return of a matched pair, buyer positive, seller negative.

    Zero exactly when the pair is homogeneous.
    """
    for name, p in (("p_buyer", p_buyer), ("p_seller", p_seller)):
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"{name} must be a probability in [0, 1], got {p}")
    return p_buyer - p_seller


def population_moments(values: Sequence[float]) -> Moments:
    """Population (biased) moments; excess kurtosis = m4/m2^2 - 3.

    A zero-variance population is flagged degenerate with NaN skewness
    and kurtosis rather than raising.
    """
    v = np.asarray(values, dtype=np.float64)
    if v.size == 0:
        raise ValueError("moments undefined for an empty collection")
    mean = float(v.mean())
    d = v - mean
    m2 = float(np.mean(d * d))
    if m2 == 0.0:
        return Moments(mean, 0.0, math.nan, math.nan, True)
    m3 = float(np.mean(d * d * d))
    m4 = float(np.mean(d * d * d * d))
    return Moments(mean, m2, m3 / m2**1.5, m4 / (m2 * m2) - 3.0, False)


def macro_snapshot(ensemble: EnsembleState, step: int, eps: float = EPS_CLASS) -> MacroSnapshot:
    """Aggregate the ensemble's posterior population into one snapshot."""
    if ensemble.size == 0:
        raise ValueError("cannot snapshot an empty ensemble")
    post = ensemble.posteriors()
    mom = population_moments(post)
    pairs = heterogeneous_pair_count(post, eps)
    return MacroSnapshot(
        step=int(step),
        mean_posterior=mom.mean,
        variance=mom.variance,
        skewness=mom.skewness,
        excess_kurtosis=mom.excess_kurtosis,
        entropy=boltzmann_entropy(max(1, pairs)),
        distinct_classes=distinct_posterior_classes(post, eps),
        heterogeneous_pairs=pairs,
    )
