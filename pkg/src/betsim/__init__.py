"""Betting-ensemble market simulations and Bayesian return-series tools.

The package has three layers:

* simulation: :mod:`betsim.core`, :mod:`betsim.conservative`,
  :mod:`betsim.dissipative` model a market as an ensemble of bettors
  whose win/loss ledgers induce a Bayesian success probability each.
* distributions: :mod:`betsim.superstat` generates return series whose
  variance (or volatility) is itself random.
* inference: :mod:`betsim.inference` fits variances and compares
  likelihood models by marginal evidence.

:mod:`betsim.config`, :mod:`betsim.io` and :mod:`betsim.cli` wire these
into a deterministic, file-driven command-line tool.
"""

from .conservative import (
    ConservativeConfig,
    Trajectory,
    init_ensemble,
    run_conservative,
    smooth_series,
)
from .core import (
    EnsembleState,
    MacroSnapshot,
    Moments,
    boltzmann_entropy,
    distinct_posterior_classes,
    heterogeneous_pair_count,
    macro_snapshot,
    pair_combination_count,
    pair_expected_return,
    posterior_win,
)
from .dissipative import (
    DissipativeConfig,
    DissipativeResult,
    convergence_time,
    init_grains,
    run_dissipative,
    superposed_distribution,
)
from .errors import BetsimError, ConfigError, ConvergenceError, DataError
from .inference import (
    DataSet,
    InvGammaParams,
    ModelSpec,
    bayes_ratio,
    conjugate_variance_posterior,
    exponential_loglik,
    gaussian_variance_loglik,
    log_evidence,
    model_posteriors,
    select_model,
)
from .superstat import (
    MixingModel,
    ReturnSeries,
    generate_returns,
    giga_logpdf,
    invgamma_logpdf,
    sample_mixing,
    sample_moments,
)

__version__ = "0.1.0"

__all__ = [
    "BetsimError",
    "ConfigError",
    "ConservativeConfig",
    "ConvergenceError",
    "DataError",
    "DataSet",
    "DissipativeConfig",
    "DissipativeResult",
    "EnsembleState",
    "InvGammaParams",
    "MacroSnapshot",
    "MixingModel",
    "ModelSpec",
    "Moments",
    "ReturnSeries",
    "Trajectory",
    "bayes_ratio",
    "boltzmann_entropy",
    "conjugate_variance_posterior",
    "convergence_time",
    "distinct_posterior_classes",
    "exponential_loglik",
    "gaussian_variance_loglik",
    "generate_returns",
    "giga_logpdf",
    "heterogeneous_pair_count",
    "init_ensemble",
    "init_grains",
    "invgamma_logpdf",
    "log_evidence",
    "macro_snapshot",
    "model_posteriors",
    "pair_combination_count",
    "pair_expected_return",
    "posterior_win",
    "run_conservative",
    "run_dissipative",
    "sample_mixing",
    "sample_moments",
    "select_model",
    "smooth_series",
    "superposed_distribution",
    "__version__",
]
