"""Bayesian machinery for volatility models.

Likelihoods (Gaussian with known mean, exponential), the conjugate
inverse-gamma update for the Gaussian variance, marginal likelihood
("evidence") by adaptive log-space quadrature, posterior model
probabilities, and Bayes-ratio selection.  Everything runs in log space
with log-sum-exp: linear-space densities underflow once n reaches the
thousands.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp
from scipy.stats import invgamma as _scipy_invgamma

from .errors import ConvergenceError
from .superstat import invgamma_logpdf

GAUSSIAN_KNOWN_MEAN = "gaussian-known-mean"
EXPONENTIAL = "exponential"
LIKELIHOOD_KINDS = (GAUSSIAN_KNOWN_MEAN, EXPONENTIAL)


class TieWarning(UserWarning):
    """Two models are exactly tied; no winner is declared silently."""


@dataclass(frozen=True)
class InvGammaParams:
    """Inverse-gamma hyperparameters (shape alpha, scale beta)."""

    alpha: float
    beta: float

    def __post_init__(self):
        if self.alpha <= 0 or self.beta <= 0:
            raise ValueError(f"alpha and beta must be positive, got {self!r}")


class DataSet:
    """Observed samples with a known mean for the Gaussian likelihood."""

    __slots__ = ("samples", "mu")

    def __init__(self, samples, mu: float = 0.0):
        v = np.array(samples, dtype=np.float64)
        if v.ndim != 1:
            raise ValueError("samples must be one-dimensional")
        if not np.isfinite(v).all():
            raise ValueError("samples must be finite")
        if not np.isfinite(mu):
            raise ValueError("mu must be finite")
        v.setflags(write=False)
        self.samples = v
        self.mu = float(mu)

    @property
    def n(self) -> int:
        return int(self.samples.size)

    def squared_deviation_sum(self) -> float:
        d = self.samples - self.mu
        return float(d @ d)

    def __repr__(self):
        return f"DataSet(n={self.n}, mu={self.mu})"


@dataclass(frozen=True)
class ModelSpec:
    """One candidate model: likelihood kind, prior, quadrature controls.

    ``domain`` optionally pins the integration interval; by default it
    is the prior's [1e-10, 1-1e-10] quantile range widened until the
    integrand's peak lies well inside.  ``initial_nodes`` is the first
    trapezoid grid; each refinement doubles the node count up to
    ``max_doublings`` times.
    """

    id: str
    likelihood_kind: str
    prior: InvGammaParams
    domain: tuple[float, float] | None = None
    initial_nodes: int = 129
    max_doublings: int = 24
    rel_tol: float = 1e-8

    def __post_init__(self):
        if self.likelihood_kind not in LIKELIHOOD_KINDS:
            raise ValueError(
                f"likelihood_kind must be one of {LIKELIHOOD_KINDS}, got {self.likelihood_kind!r}"
            )
        if self.domain is not None:
            lo, hi = self.domain
            if not 0 < lo < hi:
                raise ValueError("domain must satisfy 0 < lo < hi")
        if self.initial_nodes < 3:
            raise ValueError("initial_nodes must be >= 3")
        if self.max_doublings < 1:
            raise ValueError("max_doublings must be >= 1")
        if self.rel_tol <= 0:
            raise ValueError("rel_tol must be positive")


@dataclass(frozen=True)
class ModelPosterior:
    """Evidence and posterior probability of one model."""

    model_id: str
    prior_prob: float
    log_evidence: float
    posterior_prob: float


@dataclass(frozen=True)
class ModelChoice:
    """Selection outcome: ``best`` is None when models are tied."""

    best: int | None
    tied: tuple[int, ...]


def gaussian_variance_loglik(data: DataSet, sigma2):
    """Log-likelihood of a known-mean Gaussian at variance sigma2:
    -(n/2) ln(2 pi sigma2) - S / (2 sigma2) with S = sum (x - mu)^2.

    The normalization constant is kept: the evidence integral needs
    absolute values.  ``sigma2`` may be a scalar or an array.
    """
    s2 = np.asarray(sigma2, dtype=np.float64)
    if (s2 <= 0).any():
        raise ValueError("sigma2 must be positive")
    n = data.n
    if n == 0:
        out = np.zeros_like(s2)
        return float(out) if np.isscalar(sigma2) else out
    s = data.squared_deviation_sum()
    out = -0.5 * n * np.log(2.0 * np.pi * s2) - s / (2.0 * s2)
    return float(out) if np.isscalar(sigma2) else out


def exponential_loglik(data: DataSet, theta):
    """Log-likelihood of i.i.d. Exponential(rate theta) samples:
    n ln(theta) - theta * sum x.  Samples must be strictly positive.
    """
    th = np.asarray(theta, dtype=np.float64)
    if (th <= 0).any():
        raise ValueError("theta must be positive")
    n = data.n
    if n == 0:
        out = np.zeros_like(th)
        return float(out) if np.isscalar(theta) else out
    if (data.samples <= 0).any():
        raise ValueError("exponential likelihood requires strictly positive samples")
    total = float(data.samples.sum())
    out = n * np.log(th) - th * total
    return float(out) if np.isscalar(theta) else out


def conjugate_variance_posterior(prior: InvGammaParams, data: DataSet) -> InvGammaParams:
    """Closed-form update: InvGamma(alpha + n/2, beta + S/2)."""
    return InvGammaParams(prior.alpha + data.n / 2.0, prior.beta + data.squared_deviation_sum() / 2.0)


def _loglik_fn(model: ModelSpec, data: DataSet):
    if model.likelihood_kind == GAUSSIAN_KNOWN_MEAN:
        return lambda theta: gaussian_variance_loglik(data, theta)
    return lambda theta: exponential_loglik(data, theta)


def _integration_domain(model: ModelSpec, data: DataSet) -> tuple[float, float]:
    """Prior quantile range, widened until the integrand peak is interior.

    A coarse geometric scan finds the peak of likelihood * prior; both
    ends grow until the scanned integrand has dropped at least 46 nats
    (factor ~1e-20) below the peak, so truncation error is negligible
    at the target tolerance.
    """
    if model.domain is not None:
        return model.domain
    a, b = model.prior.alpha, model.prior.beta
    lo = float(_scipy_invgamma.ppf(1e-10, a, scale=b))
    hi = float(_scipy_invgamma.ppf(1.0 - 1e-10, a, scale=b))
    lo = max(lo, 1e-300)
    loglik = _loglik_fn(model, data)
    for _ in range(200):
        grid = np.geomspace(lo, hi, 513)
        g = loglik(grid) + invgamma_logpdf(grid, a, b)
        gmax = float(g.max())
        grew = False
        if g[0] > gmax - 46.0 and lo > 1e-300:
            lo = max(lo / 8.0, 1e-300)
            grew = True
        if g[-1] > gmax - 46.0 and hi < 1e300:
            hi *= 8.0
            grew = True
        if not grew:
            break
    return lo, hi


def log_evidence(model: ModelSpec, data: DataSet) -> float:
    """log of the marginal likelihood, integral of L(theta) pi(theta).

    Trapezoidal quadrature on a log-spaced grid (the substitution
    u = ln theta keeps wide domains well conditioned), accumulated with
    log-sum-exp.  The grid is doubled until two successive estimates
    agree within ``rel_tol``, measured as
    |new - old| <= rel_tol * max(1, |new|).

    An empty data set short-circuits to 0 (the evidence of no data
    is 1).  Raises :class:`ConvergenceError`, carrying the last two
    estimates, when ``max_doublings`` refinements are not enough.
    """
    if data.n == 0:
        return 0.0
    loglik = _loglik_fn(model, data)
    a, b = model.prior.alpha, model.prior.beta
    lo, hi = _integration_domain(model, data)
    u_lo, u_hi = np.log(lo), np.log(hi)

    def estimate(nodes: int) -> float:
        u = np.linspace(u_lo, u_hi, nodes)
        theta = np.exp(u)
        # + u is the Jacobian d theta = theta du
        g = loglik(theta) + invgamma_logpdf(theta, a, b) + u
        w = np.full(nodes, (u_hi - u_lo) / (nodes - 1))
        w[0] *= 0.5
        w[-1] *= 0.5
        return float(logsumexp(g, b=w))

    nodes = model.initial_nodes
    prev = estimate(nodes)
    for _ in range(model.max_doublings):
        nodes = 2 * nodes - 1
        cur = estimate(nodes)
        if abs(cur - prev) <= model.rel_tol * max(1.0, abs(cur)):
            return cur
        prev = cur
    raise ConvergenceError(
        f"evidence quadrature for model {model.id!r} did not converge "
        f"after {model.max_doublings} doublings ({nodes} nodes); "
        f"last two estimates {prev!r}",
        estimates=(prev, cur),
    )


def model_posteriors(models, priors, data: DataSet) -> list[ModelPosterior]:
    """Posterior probability of each model given prior weights.

    Computed in log space; the result is explicitly renormalized so the
    probabilities sum to 1 to machine precision.
    """
    models = list(models)
    priors = np.asarray(priors, dtype=np.float64)
    if len(models) == 0:
        raise ValueError("at least one model is required")
    if priors.shape != (len(models),):
        raise ValueError("priors must align one-to-one with models")
    if (priors < 0).any():
        raise ValueError("prior probabilities must be nonnegative")
    if abs(float(priors.sum()) - 1.0) > 1e-9:
        raise ValueError(f"model priors must sum to 1, got {float(priors.sum())!r}")
    log_ev = np.array([log_evidence(m, data) for m in models])
    with np.errstate(divide="ignore"):  # a zero prior is a legitimate -inf
        log_post = log_ev + np.log(priors)
    post = np.exp(log_post - logsumexp(log_post))
    post = post / post.sum()
    return [
        ModelPosterior(m.id, float(p), float(le), float(pp))
        for m, p, le, pp in zip(models, priors, log_ev, post)
    ]


def bayes_ratio(posterior_j: float, posterior_k: float) -> float:
    """Posterior odds posterior_j / posterior_k.

    An exact tie is reported via :class:`TieWarning` rather than being
    broken silently; a zero denominator is an error.
    """
    if posterior_k == 0:
        raise ValueError("bayes_ratio undefined: posterior_k is 0")
    if posterior_j == posterior_k:
        warnings.warn("models are exactly tied (ratio 1)", TieWarning, stacklevel=2)
    return posterior_j / posterior_k


def select_model(posteriors) -> ModelChoice:
    """Pick the model whose ratio against every other exceeds 1.

    Accepts ModelPosterior records or raw probabilities.  When several
    models share the maximum (within 1e-12), no best is declared:
    ``best`` is None and ``tied`` lists the contenders.
    """
    probs = [getattr(p, "posterior_prob", p) for p in posteriors]
    if not probs:
        raise ValueError("no models to select from")
    top = max(probs)
    tied = tuple(i for i, p in enumerate(probs) if abs(p - top) <= 1e-12)
    return ModelChoice(best=tied[0] if len(tied) == 1 else None, tied=tied)
