"""Synthetic log-returns with fluctuating volatility.

A return over horizon tau is a sum of tau unit-step shocks sigma_u *
z_u.  When the volatility is itself random ("superstatistics"), the
aggregate distribution is a variance mixture of normals: fat-tailed
even though every conditional piece is Gaussian.  Two mixing families
are provided, inverse-gamma over the variance (conjugate with the
inference module) and generalized inverse-gamma over the volatility,
plus a constant-volatility baseline that reproduces the sqrt(tau)
dispersion law.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .core import Moments, population_moments

INVERSE_GAMMA = "inverse-gamma"
GENERALIZED = "generalized-inverse-gamma"
CONSTANT = "constant"
KINDS = (INVERSE_GAMMA, GENERALIZED, CONSTANT)


@dataclass(frozen=True)
class MixingModel:
    """A volatility-mixing law.

    kind switches what fluctuates:

    * ``inverse-gamma``: the variance sigma^2 ~ InvGamma(alpha, beta);
      this is the choice conjugate with Gaussian-variance inference.
    * ``generalized-inverse-gamma``: the volatility sigma ~
      GIGa(alpha, beta, gamma); gamma = 1 recovers the inverse-gamma
      law for sigma.
    * ``constant``: sigma fixed at sigma0 (no mixing).
    """

    kind: str
    alpha: float | None = None
    beta: float | None = None
    gamma: float | None = None
    sigma0: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.kind == CONSTANT:
            if self.sigma0 is None or self.sigma0 <= 0:
                raise ValueError("constant model needs sigma0 > 0")
            return
        if self.alpha is None or self.alpha <= 0 or self.beta is None or self.beta <= 0:
            raise ValueError(f"{self.kind} model needs alpha > 0 and beta > 0")
        if self.kind == GENERALIZED and (self.gamma is None or self.gamma <= 0):
            raise ValueError("generalized model needs gamma > 0")


@dataclass
class ReturnSeries:
    """Generated or ingested log-returns over a fixed horizon.

    ``seed`` records the generating seed when one is known; it is None
    for data produced from a caller-supplied generator or read from a
    file.
    """

    tau: int
    samples: np.ndarray
    seed: int | None = None

    def __post_init__(self):
        if self.tau < 1:
            raise ValueError("tau must be >= 1")
        self.samples = np.asarray(self.samples, dtype=np.float64)


def invgamma_logpdf(x, alpha: float, beta: float):
    """Log-density of InvGamma(alpha, beta):
    beta^alpha / Gamma(alpha) * x^(-alpha-1) * exp(-beta/x).

    Accepts scalars or arrays; every x must be strictly positive.
    """
    if alpha <= 0 or beta <= 0:
        raise ValueError("alpha and beta must be positive")
    xv = np.asarray(x, dtype=np.float64)
    if (xv <= 0).any():
        raise ValueError("inverse-gamma density is defined only for x > 0")
    out = alpha * np.log(beta) - gammaln(alpha) - (alpha + 1.0) * np.log(xv) - beta / xv
    return float(out) if np.isscalar(x) else out


def giga_logpdf(x, alpha: float, beta: float, gamma: float):
    """Log-density of GIGa(alpha, beta, gamma):
    gamma * beta^(gamma*alpha) / Gamma(alpha) * x^(-gamma*alpha-1)
    * exp(-(beta/x)^gamma).

    gamma = 1 reduces exactly to the inverse-gamma density.  If
    G ~ Gamma(alpha, 1), then beta / G^(1/gamma) follows this law.
    """
    if alpha <= 0 or beta <= 0 or gamma <= 0:
        raise ValueError("alpha, beta and gamma must be positive")
    xv = np.asarray(x, dtype=np.float64)
    if (xv <= 0).any():
        raise ValueError("generalized inverse-gamma density is defined only for x > 0")
    out = (
        np.log(gamma)
        + gamma * alpha * np.log(beta)
        - gammaln(alpha)
        - (gamma * alpha + 1.0) * np.log(xv)
        - (beta / xv) ** gamma
    )
    return float(out) if np.isscalar(x) else out


def sample_mixing(model: MixingModel, rng: np.random.Generator, size=None):
    """Draw variance samples sigma^2 from the mixing model.

    Gamma variates come from numpy's Generator.gamma (Marsaglia-Tsang
    squeeze-rejection); any rejected proposals are consumed from the
    same stream, so a fixed generator state replays exactly.  Returns a
    scalar for size=None, else an array of the requested shape.
    """
    if model.kind == CONSTANT:
        s2 = model.sigma0**2
        return s2 if size is None else np.full(size, s2, dtype=np.float64)
    g = rng.gamma(model.alpha, 1.0, size)
    if model.kind == INVERSE_GAMMA:
        out = model.beta / g
    else:  # generalized: the law mixes sigma, so square the draw
        out = (model.beta / g ** (1.0 / model.gamma)) ** 2
    return float(out) if size is None else out


def generate_returns(
    model: MixingModel,
    n: int,
    tau: int,
    rng: np.random.Generator,
    slow_mixing: bool = False,
    seed_label: int | None = None,
) -> ReturnSeries:
    """Generate n log-returns, each a sum of tau unit-step shocks.

    Fast mixing (default) redraws sigma every unit step; slow mixing
    draws one sigma per tau-block, modeling a volatility that
    fluctuates on a time scale much longer than the horizon.  The
    constant model reduces to N(0, sigma0^2 * tau) either way.

    Draw order is fixed (variances first, then normals) so a seeded
    generator reproduces the same series exactly.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if tau < 1:
        raise ValueError("tau must be >= 1")
    if model.kind == CONSTANT:
        z = rng.standard_normal((n, tau))
        samples = model.sigma0 * z.sum(axis=1)
    else:
        shape = (n, 1) if slow_mixing else (n, tau)
        sigma = np.sqrt(sample_mixing(model, rng, shape))
        z = rng.standard_normal((n, tau))
        samples = (sigma * z).sum(axis=1)
    return ReturnSeries(tau=tau, samples=samples, seed=seed_label)


def sample_moments(series) -> Moments:
    """Population moments of a return series (or plain array).

    Zero variance is flagged on the result, not raised.
    """
    values = getattr(series, "samples", series)
    v = np.asarray(values, dtype=np.float64)
    if v.size < 4:
        raise ValueError("need at least 4 samples for four moments")
    return population_moments(v)
