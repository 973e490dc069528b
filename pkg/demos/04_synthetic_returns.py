"""Synthetic log returns with and without variance mixing.

With a constant variance the generator is plain Gaussian: dispersion
grows like the square root of the horizon tau and the excess kurtosis
stays at zero.  Drawing the variance of each observation from an
inverse-gamma distribution instead produces a Student-t marginal with
fat tails, and letting the mixing variable evolve slowly (one draw per
tau-block) fattens them further at coarse horizons.
"""
import numpy as np

from betsim import MixingModel, generate_returns, sample_moments
from betsim import rng as streams

N = 200_000

constant = MixingModel(kind="constant", sigma0=1.0)
mixture = MixingModel(kind="inverse-gamma", alpha=4.0, beta=4.0)

print("dispersion versus horizon, constant variance:")
base = generate_returns(constant, n=N, tau=1, rng=streams.stream(0, streams.RETURNS, 0, 1))
sd1 = float(np.std(base.samples))
for tau in (1, 4, 16, 64):
    r = generate_returns(constant, n=N, tau=tau, rng=streams.stream(0, streams.RETURNS, 0, tau))
    ratio = float(np.std(r.samples)) / sd1
    print(f"  tau={tau:>3}  sd ratio {ratio:7.3f}   sqrt(tau) {np.sqrt(tau):7.3f}")

print()
m_const = sample_moments(base.samples)
fast = generate_returns(mixture, n=N, tau=4, rng=streams.stream(1, streams.RETURNS, 0, 4))
slow = generate_returns(mixture, n=N, tau=4, rng=streams.stream(1, streams.RETURNS, 1, 4),
                        slow_mixing=True)
print("excess kurtosis at tau=4:")
print(f"  constant variance      {m_const.excess_kurtosis:7.3f}")
print(f"  fresh mixing per draw  {sample_moments(fast.samples).excess_kurtosis:7.3f}")
print(f"  slow mixing per block  {sample_moments(slow.samples).excess_kurtosis:7.3f}")
print()
print("inverse-gamma mixing with alpha=4 corresponds to a Student-t with 8")
print("degrees of freedom, whose excess kurtosis is 6/(8-4) = 1.5 at tau=1")
