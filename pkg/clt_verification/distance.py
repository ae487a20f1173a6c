# clt_verification/distance.py

"""
Distances from an empirical sample to a normal law.

W1 is the L1 distance between the empirical CDF and the normal CDF,
integrated exactly: on each gap between order statistics the empirical CDF
is a constant level p, and the normal CDF has the closed-form antiderivative
G(x) = sigma * (z Phi(z) + phi(z)), z = (x - mu) / sigma. The gap is split
where Phi crosses p. Standard errors come from a fixed number of bootstrap
resamples on derived streams.

When the functional is Gaussian given part of the path, d_W is estimated
from the conditional variances instead, which removes the sampling floor
of the empirical CDF.
"""

from dataclasses import dataclass
from functools import lru_cache
import logging

import numpy as np
from scipy import integrate, special, stats

from .exceptions import DomainError, UsageError
from .mc_engine import derive_stream

logger = logging.getLogger('clt_verification.analysis')

BOOTSTRAP_RESAMPLES = 64
JACKKNIFE_GROUPS = 16
MIXTURE_NODES = 801
MIXTURE_CHUNK = 1024
W1 = 'W1'
W1_MIXTURE = 'W1-mixture'
KS = 'KS'


@dataclass(frozen=True)
class DistanceEstimate:
    value: float
    standard_error: float
    n: int
    method: str


def _check(samples, sigma):
    samples = np.asarray(samples, dtype=float).ravel()
    if samples.size < 2:
        raise UsageError(f"Need at least 2 samples (got {samples.size})")
    if not np.all(np.isfinite(samples)):
        raise DomainError("Samples contain non-finite values")
    if not sigma > 0:
        raise DomainError(f"Normal scale must be positive (got {sigma})")
    return samples


def _antiderivative(x, mu, sigma):
    z = (x - mu) / sigma
    return sigma * (z * special.ndtr(z) + stats.norm.pdf(z))


def _w1_sorted(ordered, mu, sigma):
    n = ordered.size
    left = _antiderivative(ordered[0], mu, sigma)
    z_max = (ordered[-1] - mu) / sigma
    right = sigma * (stats.norm.pdf(z_max) - z_max * special.ndtr(-z_max))

    a = ordered[:-1]
    b = ordered[1:]
    level = np.arange(1, n) / n
    crossing = np.clip(mu + sigma * special.ndtri(level), a, b)
    G_a = _antiderivative(a, mu, sigma)
    G_b = _antiderivative(b, mu, sigma)
    G_c = _antiderivative(crossing, mu, sigma)
    below = level * (crossing - a) - (G_c - G_a)
    above = (G_b - G_c) - level * (b - crossing)
    # both pieces are nonnegative up to rounding
    middle = np.sum(np.maximum(below, 0.0) + np.maximum(above, 0.0))
    return float(left + middle + right)


def _ks(samples, mu, sigma):
    return float(stats.kstest(samples, 'norm', args=(mu, sigma)).statistic)


def _bootstrap_se(statistic, samples, seed, resamples):
    n = samples.size
    values = np.empty(resamples)
    for b in range(resamples):
        rng = derive_stream(seed, b, 'bootstrap')
        values[b] = statistic(samples[rng.integers(0, n, n)])
    return float(np.std(values, ddof=1))


def empirical_w1_to_normal(samples, mu=0.0, sigma=1.0, seed=0, resamples=BOOTSTRAP_RESAMPLES):
    """Exact W1 between the empirical law of ``samples`` and N(mu, sigma^2)"""
    samples = _check(samples, sigma)
    value = _w1_sorted(np.sort(samples), mu, sigma)
    se = _bootstrap_se(lambda s: _w1_sorted(np.sort(s), mu, sigma), samples, seed, resamples)
    return DistanceEstimate(value=value, standard_error=se, n=int(samples.size), method=W1)


def ks_to_normal(samples, mu=0.0, sigma=1.0, seed=0, resamples=BOOTSTRAP_RESAMPLES):
    samples = _check(samples, sigma)
    value = _ks(samples, mu, sigma)
    se = _bootstrap_se(lambda s: _ks(s, mu, sigma), samples, seed, resamples)
    return DistanceEstimate(value=value, standard_error=se, n=int(samples.size), method=KS)


def _mixture_w1(variances):
    ratios = np.sqrt(np.maximum(variances / variances.mean(), np.finfo(float).tiny))
    x = np.linspace(0.0, 8.0 * max(1.0, float(ratios.max())), MIXTURE_NODES)
    mixture = np.zeros_like(x)
    for start in range(0, ratios.size, MIXTURE_CHUNK):
        block = ratios[start:start + MIXTURE_CHUNK, None]
        mixture += special.ndtr(x / block).sum(axis=0)
    mixture /= ratios.size
    # the mixture is symmetric, so twice the half line
    return 2.0 * float(integrate.trapezoid(np.abs(mixture - special.ndtr(x)), x))


def mixture_w1_to_normal(variances, groups=JACKKNIFE_GROUPS):
    """
    W1 between the centered Gaussian scale mixture with the given
    conditional variances, standardized by their mean, and N(0,1).

    This is the conditional Monte Carlo estimate of d_W for a functional
    that is Gaussian given the rest of the path. The standard error is a
    delete-a-group jackknife.
    """
    variances = np.asarray(variances, dtype=float).ravel()
    if variances.size < 2:
        raise UsageError(f"Need at least 2 conditional variances (got {variances.size})")
    if not np.all(np.isfinite(variances)) or np.any(variances < 0):
        raise DomainError("Conditional variances must be finite and nonnegative")
    if not variances.sum() > 0:
        raise DomainError("All conditional variances are zero")
    value = _mixture_w1(variances)

    groups = min(int(groups), variances.size)
    labels = np.arange(variances.size) % groups
    leave_out = np.array([_mixture_w1(variances[labels != g]) for g in range(groups)])
    se = float(np.sqrt((groups - 1) / groups * np.sum((leave_out - leave_out.mean()) ** 2)))
    return DistanceEstimate(value=value, standard_error=se, n=int(variances.size), method=W1_MIXTURE)


@lru_cache(maxsize=32)
def gaussian_noise_floor(n, seed=0, resamples=16):
    """Mean empirical W1 of n exact N(0,1) draws: the floor raw d_W sits on."""
    if n < 2:
        raise UsageError(f"Need at least 2 samples (got {n})")
    values = [
        _w1_sorted(np.sort(derive_stream(seed, b, 'reference').standard_normal(n)), 0.0, 1.0)
        for b in range(resamples)
    ]
    return float(np.mean(values))
