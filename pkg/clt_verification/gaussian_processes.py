# clt_verification/gaussian_processes.py

"""
Stationary Gaussian fields: covariance models and exact path sampling.

Sampling uses circulant embedding when the embedded spectrum is
nonnegative and falls back to a dense Cholesky factor with a small
diagonal jitter otherwise. Each path draws from its own stream derived
from (seed, path_index), so ensembles do not depend on how paths are
distributed over workers.
"""

from dataclasses import dataclass, field
from functools import lru_cache
import csv
import logging
from math import gamma
from pathlib import Path

import numpy as np
from scipy import fft, linalg

from .exceptions import DomainError, SamplingError, UsageError
from .mc_engine import derive_stream
from .numerics import Grid, gauss_legendre

logger = logging.getLogger('clt_verification.sampling')

LEGENDRE_NODES = 256
CHOLESKY_JITTER = 1e-12
# e^{-50} is below double precision relative to the integrand scale
EXPONENTIAL_CUTOFF = 50.0


# =============================================
# COVARIANCE MODELS
# =============================================

@dataclass(frozen=True)
class FgnIncrement:
    """Unit-lag increments X_t = B^H_{t+1} - B^H_t of fractional Brownian motion"""
    H: float

    def __post_init__(self):
        if not 0 < self.H < 1:
            raise DomainError(f"Hurst parameter must lie in (0, 1) (got {self.H})")

    @property
    def c0(self):
        return 1.0

    @property
    def limit_ratio(self):
        return self.H * (2 * self.H - 1)


@dataclass(frozen=True)
class FracOU:
    """Stationary solution of dY = -lambda Y dt + sigma_tilde dB^H"""
    H: float
    lam: float
    sigma_tilde: float = 1.0

    def __post_init__(self):
        if not 0 < self.H < 1:
            raise DomainError(f"Hurst parameter must lie in (0, 1) (got {self.H})")
        if self.lam <= 0 or self.sigma_tilde <= 0:
            raise DomainError("lambda and sigma_tilde must be positive")

    @property
    def c0(self):
        return frac_ou_variance(self.H, self.lam, self.sigma_tilde)

    @property
    def limit_ratio(self):
        return self.H * (2 * self.H - 1) * self.sigma_tilde ** 2 / self.lam ** 2

    @classmethod
    def unit_variance(cls, H, lam):
        """The fractional OU field scaled so that C(0) = 1"""
        return cls(H, lam, float(np.sqrt(2.0 * lam ** (2 * H) / gamma(2 * H + 1))))


@dataclass(frozen=True)
class Tabulated:
    """
    Covariance known at increasing nonnegative lags, linearly interpolated.
    Lags past the last row are outside the model and raise DomainError.
    """
    lags: tuple
    values: tuple = field(repr=False)

    def __post_init__(self):
        lags = np.asarray(self.lags, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if lags.size < 2 or lags.size != values.size:
            raise UsageError("Tabulated covariance needs matching lag/value columns with at least 2 rows")
        if lags[0] != 0.0 or np.any(np.diff(lags) <= 0):
            raise UsageError("Tabulated lags must start at 0 and increase strictly")
        if values[0] <= 0:
            raise DomainError("Tabulated covariance must have C(0) > 0")
        if np.any(np.abs(values) > values[0] * (1 + 1e-12)):
            raise DomainError("Tabulated covariance violates |C(t)| <= C(0)")

    @property
    def c0(self):
        return float(self.values[0])

    @property
    def limit_ratio(self):
        return None

    @classmethod
    def from_csv(cls, path):
        """Two-column CSV (lag, value) with a header row"""
        with open(Path(path), newline='') as handle:
            reader = csv.reader(handle)
            next(reader, None)
            rows = [(float(row[0]), float(row[1])) for row in reader if row and row[0].strip()]
        lags, values = zip(*rows)
        return cls(tuple(lags), tuple(values))


def fgn_covariance(H, t):
    t = np.abs(np.asarray(t, dtype=float))
    two_h = 2.0 * H
    return 0.5 * (np.abs(t + 1.0) ** two_h + np.abs(t - 1.0) ** two_h - 2.0 * t ** two_h)


def frac_ou_variance(H, lam, sigma_tilde):
    return sigma_tilde ** 2 * gamma(2 * H + 1) / (2.0 * lam ** (2 * H))


def _second_difference(H, s, r):
    """|s+r|^{2H} + |s-r|^{2H} - 2 s^{2H} without cancellation for r << s"""
    two_h = 2.0 * H
    if s == 0.0:
        return 2.0 * r ** two_h
    x = r / s
    inside = x < 1.0
    result = np.empty_like(x)
    xi = x[inside]
    result[inside] = s ** two_h * (
        np.expm1(two_h * np.log1p(xi)) + np.expm1(two_h * np.log1p(-xi))
    )
    xo = x[~inside]
    result[~inside] = s ** two_h * ((1.0 + xo) ** two_h + (xo - 1.0) ** two_h - 2.0)
    return result


@lru_cache(maxsize=4096)
def _frac_ou_lag(H, lam, sigma_tilde, s, n_nodes):
    """
    C(s) = (sigma^2 lambda / 4) * int_0^inf e^{-lambda r} g_s(r) dr with g_s the
    second difference of r -> |s + r|^{2H}; follows from writing the stationary
    solution as lambda * int_0^inf e^{-lambda r} (B_t - B_{t-r}) dr.
    """
    if s == 0.0:
        return frac_ou_variance(H, lam, sigma_tilde)
    cutoff = EXPONENTIAL_CUTOFF / lam
    pieces = [(0.0, min(s, cutoff))]
    if s < cutoff:
        pieces.append((s, cutoff))
    total = 0.0
    for a, b in pieces:
        nodes, weights = gauss_legendre(a, b, n_nodes)
        total += float(np.dot(weights, np.exp(-lam * nodes) * _second_difference(H, s, nodes)))
    return 0.25 * sigma_tilde ** 2 * lam * total


def covariance_eval(model, t, n_nodes=LEGENDRE_NODES):
    """C(t) for the model; even in t"""
    t_array = np.abs(np.asarray(t, dtype=float))
    if isinstance(model, FgnIncrement):
        values = fgn_covariance(model.H, t_array)
    elif isinstance(model, FracOU):
        values = np.vectorize(
            lambda s: _frac_ou_lag(model.H, model.lam, model.sigma_tilde, float(s), n_nodes)
        )(t_array)
    elif isinstance(model, Tabulated):
        lags = np.asarray(model.lags)
        if t_array.size and t_array.max() > lags[-1]:
            raise DomainError(
                f"Tabulated covariance ends at lag {lags[-1]:g}; lag {t_array.max():g} requested"
            )
        values = np.interp(t_array, lags, np.asarray(model.values))
    else:
        raise UsageError(f"Unsupported covariance model {type(model).__name__}")
    return values if np.ndim(values) else float(values)


def frac_ou_covariance_asymptotic(H, lam, sigma_tilde, N, T):
    """Truncated large-T series of the fractional OU covariance"""
    if T <= 0:
        raise DomainError(f"Asymptotic series needs T > 0 (got {T})")
    if H == 0.5:
        raise DomainError("The series vanishes identically at H = 1/2")
    total = 0.0
    for n in range(1, N + 1):
        product = np.prod([2 * H - k for k in range(2 * n)])
        total += lam ** (-2 * n) * product * T ** (2 * H - 2 * n)
    return 0.5 * sigma_tilde ** 2 * total


def fbm_covariance(H, t, s):
    t = np.asarray(t, dtype=float)
    s = np.asarray(s, dtype=float)
    two_h = 2.0 * H
    values = 0.5 * (np.abs(t) ** two_h + np.abs(s) ** two_h - np.abs(t - s) ** two_h)
    return values if np.ndim(values) else float(values)


# =============================================
# PATH SAMPLING
# =============================================

@dataclass(frozen=True)
class GaussianPathEnsemble:
    grid: Grid
    paths: np.ndarray = field(repr=False)
    seed: int
    model: object


class StationarySampler:
    """
    Exact sampler for one (model, grid) pair; immutable after construction.

    min_embedding_eigenvalue is the smallest eigenvalue of the circulant
    embedding, a lower bound for the spectrum of the grid covariance matrix.
    """

    def __init__(self, model, grid):
        self.model = model
        self.grid = grid
        self.lags = covariance_eval(model, grid.points - grid.t_start)
        self.method = None
        self.min_embedding_eigenvalue = None
        self._sqrt_eigenvalues = None
        self._cholesky = None
        self._prepare()

    def _prepare(self):
        m = self.grid.n_points
        row = np.concatenate([self.lags, self.lags[-2:0:-1]])
        eigenvalues = fft.fft(row).real
        self.min_embedding_eigenvalue = float(eigenvalues.min())
        tolerance = 1e-10 * self.lags[0]
        if eigenvalues.min() >= -tolerance:
            self.method = 'circulant'
            self._sqrt_eigenvalues = np.sqrt(np.clip(eigenvalues, 0.0, None) / row.size)
            return

        logger.warning(
            f"Circulant embedding has negative eigenvalue {eigenvalues.min():.3e} for {self.model}; "
            f"using dense factorization on {m} points"
        )
        index = np.arange(m)
        matrix = self.lags[np.abs(index[:, None] - index[None, :])]
        matrix = matrix + CHOLESKY_JITTER * self.lags[0] * np.eye(m)
        try:
            self._cholesky = linalg.cholesky(matrix, lower=True)
        except linalg.LinAlgError as exc:
            raise SamplingError(
                f"Covariance of {self.model} on {m} points is not positive definite "
                f"(min circulant eigenvalue {eigenvalues.min():.3e}): {exc}"
            )
        self.method = 'cholesky'

    def draw(self, rng):
        m = self.grid.n_points
        if self.method == 'circulant':
            size = self._sqrt_eigenvalues.size
            noise = rng.standard_normal(size) + 1j * rng.standard_normal(size)
            return fft.fft(self._sqrt_eigenvalues * noise).real[:m]
        return self._cholesky @ rng.standard_normal(m)


def sample_stationary_paths(model, grid, n, seed):
    """n independent exact draws of the field on the grid"""
    if n < 1:
        raise UsageError(f"Need at least one path (got {n})")
    sampler = StationarySampler(model, grid)
    paths = np.empty((n, grid.n_points))
    for index in range(n):
        paths[index] = sampler.draw(derive_stream(seed, index, 'field'))
    paths.setflags(write=False)
    logger.info(f"Sampled {n} paths of {model} on {grid.n_points} points by {sampler.method}")
    return GaussianPathEnsemble(grid=grid, paths=paths, seed=seed, model=model)
