# clt_verification/numerics.py

"""
Shared deterministic numerical kernels: Gauss-Hermite expectations against
the standard normal, trapezoid integration on uniform grids and log-log
regression for rate exponents.
"""

from dataclasses import dataclass
from functools import lru_cache
import logging

import numpy as np
from scipy import integrate, linalg, stats

from .exceptions import DomainError, QuadratureDomainError, UsageError

logger = logging.getLogger('clt_verification.numerics')

DEFAULT_HERMITE_NODES = 64


@dataclass(frozen=True)
class Grid:
    """Uniform abscissae t_start, t_start + h, ..., t_end"""
    t_start: float
    t_end: float
    n_points: int

    def __post_init__(self):
        if self.n_points < 2:
            raise UsageError(f"Grid needs at least 2 points (got {self.n_points})")
        if not self.t_end > self.t_start:
            raise UsageError(f"Grid end {self.t_end} must exceed start {self.t_start}")
        if self.t_start < 0:
            raise DomainError(f"Grid must start at a nonnegative time (got {self.t_start})")

    @classmethod
    def from_step(cls, t_end, dt, t_start=0.0):
        n_steps = int(round((t_end - t_start) / dt))
        return cls(float(t_start), float(t_start + n_steps * dt), n_steps + 1)

    @property
    def h(self):
        return (self.t_end - self.t_start) / (self.n_points - 1)

    @property
    def points(self):
        return np.linspace(self.t_start, self.t_end, self.n_points)


@dataclass(frozen=True)
class RegressionFit:
    slope: float
    intercept: float
    r_squared: float
    n_points: int
    stderr: float = 0.0


@lru_cache(maxsize=32)
def hermite_nodes(n_nodes):
    """
    Probabilists' Gauss-Hermite nodes and weights by Golub-Welsch.

    The Jacobi matrix of He_k has zero diagonal and off-diagonal sqrt(k);
    its eigenvalues are the nodes and the squared first eigenvector
    components are the weights (they sum to one).
    """
    if n_nodes < 1:
        raise UsageError(f"Gauss-Hermite needs at least one node (got {n_nodes})")
    if n_nodes == 1:
        return np.zeros(1), np.ones(1)
    off_diagonal = np.sqrt(np.arange(1, n_nodes, dtype=float))
    nodes, vectors = linalg.eigh_tridiagonal(np.zeros(n_nodes), off_diagonal)
    weights = vectors[0, :] ** 2
    weights /= weights.sum()
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def gauss_hermite_expectation(g, n_nodes=DEFAULT_HERMITE_NODES):
    """E[g(Z)] for Z ~ N(0,1); exact for polynomials of degree <= 2*n_nodes - 1."""
    nodes, weights = hermite_nodes(int(n_nodes))
    values = np.asarray(g(nodes), dtype=float)
    if values.shape == ():
        values = np.full(nodes.shape, float(values))
    if not np.all(np.isfinite(values)):
        bad = nodes[~np.isfinite(values)]
        raise QuadratureDomainError(
            f"Integrand is not finite at {bad.size} Gauss-Hermite node(s), e.g. x={bad[0]:.6g}"
        )
    return float(np.dot(weights, values))


def grid_integral(values, grid):
    """Trapezoid rule on the grid; exact for affine integrands."""
    values = np.asarray(values, dtype=float)
    if values.shape[-1] != grid.n_points:
        raise UsageError(
            f"Got {values.shape[-1]} values for a grid of {grid.n_points} points"
        )
    return integrate.trapezoid(values, dx=grid.h, axis=-1)


def loglog_slope(xs, ys):
    """Least-squares fit of log y on log x; the slope is the rate exponent."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape:
        raise UsageError(f"x and y lengths differ ({xs.size} vs {ys.size})")
    if xs.size < 3:
        raise UsageError(f"Rate fit needs at least 3 points (got {xs.size})")
    if np.any(xs <= 0) or np.any(ys <= 0):
        raise DomainError("Log-log regression requires strictly positive entries")

    log_x = np.log(xs)
    log_y = np.log(ys)
    if np.ptp(log_y) == 0.0:
        return RegressionFit(0.0, float(log_y[0]), 1.0, int(xs.size))

    fit = stats.linregress(log_x, log_y)
    r_squared = min(max(float(fit.rvalue) ** 2, 0.0), 1.0)
    return RegressionFit(float(fit.slope), float(fit.intercept), r_squared, int(xs.size), float(fit.stderr))


def propagated_slope_se(xs, ys, y_se):
    """
    Standard error of the log-log slope carried over from per-point
    standard errors by the delta method: Var log y_i ~ (se_i / y_i)^2.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    y_se = np.asarray(y_se, dtype=float)
    if not xs.shape == ys.shape == y_se.shape:
        raise UsageError("x, y and standard error lengths differ")
    if np.any(xs <= 0) or np.any(ys <= 0):
        raise DomainError("Log-log regression requires strictly positive entries")
    centered = np.log(xs) - np.log(xs).mean()
    sxx = float(np.sum(centered ** 2))
    if sxx == 0:
        raise UsageError("Rate fit needs at least two distinct abscissae")
    return float(np.sqrt(np.sum(centered ** 2 * (y_se / ys) ** 2)) / sxx)


@lru_cache(maxsize=16)
def legendre_nodes(n_nodes):
    """Gauss-Legendre nodes and weights on [-1, 1]"""
    nodes, weights = np.polynomial.legendre.leggauss(n_nodes)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def gauss_legendre(a, b, n_nodes):
    """Gauss-Legendre nodes and weights mapped to [a, b]"""
    nodes, weights = legendre_nodes(n_nodes)
    half = 0.5 * (b - a)
    return half * nodes + 0.5 * (b + a), half * weights
