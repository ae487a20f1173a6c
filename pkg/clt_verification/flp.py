# clt_verification/flp.py

"""
Fractional Levy process approximation X_t ~ N_t(eps) + sigma^(eps) B^H_t on
a grid starting at 0.

The discrete kernel is the lower Cholesky factor of the fractional Brownian
covariance on t_1..t_N (row and column 0 are zero since B^H_0 = 0). Column j
stands for the cell (t_{j-1}, t_j], so K[i, j] / sqrt(h) is the kernel value
K_{t_i}(s) at the cell midpoint.
"""

from dataclasses import dataclass, field
from functools import lru_cache
import csv
import logging
from pathlib import Path

import numpy as np
from scipy import linalg

from .exceptions import KernelConstructionError, UsageError
from .gaussian_processes import fbm_covariance
from .levy import SMALL, compound_poisson_slice, measure_moment, third_moment_ratio
from .mc_engine import MCConfig, run_ensemble

logger = logging.getLogger('clt_verification.sampling')

KERNEL_CACHE_SIZE = 2
JITTERS = (0.0, 1e-14, 1e-13, 1e-12, 1e-11, 1e-10)
BINARY_MAGIC = b'FLP1'
BINARY_HEADER = np.dtype([('n', '<u8'), ('n_points', '<u8'), ('H', '<f8'), ('seed', '<u8')])


@dataclass(frozen=True)
class GridKernel:
    grid: object
    K: np.ndarray = field(repr=False)
    H: float

    def values_at(self, tau):
        """
        Kernel values K_{t_i}(tau) for every grid row and each jump time.

        Linear in s between cell midpoints, constant between the last
        midpoint and t_i, zero for s > t_i. Returns (n_points, len(tau)).
        """
        tau = np.atleast_1d(np.asarray(tau, dtype=float))
        h = self.grid.h
        last = self.grid.n_points - 1
        position = tau / h + 0.5
        column = np.clip(np.floor(position).astype(int), 0, last)
        weight = np.clip(position - column, 0.0, 1.0)
        weight[column == 0] = 1.0
        weight[column == last] = 0.0
        following = np.minimum(column + 1, last)

        values = (1.0 - weight) * self.K[:, column] + weight * self.K[:, following]
        cols = np.arange(tau.size)
        # row equal to the cell index: constant extrapolation or past the end of [0, t_i]
        inside = tau <= column * h
        values[column, cols] = np.where(inside, self.K[column, column], 0.0)
        return values / np.sqrt(h)


def build_grid_kernel(H, grid):
    """Cholesky factor of the fBM covariance on the grid, retried with a growing jitter"""
    if not 0 < H < 1:
        raise UsageError(f"Hurst parameter must lie in (0, 1) (got {H})")
    if grid.t_start != 0:
        raise UsageError(f"The kernel grid must start at 0 (got {grid.t_start})")
    t = grid.points[1:]
    covariance = fbm_covariance(H, t[:, None], t[None, :])
    scale = float(np.max(np.diag(covariance)))
    for jitter in JITTERS:
        try:
            factor = linalg.cholesky(covariance + jitter * scale * np.eye(t.size), lower=True)
        except linalg.LinAlgError:
            continue
        if jitter:
            logger.warning(f"fBM covariance for H={H} on {grid.n_points} points needed jitter {jitter:g}")
        K = np.zeros((grid.n_points, grid.n_points))
        K[1:, 1:] = factor
        K.setflags(write=False)
        return GridKernel(grid=grid, K=K, H=float(H))
    raise KernelConstructionError(
        f"fBM covariance for H={H} on {grid.n_points} points is indefinite after jitter {JITTERS[-1]:g}"
    )


@lru_cache(maxsize=KERNEL_CACHE_SIZE)
def cached_grid_kernel(H, grid):
    """build_grid_kernel once per process for each (H, grid)"""
    return build_grid_kernel(H, grid)


def kernel_covariance_error(H, grid, kernel=None):
    """max |K K^T - R_H| over the grid"""
    kernel = kernel or build_grid_kernel(H, grid)
    t = grid.points
    target = fbm_covariance(H, t[:, None], t[None, :])
    return float(np.max(np.abs(kernel.K @ kernel.K.T - target)))


@dataclass(frozen=True)
class FlpReplicate:
    """Ships (H, grid) instead of K; each worker process rebuilds the kernel once"""
    H: float
    grid: object
    measure: object
    epsilon: float
    sigma_hat: float
    compensator: np.ndarray = field(repr=False)

    def __call__(self, context):
        kernel = cached_grid_kernel(self.H, self.grid)
        times, sizes = compound_poisson_slice(
            self.measure, self.epsilon, np.inf, self.grid.t_end, context.stream('poisson'),
        )
        jumps = -self.compensator
        if times.size:
            jumps = jumps + kernel.values_at(times) @ sizes
        noise = context.stream('wiener').standard_normal(self.grid.n_points)
        gaussian = self.sigma_hat * (kernel.K @ noise)
        return {'jumps': jumps, 'gaussian': gaussian}


@dataclass
class FlpEnsemble:
    grid: object
    H: float
    seed: int
    epsilon: float
    sigma_hat: float
    third_moment_ratio: object
    jumps: np.ndarray = field(repr=False)
    gaussian: np.ndarray = field(repr=False)

    @property
    def paths(self):
        return self.jumps + self.gaussian

    @property
    def n(self):
        return self.jumps.shape[0]


def simulate_flp_approx(H, measure, epsilon, grid, n, seed, workers=1, kernel=None):
    """n paths of N_t(eps) + sigma^(eps) B^H_t on the grid"""
    if n < 1:
        raise UsageError(f"Need at least one replicate (got {n})")
    kernel = kernel or cached_grid_kernel(float(H), grid)
    ratio = third_moment_ratio(measure, epsilon)
    if ratio is None:
        logger.info(f"No small jumps below eps={epsilon}: the Gaussian part vanishes")
    else:
        logger.info(f"Small-jump third moment ratio at eps={epsilon}: {ratio:.4g}")
    sigma_hat = float(np.sqrt(measure_moment(measure, 2, SMALL, epsilon)))
    mean_size = measure.signed_moment(epsilon, np.inf)
    compensator = kernel.K.sum(axis=1) * np.sqrt(grid.h) * mean_size

    task = FlpReplicate(float(H), grid, measure, float(epsilon), sigma_hat, compensator)
    result = run_ensemble(task, MCConfig(n, seed, workers))
    return FlpEnsemble(
        grid=grid, H=float(H), seed=seed, epsilon=float(epsilon), sigma_hat=sigma_hat,
        third_moment_ratio=ratio,
        jumps=result.samples['jumps'], gaussian=result.samples['gaussian'],
    )


def covariance_check(ensemble, measure, kernel=None):
    """Empirical second-order statistics of the ensemble against their fBM-shaped targets"""
    grid = ensemble.grid
    t = grid.points
    index_1 = int(np.argmin(np.abs(t - 1.0)))
    total_second_moment = measure.slice_moment(2, ensemble.epsilon, np.inf) + ensemble.sigma_hat ** 2
    paths = ensemble.paths
    variance = np.var(paths[:, index_1], ddof=1)
    last = paths[:, -1]
    jumps_end = ensemble.jumps[:, -1]
    gaussian_end = ensemble.gaussian[:, -1]
    if np.std(jumps_end) > 0 and np.std(gaussian_end) > 0:
        independence = float(np.corrcoef(jumps_end, gaussian_end)[0, 1])
    else:
        independence = 0.0
    correlation = float(np.corrcoef(paths[:, index_1], last)[0, 1])
    target_correlation = fbm_covariance(ensemble.H, t[index_1], t[-1]) / np.sqrt(
        fbm_covariance(ensemble.H, t[index_1], t[index_1]) * fbm_covariance(ensemble.H, t[-1], t[-1])
    )
    return {
        'kernel_covariance_error': kernel_covariance_error(ensemble.H, grid, kernel),
        't': float(t[index_1]),
        'variance': float(variance),
        'variance_target': float(total_second_moment * fbm_covariance(ensemble.H, t[index_1], t[index_1])),
        'variance_se': float(variance * np.sqrt(2.0 / (ensemble.n - 1))),
        'correlation_with_end': correlation,
        'correlation_target': float(target_correlation),
        'jump_gaussian_correlation': independence,
        'n': ensemble.n,
        'seed': ensemble.seed,
    }


# =============================================
# PATH FILES
# =============================================

def write_paths_csv(ensemble, path, float_format='%.17g'):
    path = Path(path)
    t = ensemble.grid.points
    with open(path, 'w', newline='') as handle:
        writer = csv.writer(handle)
        writer.writerow(['replicate', 't', 'value'])
        for replicate, values in enumerate(ensemble.paths):
            for time, value in zip(t, values):
                writer.writerow([replicate, float_format % time, float_format % value])
    return path


def write_paths_binary(ensemble, path):
    """FLP1 magic, little-endian header (n, n_points, H, seed), then row-major float64 paths"""
    path = Path(path)
    header = np.array([(ensemble.n, ensemble.grid.n_points, ensemble.H, ensemble.seed)], dtype=BINARY_HEADER)
    with open(path, 'wb') as handle:
        handle.write(BINARY_MAGIC)
        handle.write(header.tobytes())
        handle.write(np.ascontiguousarray(ensemble.paths, dtype='<f8').tobytes())
    return path


def read_paths_binary(path):
    """Returns (header dict, paths array of shape (n, n_points))"""
    payload = Path(path).read_bytes()
    if payload[:len(BINARY_MAGIC)] != BINARY_MAGIC:
        raise UsageError(f"{path} is not an FLP1 path file")
    offset = len(BINARY_MAGIC)
    header = np.frombuffer(payload, dtype=BINARY_HEADER, count=1, offset=offset)[0]
    offset += BINARY_HEADER.itemsize
    n, n_points = int(header['n']), int(header['n_points'])
    paths = np.frombuffer(payload, dtype='<f8', count=n * n_points, offset=offset).reshape(n, n_points)
    meta = {'n': n, 'n_points': n_points, 'H': float(header['H']), 'seed': int(header['seed'])}
    return meta, paths
