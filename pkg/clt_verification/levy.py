# clt_verification/levy.py

"""
Levy measures on R without 0 and the small-jump CLT.

All measure analytics work on slices {lo <= |x| < hi}. The small-jump
functional

    X~_t(eps) = sigma~_t(eps)^{-1} int_0^t int_{|x|<eps} h_t(s) x N~(ds, dx)

is simulated by layered truncation: compound-Poisson slices
[eps 2^{-k-1}, eps 2^{-k}) down to a floor, and a centered Gaussian with the
variance of everything below the floor.
"""

from dataclasses import dataclass, field
import csv
import logging
from math import log2
from pathlib import Path

import numpy as np
from scipy import integrate

from .distance import empirical_w1_to_normal, gaussian_noise_floor
from .exceptions import (
    DivergentMomentError, DomainError, MeasureNormalizationError, NoSmallJumpsError, UsageError,
)
from .mc_engine import MCConfig, derive_stream, run_ensemble
from .numerics import gauss_legendre

logger = logging.getLogger('clt_verification.sampling')

ALL = 'all'
SMALL = 'small'
BIG = 'big'
LAYER_FLOOR_DIVISOR = 64
LAYER_FLOOR_MAX_DIVISOR = 1024
FLOOR_STEP = 4
TIME_NODES = 64
QUAD_LIMIT = 200
TABULATED_CDF_POINTS = 4096


def _side_bounds(lo, hi, extent):
    """Intersection of [lo, hi) with (0, extent] on one half-line, or None"""
    upper = min(hi, extent)
    if upper <= lo:
        return None
    return lo, upper


# =============================================
# MEASURES
# =============================================

@dataclass(frozen=True)
class AtomsMeasure:
    """Finitely many atoms x_i != 0 with weights w_i > 0"""
    atoms: tuple
    finite_activity = True

    def __post_init__(self):
        if not self.atoms:
            raise UsageError("Atoms measure needs at least one atom")
        for x, w in self.atoms:
            if x == 0:
                raise DomainError("Levy measures carry no mass at 0")
            if w <= 0:
                raise DomainError(f"Atom weight must be positive (got {w} at {x})")

    @property
    def locations(self):
        return np.array([x for x, _ in self.atoms], dtype=float)

    @property
    def weights(self):
        return np.array([w for _, w in self.atoms], dtype=float)

    def _mask(self, lo, hi):
        size = np.abs(self.locations)
        return (size >= lo) & (size < hi)

    def integrate(self, phi, p, lo=0.0, hi=np.inf):
        mask = self._mask(lo, hi)
        x = self.locations[mask]
        if x.size == 0:
            return 0.0
        values = np.asarray(phi(x), dtype=float) * np.broadcast_to(1.0, x.shape)
        return float(np.sum(self.weights[mask] * values * np.abs(x) ** p))

    def slice_moment(self, p, lo=0.0, hi=np.inf):
        mask = self._mask(lo, hi)
        return float(np.sum(self.weights[mask] * np.abs(self.locations[mask]) ** p))

    def mass(self, lo=0.0, hi=np.inf):
        return self.slice_moment(0, lo, hi)

    def signed_moment(self, lo=0.0, hi=np.inf):
        mask = self._mask(lo, hi)
        return float(np.sum(self.weights[mask] * self.locations[mask]))

    def sample_slice(self, rng, size, lo=0.0, hi=np.inf):
        mask = self._mask(lo, hi)
        if size and not np.any(mask):
            raise DomainError(f"No atoms with {lo} <= |x| < {hi}")
        weights = self.weights[mask]
        return rng.choice(self.locations[mask], size=size, p=weights / weights.sum())


@dataclass(frozen=True)
class TruncatedPowerLaw:
    """Density |x|^{-(2+delta)} on [-a, b] without 0"""
    delta: float
    a: float
    b: float
    finite_activity = False

    def __post_init__(self):
        if not -1 < self.delta < 1:
            raise DomainError(f"delta must lie in (-1, 1) (got {self.delta})")
        if self.a <= 0 or self.b <= 0:
            raise DomainError("Truncation points a and b must be positive")

    def _sides(self, lo, hi):
        return [(sign, bounds) for sign, extent in ((1.0, self.b), (-1.0, self.a))
                if (bounds := _side_bounds(lo, hi, extent)) is not None]

    def _power_integral(self, exponent, lower, upper):
        """int_lower^upper x^{exponent - 1} dx"""
        if exponent == 0:
            if lower == 0:
                raise DivergentMomentError("Logarithmic divergence at 0")
            return float(np.log(upper / lower))
        if lower == 0 and exponent < 0:
            raise DivergentMomentError(f"Moment diverges at 0 (exponent {exponent:.4g})")
        return float((upper ** exponent - lower ** exponent) / exponent)

    def slice_moment(self, p, lo=0.0, hi=np.inf):
        exponent = p - 1 - self.delta
        return sum(self._power_integral(exponent, *bounds) for _, bounds in self._sides(lo, hi))

    def mass(self, lo=0.0, hi=np.inf):
        return self.slice_moment(0, lo, hi)

    def signed_moment(self, lo=0.0, hi=np.inf):
        exponent = -self.delta
        return sum(sign * self._power_integral(exponent, *bounds) for sign, bounds in self._sides(lo, hi))

    def integrate(self, phi, p, lo=0.0, hi=np.inf):
        """int phi(x) |x|^p dnu over the slice by adaptive quadrature"""
        power = p - 2 - self.delta
        total = 0.0
        for sign, (lower, upper) in self._sides(lo, hi):
            if lower == 0:
                if power <= -1:
                    raise DivergentMomentError(f"Moment of order {p} diverges at 0 for delta={self.delta}")
                value, _ = integrate.quad(
                    lambda y: phi(sign * y), 0.0, upper, weight='alg', wvar=(power, 0.0),
                    epsabs=0.0, epsrel=1e-12, limit=QUAD_LIMIT,
                )
            else:
                value, _ = integrate.quad(
                    lambda y: phi(sign * y) * y ** power, lower, upper,
                    epsabs=0.0, epsrel=1e-12, limit=QUAD_LIMIT,
                )
            total += value
        return float(total)

    def sample_slice(self, rng, size, lo=0.0, hi=np.inf):
        """Inverse-CDF draws from the normalized restriction to the slice"""
        sides = self._sides(lo, hi)
        masses = np.array([self._power_integral(-1 - self.delta, *bounds) for _, bounds in sides])
        side = rng.choice(len(sides), size=size, p=masses / masses.sum())
        u = rng.random(size)
        out = np.empty(size)
        exponent = -1.0 - self.delta
        for index, (sign, (lower, upper)) in enumerate(sides):
            chosen = side == index
            low, high = lower ** exponent, upper ** exponent
            out[chosen] = sign * (low + u[chosen] * (high - low)) ** (1.0 / exponent)
        return out


@dataclass(frozen=True)
class TabulatedDensity:
    """
    Piecewise-linear density through (x_i, density_i); zero outside the
    tabulated range on each side of 0 and between the innermost points.
    """
    x: tuple
    density: tuple = field(repr=False)
    finite_activity = True

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        density = np.asarray(self.density, dtype=float)
        if x.size < 2 or x.size != density.size:
            raise UsageError("Tabulated density needs matching x/density columns with at least 2 rows")
        if np.any(np.diff(x) <= 0):
            raise UsageError("Tabulated x must increase strictly")
        if np.any(x == 0):
            raise DomainError("Levy measures carry no mass at 0")
        if np.any(density < 0):
            raise DomainError("Tabulated density must be nonnegative")
        if not np.any(density > 0):
            raise MeasureNormalizationError("Tabulated density has zero total mass")

    @classmethod
    def from_csv(cls, path):
        """Two-column CSV (x, density) with a header row"""
        with open(Path(path), newline='') as handle:
            reader = csv.reader(handle)
            next(reader, None)
            rows = [(float(row[0]), float(row[1])) for row in reader if row and row[0].strip()]
        if not rows:
            raise UsageError(f"No rows in {path}")
        xs, values = zip(*rows)
        return cls(tuple(xs), tuple(values))

    def _side_table(self, sign):
        x = np.asarray(self.x, dtype=float)
        density = np.asarray(self.density, dtype=float)
        chosen = x * sign > 0
        y = np.abs(x[chosen])
        order = np.argsort(y)
        return y[order], density[chosen][order]

    def _sides(self, lo, hi):
        sides = []
        for sign in (1.0, -1.0):
            y, d = self._side_table(sign)
            if y.size < 2:
                continue
            lower, upper = max(lo, y[0]), min(hi, y[-1])
            if upper > lower:
                sides.append((sign, y, d, lower, upper))
        return sides

    def integrate(self, phi, p, lo=0.0, hi=np.inf):
        total = 0.0
        for sign, y, d, lower, upper in self._sides(lo, hi):
            breaks = y[(y > lower) & (y < upper)]
            value, _ = integrate.quad(
                lambda v: phi(sign * v) * np.interp(v, y, d) * v ** p, lower, upper,
                points=breaks if breaks.size else None, limit=max(QUAD_LIMIT, 2 * y.size),
                epsabs=0.0, epsrel=1e-10,
            )
            total += value
        return float(total)

    def slice_moment(self, p, lo=0.0, hi=np.inf):
        return self.integrate(lambda x: 1.0, p, lo, hi)

    def mass(self, lo=0.0, hi=np.inf):
        return self.slice_moment(0, lo, hi)

    def signed_moment(self, lo=0.0, hi=np.inf):
        return self.integrate(np.sign, 1, lo, hi)

    def sample_slice(self, rng, size, lo=0.0, hi=np.inf):
        """Inverse of a finely tabulated CDF on each side"""
        sides = self._sides(lo, hi)
        if size and not sides:
            raise DomainError(f"Tabulated density has no mass with {lo} <= |x| < {hi}")
        tables = []
        for sign, y, d, lower, upper in sides:
            v = np.linspace(lower, upper, TABULATED_CDF_POINTS)
            cdf = integrate.cumulative_trapezoid(np.interp(v, y, d), v, initial=0.0)
            tables.append((sign, v, cdf))
        masses = np.array([cdf[-1] for _, _, cdf in tables])
        side = rng.choice(len(tables), size=size, p=masses / masses.sum())
        u = rng.random(size)
        out = np.empty(size)
        for index, (sign, v, cdf) in enumerate(tables):
            chosen = side == index
            out[chosen] = sign * np.interp(u[chosen] * cdf[-1], cdf, v)
        return out


def _region_bounds(region, epsilon):
    if region == ALL:
        return 0.0, np.inf
    if epsilon is None or epsilon <= 0:
        raise DomainError(f"Region '{region}' needs a positive epsilon")
    if region == SMALL:
        return 0.0, float(epsilon)
    if region == BIG:
        return float(epsilon), np.inf
    raise UsageError(f"Unknown region '{region}'")


def measure_moment(measure, p, region=ALL, epsilon=None):
    """int over the region of |x|^p dnu"""
    if p <= 0:
        raise DomainError(f"Moment order must be positive (got {p})")
    return measure.slice_moment(p, *_region_bounds(region, epsilon))


def third_moment_ratio(measure, epsilon):
    """
    int_{|x|<eps} |x|^3 dnu / sigma^(eps)^3, or None when nu puts no mass
    below eps.
    """
    variance = measure_moment(measure, 2, SMALL, epsilon)
    if variance == 0:
        return None
    return measure_moment(measure, 3, SMALL, epsilon) / variance ** 1.5


# =============================================
# TIME KERNELS
# =============================================

@dataclass(frozen=True)
class ConstantKernel:
    value: float = 1.0

    def time_factor(self, t, s):
        return self.value * np.ones_like(np.asarray(s, dtype=float))

    def time_moment(self, t, k):
        return abs(self.value) ** k * t

    def time_integral(self, t):
        return self.value * t

    def __call__(self, t, s, x):
        return self.time_factor(t, s) * np.ones_like(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class ExponentialKernel:
    """h_t(s) = exp(-lam (t - s)), the Ornstein-Uhlenbeck kernel"""
    lam: float

    def __post_init__(self):
        if self.lam <= 0:
            raise DomainError(f"Kernel rate must be positive (got {self.lam})")

    def time_factor(self, t, s):
        return np.exp(-self.lam * (t - np.asarray(s, dtype=float)))

    def time_moment(self, t, k):
        return -np.expm1(-k * self.lam * t) / (k * self.lam)

    def time_integral(self, t):
        return self.time_moment(t, 1)

    def __call__(self, t, s, x):
        return self.time_factor(t, s) * np.ones_like(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class PowerKernel:
    """h_t(s) = (t - s)^beta; |h|^3 is integrable for beta > -1/3"""
    beta: float

    def __post_init__(self):
        if self.beta <= -1.0 / 3.0:
            raise DomainError(f"Power kernel exponent must exceed -1/3 (got {self.beta})")

    def time_factor(self, t, s):
        return (t - np.asarray(s, dtype=float)) ** self.beta

    def time_moment(self, t, k):
        e = k * self.beta + 1.0
        return t ** e / e

    def time_integral(self, t):
        return self.time_moment(t, 1)

    def __call__(self, t, s, x):
        return self.time_factor(t, s) * np.ones_like(np.asarray(x, dtype=float))


KERNEL_NAMES = ('constant', 'exponential', 'power')


def get_kernel(name, param=None):
    """Named kernel; param is the constant value, the rate or the exponent"""
    if name == 'constant':
        return ConstantKernel(1.0 if param is None else param)
    if name in ('exponential', 'power') and param is None:
        raise UsageError(f"Kernel '{name}' needs a parameter")
    if name == 'exponential':
        return ExponentialKernel(param)
    if name == 'power':
        return PowerKernel(param)
    raise UsageError(f"Unknown time kernel '{name}' (choose from {', '.join(KERNEL_NAMES)})")


def _space_time_integral(measure, kernel, t, k, lo, hi, tensor=False):
    """int_0^t int_slice |h_t(s, x)|^k |x|^k dnu ds"""
    if not tensor:
        return kernel.time_moment(t, k) * measure.slice_moment(k, lo, hi)
    nodes, weights = gauss_legendre(0.0, t, TIME_NODES)
    inner = [measure.integrate(lambda x, s=s: np.abs(kernel(t, s, x)) ** k, k, lo, hi) for s in nodes]
    return float(np.dot(weights, inner))


def weighted_small_jump_condition(measure, kernel, t, epsilon, tensor=False):
    """
    int int_{[0,t] x {|x|<eps}} |x h_t(s,x)|^3 dnu ds / sigma~_t(eps)^3.

    ``tensor`` forces the direct two-dimensional quadrature instead of the
    factored time x measure form.
    """
    if t <= 0:
        raise DomainError(f"Time must be positive (got {t})")
    variance = _space_time_integral(measure, kernel, t, 2, 0.0, epsilon, tensor)
    if variance <= 0:
        raise NoSmallJumpsError(f"sigma~_t({epsilon})^2 = 0: no small jumps below {epsilon}")
    return _space_time_integral(measure, kernel, t, 3, 0.0, epsilon, tensor) / variance ** 1.5


# =============================================
# SAMPLING
# =============================================

@dataclass(frozen=True)
class JumpPath:
    times: np.ndarray
    sizes: np.ndarray
    epsilon: float
    T: float
    seed: int

    @property
    def count(self):
        return int(self.times.size)


def compound_poisson_slice(measure, lo, hi, T, rng):
    mass = measure.mass(lo, hi)
    count = rng.poisson(T * mass) if mass > 0 else 0
    times = np.sort(rng.random(count) * T)
    sizes = measure.sample_slice(rng, count, lo, hi) if count else np.empty(0)
    return times, np.asarray(sizes, dtype=float)


def sample_big_jumps(measure, epsilon, T, seed, index=0):
    """Compound Poisson jumps with |x| >= epsilon on [0, T]"""
    if epsilon <= 0 or T <= 0:
        raise DomainError("epsilon and T must be positive")
    times, sizes = compound_poisson_slice(measure, float(epsilon), np.inf, T, derive_stream(seed, index, 'jumps'))
    return JumpPath(times=times, sizes=sizes, epsilon=float(epsilon), T=float(T), seed=seed)


@dataclass(frozen=True)
class JumpLayer:
    lo: float
    hi: float
    compensator: float


@dataclass(frozen=True)
class SmallJumpReplicate:
    measure: object
    kernel: object
    t: float
    layers: tuple
    remainder_sd: float
    scale: float

    def __call__(self, context):
        value = 0.0
        for k, layer in enumerate(self.layers):
            times, sizes = compound_poisson_slice(
                self.measure, layer.lo, layer.hi, self.t, context.stream(f'layer{k}')
            )
            value += float(np.sum(self.kernel.time_factor(self.t, times) * sizes)) - layer.compensator
        if self.remainder_sd > 0:
            value += self.remainder_sd * float(context.stream('remainder').standard_normal())
        return {'X': value * self.scale}


def small_jump_layers(measure, kernel, t, epsilon, floor_divisor=LAYER_FLOOR_DIVISOR):
    """Compound-Poisson layers below epsilon and the Gaussian remainder sd"""
    if measure.finite_activity:
        return (JumpLayer(0.0, epsilon, kernel.time_integral(t) * measure.signed_moment(0.0, epsilon)),), 0.0
    levels = int(round(log2(floor_divisor)))
    layers = []
    for k in range(levels):
        lo, hi = epsilon * 2.0 ** -(k + 1), epsilon * 2.0 ** -k
        layers.append(JumpLayer(lo, hi, kernel.time_integral(t) * measure.signed_moment(lo, hi)))
    floor = epsilon * 2.0 ** -levels
    remainder = kernel.time_moment(t, 2) * measure.slice_moment(2, 0.0, floor)
    return tuple(layers), float(np.sqrt(remainder))


@dataclass(frozen=True)
class SmallJumpRow:
    epsilon: float
    dW: float
    se: float
    n: int
    third_moment_ratio: float
    weighted_ratio: float
    sample_variance: float
    floor_divisor: int
    settled: bool
    noise_floor: float


def _small_jump_distance(measure, kernel, t, epsilon, scale, divisor, n, seed, workers):
    layers, remainder_sd = small_jump_layers(measure, kernel, t, epsilon, divisor)
    task = SmallJumpReplicate(measure, kernel, float(t), layers, remainder_sd, scale)
    logger.info(f"Small-jump run eps={epsilon:g}: {len(layers)} layer(s), remainder sd {remainder_sd:.3g}")
    samples = run_ensemble(task, MCConfig(n, seed, workers)).samples['X']
    return empirical_w1_to_normal(samples, 0.0, 1.0, seed=seed), samples


def small_jump_clt_experiment(measure, kernel, t, epsilon_list, n, seed, workers=1,
                              floor_divisor=LAYER_FLOOR_DIVISOR, max_floor_divisor=LAYER_FLOOR_MAX_DIVISOR):
    """
    Empirical d_W(X~_t(eps), N(0,1)) for each eps.

    For infinite-activity measures the layer floor eps / divisor is pushed
    down by FLOOR_STEP until d_W moves by no more than its standard error,
    or the divisor would pass ``max_floor_divisor``. Every level replays the
    same streams, so the comparison is between common random numbers.
    """
    if n < 2:
        raise UsageError(f"Need at least 2 replicates (got {n})")
    if max_floor_divisor < floor_divisor:
        raise UsageError(f"max_floor_divisor {max_floor_divisor} is below floor_divisor {floor_divisor}")
    noise_floor = gaussian_noise_floor(n, seed)
    rows = []
    for index, epsilon in enumerate(epsilon_list):
        ratio = third_moment_ratio(measure, epsilon)
        if ratio is None:
            raise NoSmallJumpsError(f"No small jumps below epsilon={epsilon}: the experiment does not apply")
        scale = (kernel.time_moment(t, 2) * measure_moment(measure, 2, SMALL, epsilon)) ** -0.5
        run_seed = seed + index

        divisor = int(floor_divisor)
        distance, samples = _small_jump_distance(measure, kernel, t, epsilon, scale, divisor, n, run_seed, workers)
        settled = measure.finite_activity
        while not settled and divisor * FLOOR_STEP <= max_floor_divisor:
            divisor *= FLOOR_STEP
            deeper, deeper_samples = _small_jump_distance(
                measure, kernel, t, epsilon, scale, divisor, n, run_seed, workers,
            )
            settled = abs(deeper.value - distance.value) <= max(deeper.standard_error, distance.standard_error)
            distance, samples = deeper, deeper_samples
        if not settled:
            logger.warning(
                f"d_W at eps={epsilon:g} still moved beyond its standard error at floor divisor {divisor}"
            )

        rows.append(SmallJumpRow(
            epsilon=float(epsilon),
            dW=distance.value,
            se=distance.standard_error,
            n=n,
            third_moment_ratio=ratio,
            weighted_ratio=weighted_small_jump_condition(measure, kernel, t, epsilon),
            sample_variance=float(np.var(samples, ddof=1)),
            floor_divisor=divisor,
            settled=bool(settled),
            noise_floor=noise_floor,
        ))
    return rows


# =============================================
# DIAGNOSTICS
# =============================================

def asmussen_rosinski_diagnostic(measure, epsilons):
    """
    sigma^(eps) / eps along a decreasing eps grid. Growth without bound is
    sufficient for the Gaussian approximation of small jumps; reported only.
    """
    epsilons = np.sort(np.asarray(epsilons, dtype=float))[::-1]
    ratios = np.array([np.sqrt(measure_moment(measure, 2, SMALL, e)) / e for e in epsilons])
    growing = bool(np.all(np.diff(ratios) > 0))
    return epsilons, ratios, growing


@dataclass(frozen=True)
class FiniteDimensionalReport:
    times: np.ndarray
    covariance: np.ndarray
    third_order_terms: np.ndarray


def finite_dimensional_conditions(measure, kernel, times, epsilon):
    """
    Covariance K(i, j) of the standardized small-jump functionals at the
    given times, and the third-order terms that have to vanish as eps -> 0
    for the joint Gaussian limit.
    """
    times = np.asarray(times, dtype=float)
    sigma_hat_sq = measure_moment(measure, 2, SMALL, epsilon)
    if sigma_hat_sq == 0:
        raise NoSmallJumpsError(f"No small jumps below epsilon={epsilon}")
    scales = np.sqrt([kernel.time_moment(t, 2) * sigma_hat_sq for t in times])
    m = times.size
    covariance = np.empty((m, m))
    for i in range(m):
        for j in range(i, m):
            upper = min(times[i], times[j])
            if times[i] == times[j]:
                cross = kernel.time_moment(upper, 2)
            else:
                nodes, weights = gauss_legendre(0.0, upper, 256)
                cross = float(np.dot(weights, kernel.time_factor(times[i], nodes) * kernel.time_factor(times[j], nodes)))
            covariance[i, j] = covariance[j, i] = cross * sigma_hat_sq / (scales[i] * scales[j])
    terms = np.array([weighted_small_jump_condition(measure, kernel, t, epsilon) for t in times])
    return FiniteDimensionalReport(times=times, covariance=covariance, third_order_terms=terms)


@dataclass(frozen=True)
class PoincareCheck:
    sample_variance: float
    standard_error: float
    kernel_norm: float

    @property
    def z_score(self):
        if self.standard_error == 0:
            return 0.0
        return (self.sample_variance - self.kernel_norm) / self.standard_error


@dataclass(frozen=True)
class FirstChaosReplicate:
    measure: object
    kernel: object
    t: float
    epsilon: float
    compensator: float
    wiener_weight: float

    def __call__(self, context):
        times, sizes = compound_poisson_slice(self.measure, self.epsilon, np.inf, self.t, context.stream('poisson'))
        value = float(np.sum(self.kernel.time_factor(self.t, times) * sizes)) - self.compensator
        if self.wiener_weight:
            gaussian = np.sqrt(self.kernel.time_moment(self.t, 2)) * context.stream('wiener').standard_normal()
            value += self.wiener_weight * float(gaussian)
        return {'F': value}


def first_chaos_poincare_check(measure, kernel, t, epsilon, n, seed, wiener_weight=0.0, workers=1):
    """
    Sample variance of F = a int h dW + int int_{|x|>=eps} h x N~(ds, dx)
    against its kernel norm; first-chaos functionals attain equality in the
    Poincare inequality.
    """
    if n < 2:
        raise UsageError(f"Need at least 2 replicates (got {n})")
    compensator = kernel.time_integral(t) * measure.signed_moment(epsilon, np.inf)
    task = FirstChaosReplicate(measure, kernel, float(t), float(epsilon), compensator, float(wiener_weight))
    samples = run_ensemble(task, MCConfig(n, seed, workers)).samples['F']
    kernel_norm = kernel.time_moment(t, 2) * (wiener_weight ** 2 + measure.slice_moment(2, epsilon, np.inf))
    centered = (samples - samples.mean()) ** 2
    return PoincareCheck(
        sample_variance=float(np.var(samples, ddof=1)),
        standard_error=float(np.std(centered, ddof=1) / np.sqrt(n)),
        kernel_norm=float(kernel_norm),
    )
