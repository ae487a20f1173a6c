# clt_verification/subordinated_clt.py

"""
Linear functionals of Gaussian-subordinated stationary fields:

    F_T = V~(T)^{-1/2} * int_0^T (f(X_t) - E[f(Z)]) dt

Covariance decay is matched to V(T) = K T^{-alpha} by regression on the
covariance tail (condition *), which fixes the normalizer V~, the limiting
variance, the predicted Wasserstein rate and the two Wiener-space bound
terms.
"""

from dataclasses import dataclass
import logging
from math import factorial

import numpy as np

from .distance import empirical_w1_to_normal
from .exceptions import (
    BorderlineDecayError, DegenerateDecayError, DomainError, InapplicableTheoremError,
    InconsistentModelError, NoPowerLawError, UsageError,
)
from .gaussian_processes import StationarySampler, covariance_eval
from .hermite import fourth_moment_finite, hermite_coefficients, membership_in_M_C
from .mc_engine import MCConfig, run_ensemble
from .numerics import Grid, gauss_hermite_expectation, grid_integral, loglog_slope, propagated_slope_se

logger = logging.getLogger('clt_verification.analysis')

INTEGRABLE = 'Integrable'
TV_TO_ZERO = 'TVto0'
TV_PRIME_TO_ZERO = 'TVprimeTo0'

MIN_R_SQUARED = 0.99
BORDERLINE_BAND = (0.98, 1.02)
TAIL_LAGS = 64
# rounding noise of the difference formulas, relative to C(0) per unit lag
DEGENERATE_TOL = 64 * np.finfo(float).eps
UNIT_VARIANCE_TOL = 1e-8


@dataclass(frozen=True)
class DecayModel:
    """V(T) = K T^{-alpha} and M = lim C(T)/V(T)"""
    integrable: bool
    alpha: float
    K: float
    M: float
    regime: str
    r_squared: float = 1.0

    def __post_init__(self):
        if self.K <= 0:
            raise InconsistentModelError(f"Decay scale K must be positive (got {self.K})")
        if self.integrable:
            if self.regime != INTEGRABLE:
                raise InconsistentModelError(f"Integrable decay cannot be in regime {self.regime}")
            return
        if self.M == 0 or self.alpha <= 0:
            raise InconsistentModelError("Non-integrable decay needs M != 0 and a decreasing V")
        expected = TV_TO_ZERO if self.alpha > 1 else TV_PRIME_TO_ZERO
        if self.regime != expected:
            raise InconsistentModelError(
                f"alpha={self.alpha:.4g} implies regime {expected}, not {self.regime}"
            )

    def V(self, T):
        return self.K * np.asarray(T, dtype=float) ** (-self.alpha)

    def to_dict(self):
        return {
            'integrable': self.integrable,
            'alpha': self.alpha,
            'K': self.K,
            'M': self.M,
            'regime': self.regime,
            'r_squared': self.r_squared,
        }


@dataclass(frozen=True)
class CltReport:
    T: float
    sigma_sq_limit: float
    predicted_rate: float
    predicted_rate_exponent: float
    bound_term_1: float
    bound_term_2: float
    empirical_variance: float
    empirical_variance_se: float
    empirical_dW: float
    empirical_dW_se: float
    n: int
    seed: int


# =============================================
# CONDITION * AND NORMALIZER
# =============================================

def fit_condition_star(model, T_max, n_lags=TAIL_LAGS):
    """
    Fit the covariance tail on [T_max/4, T_max] to M * T^{-alpha} (K = 1).

    alpha > 1 means the covariance is integrable; alpha in (0, 1) is the
    long-memory regime where T V'(T) -> 0. The band around alpha = 1 is
    rejected.
    """
    if T_max < 16:
        raise UsageError(f"T_max={T_max} leaves too few tail lags; use T_max >= 16")
    if n_lags < 16:
        raise UsageError(f"Need at least 16 tail lags (got {n_lags})")

    lags = np.geomspace(T_max / 4.0, T_max, n_lags)
    values = np.asarray(covariance_eval(model, lags), dtype=float)
    scale = abs(model.c0) * T_max
    if np.max(np.abs(values)) <= DEGENERATE_TOL * scale:
        raise DegenerateDecayError(f"Covariance of {model} vanishes on the tail: M = 0")
    if np.any(values == 0) or np.any(np.sign(values) != np.sign(values[-1])):
        raise NoPowerLawError(f"Covariance of {model} changes sign on [{T_max / 4:g}, {T_max:g}]")

    fit = loglog_slope(lags, np.abs(values))
    if fit.r_squared < MIN_R_SQUARED:
        raise NoPowerLawError(f"Tail fit r^2={fit.r_squared:.4f} below {MIN_R_SQUARED}")
    alpha = -fit.slope
    if alpha <= 0:
        raise NoPowerLawError(f"Covariance does not decay on the tail (alpha={alpha:.4g})")
    if BORDERLINE_BAND[0] <= alpha <= BORDERLINE_BAND[1]:
        raise BorderlineDecayError(f"alpha={alpha:.4f} is too close to 1 to choose a regime")

    M = float(np.sign(values[-1]) * np.exp(fit.intercept))
    if abs(M) <= DEGENERATE_TOL * scale:
        raise DegenerateDecayError(f"Fitted M={M:.3e} is numerically zero")

    integrable = alpha > 1
    regime = INTEGRABLE if integrable else TV_PRIME_TO_ZERO
    logger.info(f"Condition * for {model}: alpha={alpha:.4f}, M={M:.4g}, r2={fit.r_squared:.5f}")
    return DecayModel(
        integrable=integrable, alpha=float(alpha), K=1.0, M=M, regime=regime,
        r_squared=fit.r_squared,
    )


def v_tilde(decay, T):
    """T if the covariance is integrable, else int_0^T int_0^y V(x) dx dy"""
    if T <= 0:
        raise DomainError(f"Horizon must be positive (got {T})")
    if decay.integrable:
        return float(T)
    alpha = decay.alpha
    if alpha >= 1:
        raise InconsistentModelError(f"Non-integrable normalizer needs alpha < 1 (got {alpha})")
    return float(decay.K * T ** (2 - alpha) / ((1 - alpha) * (2 - alpha)))


def _v_integral(decay, T):
    """int_0^T V with V held at K on [0, 1]"""
    alpha = decay.alpha
    if T <= 1:
        return decay.K * T
    if alpha == 1:
        return decay.K * (1 + np.log(T))
    return decay.K * (1 + (T ** (1 - alpha) - 1) / (1 - alpha))


# =============================================
# LIMITING VARIANCE AND RATES
# =============================================

def integrated_covariance_powers(model, decay, Q, horizon=1024.0, dt=1.0 / 16):
    """2 * int_0^inf C(t)^q dt for q = 1..Q, with the power-law tail beyond the horizon"""
    grid = Grid.from_step(horizon, dt)
    values = np.asarray(covariance_eval(model, grid.points), dtype=float)
    integrals = np.empty(Q)
    tail_error = 0.0
    T = grid.t_end
    for q in range(1, Q + 1):
        body = float(grid_integral(values ** q, grid))
        exponent = decay.alpha * q - 1
        tail = decay.M ** q * decay.K ** q * T ** (-exponent) / exponent
        integrals[q - 1] = 2.0 * (body + tail)
        tail_error = max(tail_error, abs(2.0 * tail))
    return integrals, tail_error


def limiting_variance(decay, expansion, model=None, f=None):
    """
    Sigma^2 = 2 M c_1^2 for long memory; for integrable covariance
    Sigma^2 = sum_q c_q^2 q! * 2 int_0^inf C(t)^q dt.
    """
    if f is not None and not membership_in_M_C(f, expansion, decay.integrable):
        raise InapplicableTheoremError(
            f"{f.name} is not in M_C for {'integrable' if decay.integrable else 'non-integrable'} covariance"
        )
    if not decay.integrable:
        c1 = expansion.first_coefficient
        if abs(c1) <= 1e-10:
            raise InapplicableTheoremError("E[f(Z)Z] = 0: the long-memory limit theorem does not apply")
        return float(2.0 * decay.M * c1 ** 2)

    if model is None:
        raise UsageError("The integrable branch needs the covariance model")
    integrals, tail_error = integrated_covariance_powers(model, decay, expansion.Q)
    factorials = np.array([float(factorial(q)) for q in range(1, expansion.Q + 1)])
    value = float(np.sum(expansion.c[1:] ** 2 * factorials * integrals))
    logger.info(f"Integrable limiting variance {value:.6g} (tail truncation {tail_error:.2e})")
    return value


def predicted_rate(decay, T):
    """Upper-bound rate for d_W(F_T / sqrt(Var F_T), N(0,1)) up to constants"""
    if T <= 0:
        raise DomainError(f"Horizon must be positive (got {T})")
    if decay.integrable:
        return float(T ** -0.25)
    V = float(decay.V(T))
    if decay.regime == TV_PRIME_TO_ZERO:
        return float((decay.K * max(1.0, decay.alpha) * T ** (-decay.alpha)) ** 0.25)
    return float(max(V, T * V ** 2 / _v_integral(decay, T)) ** 0.25)


def predicted_rate_exponent(decay):
    if decay.integrable:
        return -0.25
    if decay.regime == TV_PRIME_TO_ZERO:
        return -decay.alpha / 4.0
    return -min(decay.alpha, 1.0) / 4.0


def rate_summary_exponent(H):
    """Exponent (1 v 2H)/4 - 1/2 of the rate for fGn and fractional OU fields"""
    return max(1.0, 2.0 * H) / 4.0 - 0.5


# =============================================
# SIMULATION
# =============================================

@dataclass(frozen=True)
class SubordinatedReplicate:
    sampler: StationarySampler
    f: object
    mean_f: float
    scale: float

    def __call__(self, context):
        path = self.sampler.draw(context.stream('field'))
        integral = grid_integral(self.f(path) - self.mean_f, self.sampler.grid)
        return {'F_T': float(integral) * self.scale}


def _check_unit_variance(model):
    if abs(model.c0 - 1.0) > UNIT_VARIANCE_TOL:
        raise DomainError(f"The field must have unit variance, C(0)={model.c0:.6g}")


def simulate_F_T(model, f, decay, T, dt=0.25, n=1000, seed=0, workers=1, chunk=256):
    """n independent realizations of F_T; E[f(Z)] recomputed by quadrature"""
    if dt > 1:
        raise UsageError(f"dt={dt} does not resolve the covariance; use dt <= 1")
    if n < 2:
        raise UsageError(f"Need at least 2 replicates (got {n})")
    _check_unit_variance(model)
    grid = Grid.from_step(T, dt)
    task = SubordinatedReplicate(
        sampler=StationarySampler(model, grid),
        f=f,
        mean_f=gauss_hermite_expectation(f),
        scale=v_tilde(decay, grid.t_end) ** -0.5,
    )
    result = run_ensemble(task, MCConfig(n, seed, workers, chunk))
    return result.samples['F_T']


def discretization_check(model, f, decay, T, dt=0.25, n=1000, seed=0, workers=1, tolerance=0.02):
    """Relative change of the sample variance of F_T when dt is halved"""
    coarse = np.var(simulate_F_T(model, f, decay, T, dt, n, seed, workers), ddof=1)
    fine = np.var(simulate_F_T(model, f, decay, T, dt / 2, n, seed, workers), ddof=1)
    change = abs(fine - coarse) / fine
    return float(change), bool(change < tolerance)


def gaussian_bound_terms(model, f, decay, T, dt=0.25):
    """
    Closed-form upper bounds for the first-derivative and contraction
    conditions of the Wiener-space second order Poincare inequality.
    """
    _check_unit_variance(model)
    d1_moment = fourth_moment_finite(f.deriv1)
    d2_moment = fourth_moment_finite(f.deriv2)
    if d1_moment is None or d2_moment is None:
        raise InapplicableTheoremError(f"E|f'(Z)|^4 or E|f''(Z)|^4 is not finite for {f.name}")

    grid = Grid.from_step(T, dt)
    u = grid.points
    abs_cov = np.abs(np.asarray(covariance_eval(model, u), dtype=float))
    double_integral = 2.0 * float(grid_integral((grid.t_end - u) * abs_cov, grid))
    single_integral = float(grid_integral(abs_cov, grid))
    normalizer = v_tilde(decay, grid.t_end)

    term1 = d1_moment * (double_integral / normalizer) ** 2
    term2 = 8.0 * d2_moment * model.c0 * grid.t_end * single_integral ** 3 / normalizer ** 2
    return float(term1), float(term2)


def clt_sweep(model, f, decay, T_list, n, seed, dt=0.25, workers=1, expansion=None):
    """One CltReport per horizon; d_W is measured against N(0, Sigma^2)"""
    expansion = expansion or hermite_coefficients(f)
    sigma_sq = limiting_variance(decay, expansion, model=model, f=f)
    reports = []
    for index, T in enumerate(T_list):
        samples = simulate_F_T(model, f, decay, T, dt, n, seed + index, workers)
        distance = empirical_w1_to_normal(samples, 0.0, np.sqrt(sigma_sq), seed=seed + index)
        variance = float(np.var(samples, ddof=1))
        term1, term2 = gaussian_bound_terms(model, f, decay, T, dt)
        reports.append(CltReport(
            T=float(T),
            sigma_sq_limit=sigma_sq,
            predicted_rate=predicted_rate(decay, T),
            predicted_rate_exponent=predicted_rate_exponent(decay),
            bound_term_1=term1,
            bound_term_2=term2,
            empirical_variance=variance,
            empirical_variance_se=variance * np.sqrt(2.0 / (n - 1)),
            empirical_dW=distance.value,
            empirical_dW_se=distance.standard_error,
            n=n,
            seed=seed + index,
        ))
        logger.info(f"T={T:g}: Var={variance:.4g} (limit {sigma_sq:.4g}), dW={distance.value:.4g}")
    return reports


def fit_dW_rate(reports):
    """Log-log slope of the empirical d_W over the sweep and its propagated standard error"""
    if len(reports) < 3:
        raise UsageError(f"Rate fit needs at least 3 horizons (got {len(reports)})")
    Ts = [report.T for report in reports]
    dWs = [max(report.empirical_dW, np.finfo(float).tiny) for report in reports]
    fit = loglog_slope(Ts, dWs)
    return fit, propagated_slope_se(Ts, dWs, [report.empirical_dW_se for report in reports])
