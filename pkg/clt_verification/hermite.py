# clt_verification/hermite.py

"""
Hermite machinery for Gaussian-subordinated functionals.

Probabilists' convention throughout: He_0 = 1, He_1 = x,
He_{q+1}(x) = x He_q(x) - q He_{q-1}(x), orthogonal under N(0,1) with
E[He_p(Z) He_q(Z)] = q! when p == q.
"""

from dataclasses import dataclass, field
from math import factorial
import logging
from typing import Callable

import numpy as np
from scipy.stats import qmc

from .exceptions import (
    DomainError, HermiteTruncationError, SymmetryMismatchError, UsageError,
)
from .numerics import DEFAULT_HERMITE_NODES, gauss_hermite_expectation

logger = logging.getLogger('clt_verification.analysis')

DEFAULT_ORDER = 20
DEFAULT_TAIL_TOLERANCE = 0.01
FIRST_COEFFICIENT_TOL = 1e-10
SYMMETRY_CHECK_POINTS = 128
SYMMETRY_CHECK_RANGE = 5.0


@dataclass(frozen=True)
class SubordinatorFunction:
    """The real function f of class C^2 together with f' and f''"""
    eval: Callable
    deriv1: Callable
    deriv2: Callable
    declared_symmetric: bool = False
    name: str = 'custom'

    def __call__(self, x):
        return self.eval(x)


@dataclass(frozen=True)
class HermiteExpansion:
    c: np.ndarray = field(repr=False)
    Q: int
    variance_of_f: float
    tail_bound: float

    @property
    def mean(self):
        return float(self.c[0])

    @property
    def first_coefficient(self):
        return float(self.c[1])


def hermite_eval(q, x):
    """Probabilists' Hermite polynomial He_q at x (scalar or array)"""
    if q < 0:
        raise DomainError(f"Hermite order must be nonnegative (got {q})")
    x = np.asarray(x, dtype=float)
    previous = np.ones_like(x)
    if q == 0:
        return previous if previous.ndim else float(previous)
    current = x.copy()
    for k in range(1, q):
        previous, current = current, x * current - k * previous
    return current if current.ndim else float(current)


def hermite_coefficients(f, Q=DEFAULT_ORDER, n_nodes=DEFAULT_HERMITE_NODES,
                         tail_tolerance=DEFAULT_TAIL_TOLERANCE):
    """
    c_q = E[f(Z) He_q(Z)] / q! for q = 0..Q.

    The last two retained terms c_q^2 q!, q = Q-1, Q, are reported as the
    truncation tail (one of them vanishes for an even or odd f); if it
    exceeds ``tail_tolerance`` of the retained variance the expansion is
    rejected.
    """
    if Q < 1:
        raise UsageError(f"Truncation order must be at least 1 (got {Q})")
    coefficients = np.array([
        gauss_hermite_expectation(lambda x, q=q: f(x) * hermite_eval(q, x), n_nodes) / factorial(q)
        for q in range(Q + 1)
    ])
    weights = np.array([float(factorial(q)) for q in range(1, Q + 1)])
    variance = float(np.sum(coefficients[1:] ** 2 * weights))
    last = slice(max(1, Q - 1), Q + 1)
    tail = float(np.sum(coefficients[last] ** 2 * weights[last.start - 1:]))

    if variance > 0 and tail > tail_tolerance * variance:
        logger.warning(
            f"Hermite tail {tail:.3e} exceeds {tail_tolerance:.0%} of Var[f(Z)]={variance:.3e} for {f.name}"
        )
        raise HermiteTruncationError(
            f"Hermite expansion of {f.name} not converged at Q={Q} (tail {tail:.3e})"
        )

    coefficients.setflags(write=False)
    return HermiteExpansion(c=coefficients, Q=Q, variance_of_f=variance, tail_bound=tail)


def subordinated_covariance(expansion, rho):
    """Cov[f(Z1), f(Z2)] for standard normals with correlation rho"""
    if abs(rho) > 1:
        raise DomainError(f"rho={rho} is not a correlation")
    q = np.arange(1, expansion.Q + 1)
    factorials = np.array([float(factorial(k)) for k in q])
    return float(np.sum(expansion.c[1:] ** 2 * factorials * float(rho) ** q))


def symmetry_check_points():
    sampler = qmc.Sobol(d=1, scramble=False)
    unit = sampler.random_base2(m=int(np.log2(SYMMETRY_CHECK_POINTS)))[:, 0]
    return SYMMETRY_CHECK_RANGE * (2.0 * unit - 1.0)


def is_numerically_symmetric(f, tol=1e-9):
    x = symmetry_check_points()
    left = np.asarray(f(x), dtype=float)
    right = np.asarray(f(-x), dtype=float)
    return bool(np.all(np.abs(left - right) <= tol * (1.0 + np.abs(left))))


def membership_in_M_C(f, expansion, covariance_integrable):
    """
    Admissibility of f for the subordinated CLT.

    Integrable covariance: f must be symmetric (the declaration is verified).
    Non-integrable covariance: E[f(Z) Z] = c_1 must be nonzero.
    """
    if covariance_integrable:
        if f.declared_symmetric and not is_numerically_symmetric(f):
            raise SymmetryMismatchError(f"{f.name} is declared symmetric but f(x) != f(-x)")
        return f.declared_symmetric
    return abs(expansion.first_coefficient) > FIRST_COEFFICIENT_TOL


def fourth_moment_finite(g, n_nodes=DEFAULT_HERMITE_NODES):
    """E[|g(Z)|^4] by quadrature, or None when it is not finite"""
    try:
        value = gauss_hermite_expectation(lambda x: np.abs(g(x)) ** 4, n_nodes)
    except DomainError:
        return None
    return value if np.isfinite(value) else None


# Named subordinators for the command line

def _zeros(x):
    return np.zeros_like(np.asarray(x, dtype=float))


def _ones(x):
    return np.ones_like(np.asarray(x, dtype=float))


def _identity(x):
    return np.asarray(x, dtype=float)


def _square(x):
    return np.asarray(x, dtype=float) ** 2


def _double(x):
    return 2.0 * np.asarray(x, dtype=float)


def _twos(x):
    return 2.0 * _ones(x)


def _cube(x):
    return np.asarray(x, dtype=float) ** 3


def _cube_deriv1(x):
    return 3.0 * np.asarray(x, dtype=float) ** 2


def _cube_deriv2(x):
    return 6.0 * np.asarray(x, dtype=float)


def _hermite3(x):
    x = np.asarray(x, dtype=float)
    return x ** 3 - 3.0 * x


def _hermite3_deriv1(x):
    return 3.0 * np.asarray(x, dtype=float) ** 2 - 3.0


def _neg_sin(x):
    return -np.sin(x)


def _neg_cos(x):
    return -np.cos(x)


SUBORDINATORS = {
    'identity': SubordinatorFunction(_identity, _ones, _zeros, False, 'identity'),
    'square': SubordinatorFunction(_square, _double, _twos, True, 'square'),
    'cube': SubordinatorFunction(_cube, _cube_deriv1, _cube_deriv2, False, 'cube'),
    'hermite3': SubordinatorFunction(_hermite3, _hermite3_deriv1, _cube_deriv2, False, 'hermite3'),
    'cosine': SubordinatorFunction(np.cos, _neg_sin, _neg_cos, True, 'cosine'),
}


def get_subordinator(name):
    try:
        return SUBORDINATORS[name]
    except KeyError:
        raise UsageError(f"Unknown subordinator '{name}' (choose from {', '.join(sorted(SUBORDINATORS))})")
