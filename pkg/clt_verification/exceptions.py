# clt_verification/exceptions.py

"""
Error hierarchy for the toolkit.

Every error carries the process exit code the management commands report:
1 usage/validation, 2 theorem precondition unmet, 3 numerical failure.
"""


class SteinLabError(Exception):
    """Base class for all toolkit errors"""
    exit_code = 1


# =============================================
# USAGE AND DOMAIN ERRORS (exit 1)
# =============================================

class UsageError(SteinLabError):
    """Caller passed arguments of the wrong shape or size"""


class DomainError(SteinLabError, ValueError):
    """Argument outside the mathematical domain of the operation"""


class QuadratureDomainError(DomainError):
    """Integrand evaluated to a non-finite value at a quadrature node"""


class DivergentMomentError(DomainError):
    """Requested moment of a Levy measure is infinite"""


class SymmetryMismatchError(SteinLabError):
    """Subordinator declared symmetric but f(x) != f(-x) at a check point"""


class MeasureNormalizationError(SteinLabError):
    """Levy measure does not satisfy the required normalization"""


# =============================================
# THEOREM PRECONDITIONS (exit 2)
# =============================================

class InapplicableTheoremError(SteinLabError):
    """A hypothesis of the limit theorem being evaluated does not hold"""
    exit_code = 2


class ConditionStarError(InapplicableTheoremError):
    """Covariance decay could not be matched to a power-law rate"""


class NoPowerLawError(ConditionStarError):
    """Log-log fit of the covariance tail is not linear enough"""


class DegenerateDecayError(ConditionStarError):
    """Fitted limit ratio M is numerically zero"""


class BorderlineDecayError(ConditionStarError):
    """Fitted decay exponent sits in the ambiguous band around 1"""


class InconsistentModelError(ConditionStarError):
    """Decay model fields contradict each other"""


class NoSmallJumpsError(InapplicableTheoremError):
    """Levy measure puts no mass below the truncation level"""


# =============================================
# NUMERICAL FAILURES (exit 3)
# =============================================

class NumericalFailure(SteinLabError):
    exit_code = 3


class SamplingError(NumericalFailure):
    """Neither circulant embedding nor dense factorization could sample the field"""


class KernelConstructionError(NumericalFailure):
    """Covariance matrix stayed indefinite after jitter"""


class HermiteTruncationError(NumericalFailure):
    """Hermite tail c_Q^2 Q! exceeds the configured share of Var[f(Z)]"""


class EnsembleFailure(NumericalFailure):
    """One or more replicates raised; carries the failing indices"""

    def __init__(self, message, failed_indices=()):
        super().__init__(message)
        self.failed_indices = tuple(failed_indices)
