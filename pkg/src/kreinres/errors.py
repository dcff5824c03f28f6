"""Exception hierarchy shared by all kreinres modules."""


class KreinresError(Exception):
    """Base class for every error raised by the library."""


# numerical kernel
class SingularMatrix(KreinresError):
    pass


class NotHermitian(KreinresError):
    pass


class NoConvergence(KreinresError):
    pass


class DomainError(KreinresError):
    pass


# Krein structures
class DimensionMismatch(KreinresError):
    pass


class NotSelfadjoint(KreinresError):
    pass


class DegenerateRange(KreinresError):
    pass


# Klein-Gordon operators
class SpectrumHit(KreinresError):
    pass


class EpsUndefined(KreinresError):
    pass


class EpsSingular(KreinresError):
    pass


# functional calculus
class MissingDerivative(KreinresError):
    pass


class GrowthCheckFailed(KreinresError):
    pass


class QuadratureBudgetExceeded(KreinresError):
    pass


class SearchExhausted(KreinresError):
    """No definitizing polynomial within the degree budget.

    ``best_margin`` and ``best_coeffs`` describe the least negative candidate.
    """

    def __init__(self, message, best_margin=None, best_coeffs=None):
        super().__init__(message)
        self.best_margin = best_margin
        self.best_coeffs = best_coeffs


class TailFitFailed(KreinresError):
    pass


# groups and weights
class GrowthViolation(KreinresError):
    pass


class Divergent(KreinresError):
    pass


class FourierMismatch(KreinresError):
    pass


class FitUnstable(KreinresError):
    pass


# Mourre / LAP
class IndefiniteWindow(KreinresError):
    pass


class HypothesisFailed(KreinresError):
    pass


# harness
class SpecInvalid(KreinresError):
    pass


class ConfigError(KreinresError):
    """Malformed configuration file (CLI exit code 1)."""
