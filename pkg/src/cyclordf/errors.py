"""Exception types shared across the package."""


class CyclordfError(Exception):
    """Base class for all package-specific errors."""


class InvalidModel(CyclordfError):
    """A source model violates one of its structural invariants."""


class DegenerateCovariance(CyclordfError):
    """A covariance matrix is numerically indefinite beyond tolerance."""


class SingularCovariance(CyclordfError):
    """A covariance matrix is too close to singular for log-det work."""


class NonPositiveEigenvalue(CyclordfError):
    """An eigenvalue that must be strictly positive is not."""


class NonPositiveDistortion(CyclordfError):
    """A distortion budget that must be strictly positive is not."""


class RateOutOfRange(CyclordfError):
    """A target rate exceeds what the solver can resolve at its distortion floor."""


class BetaViolation(CyclordfError):
    """A covariance diagonal entry exceeds the declared variance bound."""


class ConfigError(CyclordfError):
    """A run configuration file or override is malformed."""
