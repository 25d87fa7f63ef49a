"""Exception types shared across the package."""


class RenewalArmaError(Exception):
    """Base class for all library errors."""


class ValidationError(RenewalArmaError):
    """A lifetime distribution, generating function, or model violates its invariants."""


class LatticeError(ValidationError):
    """Lifetime support lies on a proper sublattice of the integers."""


class FactorizationError(RenewalArmaError):
    """Numerical spectral factorization failed or produced inconsistent results."""


class SingularEvaluationError(RenewalArmaError):
    """Generating function evaluated at a pole or at its removable singularity."""
