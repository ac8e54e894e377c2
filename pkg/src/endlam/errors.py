"""Exception hierarchy shared across the package."""


class EndlamError(Exception):
    """Base class for all package errors."""


class ValidationError(EndlamError):
    """Input violates a documented precondition or schema."""


class SceneError(ValidationError):
    """Scene file is malformed; message carries the offending field path."""


class NotHyperbolicError(ValidationError):
    """An operation requiring a hyperbolic isometry got something else."""


class NoIntersectionError(ValidationError):
    """Two geodesics were expected to cross but do not."""


class NumericDegeneracyError(EndlamError):
    """A computation left the numerically trustworthy regime."""


class BudgetExceededError(EndlamError):
    """An enumeration or substitution exceeded its configured budget."""


class ConvergenceError(EndlamError):
    """An iterative computation failed to reach its tolerance."""
