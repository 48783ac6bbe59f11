"""Exception types raised across the package."""


class WorstCaseError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(WorstCaseError, ValueError):
    """Non-finite data, dimension mismatch or malformed objective."""


class InvalidSegmentError(InvalidInputError):
    """Hermite segment with a non-positive length."""


class InvalidConfigError(WorstCaseError, ValueError):
    """Parameters outside their admissible ranges."""


class GeneratorInconsistencyError(WorstCaseError):
    """A generator rule produced a multiplier or step outside its admissible interval."""


class MethodInapplicableError(WorstCaseError):
    """The method cannot be applied at the current iterate (e.g. Newton on an indefinite Hessian)."""


class HardCaseError(WorstCaseError):
    """The regularized subproblem has no admissible multiplier (alpha = 0 with H + sigma I not positive definite)."""


class IncompleteTraceError(WorstCaseError):
    """A trace lacks the records needed by a membership check."""
