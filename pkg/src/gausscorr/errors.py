"""Exception hierarchy shared by all modules."""


class GaussCorrError(Exception):
    """Base class for every error raised by this package."""


class DomainError(GaussCorrError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class QuadratureError(GaussCorrError):
    """Adaptive integration exhausted its evaluation budget."""


class BracketError(GaussCorrError):
    """A root finder was given an interval without a strict sign change."""


class ConvergenceError(GaussCorrError):
    """An iterative solver ran out of iterations."""


class InfeasibleError(GaussCorrError):
    """No configuration satisfies the requested centroid/weight constraints."""


class DegenerateRegionError(GaussCorrError):
    """A region has too little Gaussian mass for a meaningful centroid."""


class OutOfScopeError(GaussCorrError):
    """Inputs violate the hypothesis under which a check is claimed."""


class InsufficientDataError(GaussCorrError):
    """Too few usable samples were supplied."""
