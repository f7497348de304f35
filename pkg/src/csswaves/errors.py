"""Exception hierarchy shared by all modules.

Each class maps onto one failure category; the CLI turns them into exit codes.
"""


class CSSError(Exception):
    """Base class for all errors raised by this package."""


class NumericError(CSSError, ArithmeticError):
    """A non-finite value appeared in an input or an intermediate result."""


class UsageError(CSSError, ValueError):
    """Arguments are inconsistent, e.g. fields sampled on different grids."""


class GridMismatchError(UsageError):
    pass


class CapacityError(CSSError):
    """The requested number of eigenpairs was too small to pin down ell."""


class DegeneracyError(CSSError):
    """The quadratic form is (numerically) degenerate: an eigenvalue sits at 0."""


class HypothesisError(CSSError, ValueError):
    """A nonlinearity violates a structural growth requirement."""


class ConvergenceError(CSSError):
    """An iterative solver stopped without meeting its tolerance.

    The ``history`` attribute carries the iteration trace collected so far.
    """

    def __init__(self, message, history=None):
        super().__init__(message)
        self.history = list(history or [])


class GrowthError(CSSError):
    """The energy along a ray never reached the requested negative level.

    ``witness`` holds the scanned ``(s, energy)`` pairs.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = list(witness or [])


class ConfigError(CSSError, ValueError):
    """Malformed or unknown configuration entry."""

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key
