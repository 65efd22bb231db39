"""Exception hierarchy.

Every error carries a stable ``code`` (its class name) so the command line
front end can report it in machine-parsable form.
"""


class GenMeanError(Exception):
    """Base class for all errors raised by this package."""

    @property
    def code(self):
        return type(self).__name__


class InvalidInput(GenMeanError, ValueError):
    """Malformed arguments or documents."""


class EmptySpace(InvalidInput):
    pass


class NonPositiveWeight(InvalidInput):
    pass


class DuplicateLabel(InvalidInput):
    pass


class IndexOutOfRange(InvalidInput, IndexError):
    pass


class ShapeMismatch(InvalidInput):
    pass


class OrderMismatch(InvalidInput):
    pass


class ArityError(InvalidInput):
    pass


class BadExponent(InvalidInput):
    pass


class BadGrid(InvalidInput):
    pass


class NonPositiveRho(InvalidInput):
    pass


class NotADensity(InvalidInput):
    """Negative, asymmetric, or wrongly normalized density values."""


class BudgetExceeded(GenMeanError):
    """A grid allocation would exceed the configured entry budget."""

    def __init__(self, entries, budget):
        super().__init__(f"grid of {entries} entries exceeds budget {budget}")
        self.entries = entries
        self.budget = budget


class NotAGeneralizedMean(GenMeanError):
    """Kernel recovery round-trip residual above tolerance."""

    def __init__(self, residual, tol):
        super().__init__(f"round-trip residual {residual:.3e} exceeds tolerance {tol:.1e}")
        self.residual = residual
        self.tol = tol


class SectionBoundFails(GenMeanError):
    """The density does not satisfy the lower-bound condition on last-variable sections."""
