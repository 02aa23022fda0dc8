"""Exception hierarchy.

Everything raised on purpose by this package derives from NCFormsError so
callers (and the CLI) can distinguish modelling errors from plain bugs.
"""


class NCFormsError(Exception):
    """Base class for all package errors."""


class CoefficientKindError(NCFormsError):
    """Operation applied to an unsupported coefficient type."""


class WindowMismatchError(NCFormsError):
    """Grid operands live on incompatible windows."""


class CalculusMismatchError(NCFormsError):
    """Forms from different calculi were combined."""


class GradeError(NCFormsError):
    """Operation undefined for the given form degree."""


class SingularityError(NCFormsError):
    """A pointwise inverse hit a (near-)singular value."""


class ObstructionError(NCFormsError):
    """A closed form failed to integrate to a single-valued potential.

    Carries the measured periods so callers can report how badly
    single-valuedness fails.
    """

    def __init__(self, message, periods=None):
        super().__init__(message)
        self.periods = periods if periods is not None else {}


class NewtonDivergenceError(NCFormsError):
    """Newton iteration failed to converge within the iteration budget."""


class OverflowAbortError(NCFormsError):
    """A simulated field left the trusted numerical range."""


class ConfigError(NCFormsError):
    """Malformed experiment configuration."""
