"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes, so solver code raises them instead of
returning sentinel values.
"""


class PppMimoError(Exception):
    """Base class for all package errors."""


class DomainError(PppMimoError, ValueError):
    """An argument is outside the mathematical domain of the operation."""


class PoleError(DomainError):
    """A denominator Pochhammer/gamma factor vanishes inside a truncated sum."""


class NonConvergenceError(PppMimoError):
    """An iterative evaluation did not reach its tolerance within its budget."""


class NumericalInstabilityError(PppMimoError):
    """Cancellation in an alternating sum exceeded the trust guard."""


class NoRootError(PppMimoError):
    """A bracketed solver found no sign change in its stated bracket."""


class InfeasibleError(PppMimoError):
    """The requested constraint cannot be met (e.g. outage below the noise floor)."""


class SingularChannelError(PppMimoError):
    """A sampled channel matrix is numerically rank deficient."""


class ConfigError(PppMimoError, ValueError):
    """A CLI/experiment configuration is malformed."""
