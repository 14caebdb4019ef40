"""Exception types shared across the package."""


class FixpairError(Exception):
    """Base class for all errors raised by this package."""


class DomainExceededError(FixpairError):
    """A staircase/table comparison function was queried beyond its last knot.

    Signals insufficient coverage; the caller must extend the function,
    never extrapolate.
    """


class InsufficientCoverageError(FixpairError):
    """The level set {psi <= r} is not exhausted within the covered range."""


class NonCoerciveEvidenceError(FixpairError):
    """psi is bounded on the covered range and r lies above that bound."""


class InvalidKnotsError(FixpairError):
    """Staircase knots are not strictly ascending from 0 with entries > 1."""


class PropertyNotExactError(FixpairError):
    """An operation requires exact super-additivity/coercivity status."""


class CertificateMissingError(FixpairError):
    """An operation refused to run without a verified certificate."""


class UnsupportedSpaceError(FixpairError):
    """The operation is defined only on the other kind of space."""


class InstanceFormatError(FixpairError):
    """An instance file failed to parse or validate."""


class RetryBudgetExhaustedError(FixpairError):
    """Instance generation ran out of retries.

    Carries the last rejected instance for inspection.
    """

    def __init__(self, message, last_instance=None):
        super().__init__(message)
        self.last_instance = last_instance
