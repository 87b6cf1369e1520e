"""Exception hierarchy shared by all modules."""


class PressvoteError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(PressvoteError):
    """An input violates a documented invariant."""


class SequencingError(PressvoteError):
    """A round was appended out of order."""


class ConfigurationError(PressvoteError):
    """A scenario or command configuration is unusable."""


class DomainError(PressvoteError):
    """A numeric argument is outside the domain of a formula."""


class StabilityError(DomainError):
    """The queue model is unstable (requires lambda > Lambda > 0)."""


class InsufficientReplicasError(PressvoteError):
    """A Monte Carlo estimate came back with zero hits; raise replicas."""
