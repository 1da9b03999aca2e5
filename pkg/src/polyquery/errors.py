"""Exception kinds shared across the package."""


class ParameterError(ValueError):
    """An argument is outside the operation's domain (bad n, index, bit string...)."""


class DomainError(ValueError):
    """The quantity is mathematically undefined for this input."""


class CapabilityError(RuntimeError):
    """The request exceeds an explicit size cap or the exact gate set."""


class ValidationError(ValueError):
    """A circuit or file is malformed or dimensionally inconsistent."""


class InconsistencyError(RuntimeError):
    """A precondition that should follow from earlier checks does not hold."""
