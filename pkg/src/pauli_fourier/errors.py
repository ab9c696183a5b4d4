"""Exception types shared across the package."""


class PauliFourierError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(PauliFourierError, ValueError):
    """Operands have incompatible qubit counts or shapes."""


class ValidationError(PauliFourierError, ValueError):
    """An input value is malformed (bad index, non-Hermitian Pauli, ...)."""


class ContractViolation(PauliFourierError, ValueError):
    """A documented precondition between operands does not hold."""


class DomainError(PauliFourierError, ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class CapacityError(PauliFourierError, RuntimeError):
    """A computation would exceed a configured size limit."""


class InternalConsistencyError(PauliFourierError, RuntimeError):
    """A result failed an internal sanity check."""


class ConfigError(PauliFourierError, ValueError):
    """An experiment configuration is invalid."""
