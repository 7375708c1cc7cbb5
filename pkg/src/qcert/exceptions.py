"""Exception types raised across the package."""


class QcertError(Exception):
    """Base class for all package errors."""


class InvalidStateError(QcertError):
    """A matrix or Bloch vector does not describe a valid qubit state."""


class InvalidParameterError(QcertError):
    """A channel, bound or filter parameter is out of its allowed range."""


class ZeroProbabilityOutcomeError(QcertError):
    """A measurement update was requested for an outcome of (near-)zero probability."""


class ResourceLimitError(QcertError):
    """A request exceeds a hard resource cap (e.g. tensor-power dimension)."""


class ImpoverishmentError(QcertError):
    """Total likelihood underflow: the particle filter cannot be renormalized."""


class UndefinedDivergenceError(QcertError):
    """KL divergence undefined: posterior puts weight where the prior has none."""


class ConfigError(QcertError):
    """A run configuration file or value is invalid."""
