"""Exception types shared across the harness."""


class ChaintimeError(Exception):
    """Base class for all harness errors."""


class ContractViolationError(ChaintimeError):
    """An argument broke a documented precondition or invariant."""


class ParameterError(ChaintimeError):
    """An image-processing primitive received invalid parameters."""


class OutOfFrameError(ChaintimeError):
    """A render target lies fully outside the canvas (trial invalid)."""


class DerenderFailureError(ChaintimeError):
    """A detector could not recover a required observable."""


class BackendFailureError(ChaintimeError):
    """An image-generation backend failed after exhausting retries."""


class ReplayMissError(BackendFailureError):
    """A replay backend had no stored frame for the requested key."""


class TemplatingError(ChaintimeError):
    """A prompt template placeholder could not be filled."""


class AggregationError(ChaintimeError):
    """A metric aggregation received degenerate input."""


class ConfigError(ChaintimeError):
    """A run configuration file is missing or malformed."""
