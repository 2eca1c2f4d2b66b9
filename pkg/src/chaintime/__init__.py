"""chaintime: step-by-step physical simulation harness for image models.

Generates parameterized physics stimuli, drives an iterative
image-prediction protocol against pluggable backends, de-renders the
generated images back to physical observables with classic computer
vision, and scores predictions against analytic ground truth.
"""

__version__ = "0.1.0"

from .errors import (
    AggregationError,
    BackendFailureError,
    ChaintimeError,
    ConfigError,
    ContractViolationError,
    DerenderFailureError,
    OutOfFrameError,
    ParameterError,
    ReplayMissError,
    TemplatingError,
)

__all__ = [
    "__version__",
    "AggregationError",
    "BackendFailureError",
    "ChaintimeError",
    "ConfigError",
    "ContractViolationError",
    "DerenderFailureError",
    "OutOfFrameError",
    "ParameterError",
    "ReplayMissError",
    "TemplatingError",
]
