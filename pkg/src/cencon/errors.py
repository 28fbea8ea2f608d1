"""Exception hierarchy.

Each class carries the CLI exit code it maps to.
"""


class CenconError(Exception):
    exit_code = 1


class InputError(CenconError, ValueError):
    """Malformed or out-of-range input."""

    exit_code = 2


class DegenerateConfigurationError(InputError):
    """Coincident bodies or another configuration with a zero mutual distance."""


class DimensionError(CenconError):
    """The configuration does not have the dimension an operation requires."""


class CertificationError(CenconError):
    """A centrality or Dziobek certificate could not be established."""


class NormalizationError(CenconError):
    """No real dilation brings the configuration to r0 = 1."""


class SolverError(CenconError):
    """An iterative solve failed to converge."""


class ConsistencyError(CenconError):
    """Two routes that must agree did not (internal inconsistency)."""

    exit_code = 3


class NonRealizableError(CenconError):
    """Distances that no Euclidean configuration of the requested dimension has."""


class HypothesisError(CenconError):
    """A result is only asserted under hypotheses the input does not meet."""
