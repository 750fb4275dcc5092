"""Exception types shared across the package.

The command line front end maps these onto exit codes, so library code
should raise the most specific class that applies.
"""


class HeomFieldError(Exception):
    """Base class for all package specific errors."""


class ConfigError(HeomFieldError):
    """Invalid configuration: unknown keys, bad types, unphysical values."""


class HierarchyTooLargeError(ConfigError):
    """Requested hierarchy exceeds the configured index budget."""


class NumericalError(HeomFieldError):
    """Base class for failures of the numerics themselves."""


class NumericalInstabilityError(NumericalError):
    """Integration blew up, usually a too-large time step or truncation depth."""


class DegenerateSteadyStateError(NumericalError):
    """The generator admits more than one stationary state."""


class SpectrumNormalizationError(NumericalError):
    """Spectrum normalization is undefined (zero or non-positive maximum)."""


class ConvergenceError(HeomFieldError):
    """An iterative procedure ran out of budget before reaching tolerance."""


class SteadyStateNotConvergedError(ConvergenceError):
    """Long-time propagation did not settle below the requested tolerance."""
