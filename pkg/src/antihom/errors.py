"""Exception hierarchy shared by all modules."""


class AntihomError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(AntihomError, ValueError):
    """Invalid user input: bad flags, malformed files, inconsistent configuration."""


class PhysicsError(AntihomError, ValueError):
    """The requested model is unphysical (gain, non-unitary evolution, ...)."""


class CapacityError(PhysicsError):
    """Request exceeds the supported photon-number or mode-count limits."""


class FitError(AntihomError, RuntimeError):
    """A curve fit could not be carried out or did not converge."""
