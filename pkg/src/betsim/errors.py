"""Exception types shared across the package."""


class BetsimError(Exception):
    """Base class for package-specific failures."""


class ConfigError(BetsimError):
    """Invalid configuration document, section, key, or value."""


class DataError(BetsimError):
    """Malformed or unusable input data."""


class ConvergenceError(BetsimError):
    """A numerical routine failed to converge.

    Parameters
    ----------
    message : str
        Human-readable description.
    estimates : pair of float, optional
        The last two successive estimates, so callers can judge how far
        the refinement got before giving up.
    """

    def __init__(self, message, estimates=None):
        super().__init__(message)
        self.estimates = None if estimates is None else tuple(estimates)
