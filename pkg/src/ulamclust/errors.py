"""Exception types shared across the package."""


class UlamError(Exception):
    """Base class for all errors raised by ulamclust."""


class InputError(UlamError, ValueError):
    """Malformed or inconsistent input (lengths, alphabets, preconditions)."""


class ConfigError(UlamError, ValueError):
    """Invalid solver configuration, e.g. an exhaustive family that is too large."""


class GuardError(UlamError, RuntimeError):
    """A brute-force size guard refused to run."""


class WorkWarning(UserWarning):
    """Emitted when an exact search is expected to exceed its work bound."""
