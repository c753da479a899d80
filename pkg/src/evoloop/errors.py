"""Exception hierarchy shared across the pipeline."""


class EvoloopError(Exception):
    """Base class for all package errors."""


class FormatError(EvoloopError):
    """A file or wire payload is malformed."""


class ValidationError(EvoloopError):
    """A value violates a declared invariant."""


class ConfigError(EvoloopError):
    """Bad configuration: unknown key, missing value, or invalid range."""


class StateError(EvoloopError):
    """An operation was applied to an object in the wrong state."""


class BackendError(EvoloopError):
    """A remote backend failed after bounded retries."""


class CapacityError(EvoloopError):
    """A pool is too small for the requested draw."""


class LeakageError(EvoloopError):
    """Eval-split data reached a training-only code path."""
