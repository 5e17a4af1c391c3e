"""Exception types shared across the package."""


class OfdmBlindError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(OfdmBlindError):
    """Invalid parameters or violated call contract (a caller bug)."""


class DataError(OfdmBlindError):
    """Input data cannot support the requested operation."""
