"""Exception hierarchy; the CLI maps each class to an exit status."""


class FairCartError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(FairCartError, ValueError):
    """Invalid configuration: column specs, flags, hyperparameters."""


class DataError(FairCartError, ValueError):
    """Input data that cannot be used: missing files, non-binary columns, empty sets."""


class SchemaError(FairCartError, ValueError):
    """Malformed or incompatible serialized document."""
