"""Exception roots shared by all modules.

The command-line runner maps these to exit codes: configuration problems
exit with 2, numerical guard failures with 3.
"""


class NonlocalCauchyError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(NonlocalCauchyError):
    """Raised when an experiment configuration is malformed or inconsistent."""


class NumericalGuardError(NonlocalCauchyError):
    """Raised when a numerical safeguard refuses to produce a result."""


class ParameterError(NonlocalCauchyError, ValueError):
    """Raised when an operation is called with values outside its domain."""
