"""Exception types raised by fg-sfrql.

Every error derives from :class:`FgSfrqlError` and from the builtin type a
caller would naturally catch, so ``except ValueError`` keeps working for
bad configurations, shapes and inputs.
"""


class FgSfrqlError(Exception):
    """Base class for all library errors."""


class ConfigurationError(FgSfrqlError, ValueError):
    """Invalid configuration: layouts, hyperparameters, grid files, env vars."""


class ShapeError(FgSfrqlError, ValueError):
    """Array widths or parameter layouts do not line up."""


class InputError(FgSfrqlError, ValueError):
    """Invalid runtime input such as an out-of-range action or a bad CSV."""


class UsageError(FgSfrqlError, RuntimeError):
    """An operation was called in a state that does not allow it."""


class NumericError(FgSfrqlError, ArithmeticError):
    """A computation produced a non-finite value."""
