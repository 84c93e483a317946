"""Exception hierarchy shared across the toolkit.

The CLI maps these to exit codes: ConfigError -> 2, InfeasibleError -> 3.
"""


class GigadcError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(GigadcError):
    """A scenario or catalog file is malformed or contains unknown keys."""


class InfeasibleError(GigadcError):
    """A requested design cannot be realized (budget, memory, or capacity)."""
