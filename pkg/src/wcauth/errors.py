"""Exception hierarchy shared across the package.

Every error raised on a bad input derives from :class:`WcauthError`, so
callers (and the CLI) can map failure kinds to exit codes without string
matching.
"""


class WcauthError(Exception):
    """Base class for all package errors."""


class DomainError(WcauthError):
    """An argument is outside the mathematical domain of the operation."""


class ConfigError(WcauthError):
    """A configuration combines options that do not make sense together."""


class BudgetError(WcauthError):
    """The request would exceed the enforced desk-scale resource budget."""


class FamilyMismatchError(DomainError):
    """Two key sets refer to different hash families."""
