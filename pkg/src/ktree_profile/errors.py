"""Exception types shared across the package.

Each error carries the CLI exit code it maps to.
"""


class KTreeError(Exception):
    exit_code = 1


class ConfigError(KTreeError, ValueError):
    """Invalid parameters or malformed input."""

    exit_code = 2


class NonConvergenceError(KTreeError, ArithmeticError):
    """A numeric solver failed to reach its tolerance."""

    exit_code = 3


class ResourceGuardError(KTreeError):
    """The requested work exceeds a configured size limit."""

    exit_code = 4


class InconsistentSystemError(KTreeError, ArithmeticError):
    """A triangular coefficient system has no solution at some order."""

    exit_code = 3
