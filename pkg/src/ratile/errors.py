"""Error taxonomy shared by the library, the service and the CLI.

The CLI maps these to its documented exit codes: configuration problems exit
with 2, violated mathematical preconditions with 3, broken internal
invariants with 4.
"""


class RatileError(Exception):
    exit_code = 4


class ConfigError(RatileError):
    """Malformed or inconsistent user input."""
    exit_code = 2


class PreconditionError(RatileError):
    """Mathematically invalid request (non-expanding matrix, b = 1, ...)."""
    exit_code = 3


class InvariantError(RatileError):
    """A certified internal property failed; indicates a bug."""
    exit_code = 4
