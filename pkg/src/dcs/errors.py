"""Exception types shared across the package, mapped to CLI exit codes."""


class ValidationError(ValueError):
    """Malformed or inconsistent input data or arguments (CLI exit code 2)."""


class PreconditionError(ValueError):
    """A solver or operation precondition does not hold (CLI exit code 3)."""
