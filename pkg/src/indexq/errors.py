"""Exception types shared across the package."""


class InvalidArgument(ValueError):
    pass


class InvalidState(ValueError):
    """A state was handed to an operation expecting another space or basis."""


class RefusedOperation(RuntimeError):
    """An exhaustive routine was asked to work above its size cap."""


class PromiseViolation(RuntimeError):
    """The oracle's output is inconsistent with every promised case."""
