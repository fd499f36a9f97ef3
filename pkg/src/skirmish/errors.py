"""Exception types shared across subpackages."""


class ContractViolation(ValueError):
    """An operation was invoked outside its stated preconditions."""


class PolicyRuntimeError(Exception):
    """A policy expression failed at evaluation time (e.g. division by zero).

    Carries the source location of the failing expression so the simulator
    can attach the tick at which it happened.
    """

    def __init__(self, message, span):
        super().__init__(message)
        self.message = message
        self.span = span
