"""Exception types shared across the package."""


class ContractViolation(ValueError):
    """An input broke a documented precondition (shape, norm, unitarity, index)."""


class UnsupportedInput(ValueError):
    """The input is well formed but outside what the routine handles."""


class InconsistencyError(RuntimeError):
    """A construction that is guaranteed to succeed did not.

    Raised instead of returning a silently wrong certificate.
    """
