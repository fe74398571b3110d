"""Exception and warning types shared across the package."""


class ValidationError(ValueError):
    """Bad arguments or malformed configuration (CLI exit code 2)."""


class RegimeMismatchError(ValidationError):
    """An operation was asked to run outside its dissipation regime."""

    def __init__(self, expected, got, context=""):
        self.expected = expected
        self.got = got
        msg = f"expected regime {expected}, got {got}"
        if context:
            msg += f" ({context})"
        super().__init__(msg)


class PreconditionError(ValidationError):
    """A documented mathematical precondition does not hold."""


class ConstructionError(RuntimeError):
    """A constructive procedure (bisection, mollification) failed to certify."""


class CapacityError(ConstructionError):
    """The truncated spectrum is too small for the requested construction."""

    def __init__(self, msg, max_achievable=None):
        super().__init__(msg)
        self.max_achievable = max_achievable


class CertificationError(RuntimeError):
    """A numerical certificate failed to verify (CLI exit code 3)."""


class OracleRefusal(RuntimeError):
    """The independent integrator declines a problem outside its guarantees."""


class OracleFailure(RuntimeError):
    """The independent integrator exceeded its step budget or diverged.

    Test infrastructure treats this as skip-with-warning, never as a pass.
    """


class ResolutionError(ValidationError):
    """Sampled data is too coarse for the requested kernel evaluation."""


class AccuracyWarning(UserWarning):
    """A quadrature tolerance could not be met; carries the achieved bound."""

    def __init__(self, msg, achieved=None):
        super().__init__(msg)
        self.achieved = achieved
