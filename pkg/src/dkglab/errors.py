class DKGError(Exception):
    """Base class for all errors raised by dkglab."""


class ContractError(DKGError, ValueError):
    """A field was passed in the wrong representation or on the wrong grid."""


class ParameterError(DKGError, ValueError):
    """A numerical parameter is outside its admissible range."""


class DomainError(DKGError, ValueError):
    """A function was evaluated outside its domain (e.g. angle of a zero vector)."""


class BlowUpError(DKGError, RuntimeError):
    """Non-finite values appeared during time stepping."""

    def __init__(self, time, message=None):
        self.time = time
        super().__init__(message or f"non-finite values detected at t = {time:.6g}")
