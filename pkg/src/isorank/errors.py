"""Exception types shared by the modules and mapped to CLI exit codes."""


class FieldError(ValueError):
    """The modulus is not an odd prime."""


class RepeatedParameterError(ValueError):
    """Two parameters coincide; ``positions`` are the 1-based indices of the pair."""

    def __init__(self, message: str, positions: tuple[int, int]):
        super().__init__(message)
        self.positions = positions


class BudgetExceeded(RuntimeError):
    """The requested enumeration is larger than the configured budget."""
