"""Error types raised across the package."""


class InputError(ValueError):
    """Malformed or inconsistent arguments."""


class ParseError(InputError):
    """Model file could not be parsed. Carries the offending line number."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class CapacityError(InputError):
    """Instance too large for exhaustive or statevector treatment."""


class ConfigurationError(InputError):
    """Unknown method, policy or option combination."""


class NumericError(ArithmeticError):
    """A computation produced a non-finite value or failed to converge."""


class UnsupportedCaseError(InputError):
    """Parameters fall on a boundary without a closed form."""


class DegenerateInstanceError(InputError):
    """Instance has no negative ground energy, so ratios are undefined."""
