"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Input violates a structural or semantic constraint."""


class CapacityError(ValidationError):
    """Request exceeds a hard size limit (overflow or enumeration cap)."""


class DatasetError(ValidationError):
    """A CSV row could not be parsed.

    ``row`` is the 1-based data row (the header is not counted).
    """

    def __init__(self, message, row=None):
        self.row = row
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)
