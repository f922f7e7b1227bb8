"""Exception types shared across the package."""


class CapExceeded(ValueError):
    """A size cap was exceeded (register width, enumeration budget, ...)."""


class SchemaError(ValueError):
    """A program file or serialized object violates its schema."""
