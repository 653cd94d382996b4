class NoFeasible(Exception):
    """Raised when a projected amplitude vector is entirely zero.

    In a chain contraction this means no feasible completion exists for the
    variables fixed so far (an infeasible instance, or linear-mode underflow).
    """


class ModeMismatch(ValueError):
    pass


class InstanceError(ValueError):
    """An instance failed validation or could not be parsed."""

    def __init__(self, message, line=None, field=None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)


class Unreachable(Exception):
    pass


class CapExceeded(Exception):
    """Brute-force enumeration would exceed the configured assignment cap."""
