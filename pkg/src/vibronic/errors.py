"""Exception hierarchy shared by all modules."""


class VibronicError(Exception):
    """Base class for library errors."""


class ValidationError(VibronicError, ValueError):
    """Input violates a documented precondition (shape, range, unitarity)."""


class ConstraintError(ValidationError):
    """A Bogoliubov transform fails the canonical commutation constraints."""

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class DecompositionError(VibronicError):
    """A factorization did not reconstruct its source within tolerance."""


class SolveError(VibronicError):
    """A linear solve was rejected (singular or residual too large)."""

    def __init__(self, message, condition=None, residual=None):
        super().__init__(message)
        self.condition = condition
        self.residual = residual


class CostGuardError(VibronicError):
    """A configured resource limit would be exceeded."""

    def __init__(self, guard, value, limit):
        super().__init__(f"{guard} = {value} exceeds limit {limit}")
        self.guard = guard
        self.value = value
        self.limit = limit
