"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class PreconditionError(ValueError):
    """A documented precondition on the inputs does not hold."""


class NumericalError(RuntimeError):
    """A numerical procedure failed to reach its accuracy target."""


class NotPositiveDefiniteError(NumericalError):
    """``I + sign*K`` is not positive definite; carries the smallest eigenvalue."""

    def __init__(self, min_eigenvalue, message=None):
        self.min_eigenvalue = float(min_eigenvalue)
        super().__init__(
            message
            or f"matrix not positive definite (min eigenvalue {self.min_eigenvalue:.3e});"
            " sigma too small for the attractive sign"
        )


class UncertifiedAccuracyWarning(UserWarning):
    """Issued when a special function is evaluated outside its tested domain."""
