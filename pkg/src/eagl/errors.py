"""Exception types shared across the package."""


class InputError(ValueError):
    """Malformed user input: bad CSV contents, shapes, or flag combinations."""


class NumericalError(RuntimeError):
    """A numerical procedure failed in a way that is not an input problem."""


class NotPositiveDefinite(NumericalError):
    """A matrix required to be positive definite is not.

    ``pivot`` is the zero-based index of the first failing Cholesky pivot
    when known, else ``None``.
    """

    def __init__(self, message: str, pivot: int | None = None):
        super().__init__(message)
        self.pivot = pivot
