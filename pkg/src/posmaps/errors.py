"""Exception types raised across the package."""


class DimensionError(ValueError):
    """Operands have incompatible or malformed shapes."""


class NotHermiticityPreservingError(ValueError):
    """A quantity that must be real came out complex."""


class NotTracePreservingError(ValueError):
    """A trace-preservation hypothesis failed."""


class NotPositiveDefiniteError(ValueError):
    def __init__(self, message: str, min_eigenvalue: float):
        super().__init__(f"{message} (min eigenvalue {min_eigenvalue:.3e})")
        self.min_eigenvalue = min_eigenvalue


class DegenerateInputError(ValueError):
    """An eigenspace did not contain a usable Hermitian element."""


class EigenvalueNotFoundError(ValueError):
    """Requested eigenvalue is not in the spectrum within tolerance."""


class NumericalFailure(RuntimeError):
    """An eigensolver or exponential did not converge."""
