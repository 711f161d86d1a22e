"""Exception types raised across the package."""


class InvalidArgument(ValueError):
    pass


class DomainError(ValueError):
    """Evaluation time outside a schedule's interval."""


class DegenerateParameterization(ValueError):
    """The Hamiltonian's overall frequency vanishes, so the angles are undefined."""


class HyperbolicRegimeError(ValueError):
    """SU(1,1) coefficients left the elliptic (bounded) regime."""


class UnsupportedTermError(ValueError):
    pass


class SingularityError(ArithmeticError):
    """The invariant's polar angle hit a pole of its parameterization."""

    def __init__(self, message: str, time: float | None = None):
        super().__init__(message)
        self.time = time


class IntegrationAccuracyError(ArithmeticError):
    pass


class TransformationError(ArithmeticError):
    """A unitary-transformation contract (I_V = C, H_V diagonal) was violated."""


class ContinuationError(ArithmeticError):
    """Hyperbolic continuation produced a non-Hermitian invariant."""
