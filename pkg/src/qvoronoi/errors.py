"""Exception hierarchy shared by every module in the package."""


class QVoronoiError(Exception):
    """Base class for all errors raised by qvoronoi."""


class InvalidDensityMatrix(QVoronoiError, ValueError):
    """A matrix failed one of the density-matrix conditions.

    ``magnitude`` is the size of the violation (e.g. the Hermitian residual
    or the most negative eigenvalue).
    """

    condition = "density"

    def __init__(self, magnitude, message=None):
        self.magnitude = float(magnitude)
        super().__init__(message or f"{self.condition} violated by {self.magnitude:.3e}")


class NotHermitian(InvalidDensityMatrix):
    condition = "hermiticity"


class TraceNotOne(InvalidDensityMatrix):
    condition = "unit trace"


class NotPSD(InvalidDensityMatrix):
    condition = "positive semidefiniteness"


class DimensionMismatch(QVoronoiError, ValueError):
    pass


class SingularState(QVoronoiError, ValueError):
    """The logarithm of a rank-deficient state was requested."""


class SingularSecondArgument(SingularState):
    """Second argument of the divergence is not full rank on the support of the first."""


class ConvergenceFailure(QVoronoiError, RuntimeError):
    pass


class OutsideBall(QVoronoiError, ValueError):
    pass


class RadiusOutOfRange(QVoronoiError, ValueError):
    pass


class NotUnit(QVoronoiError, ValueError):
    pass


class DegenerateR(QVoronoiError, ValueError):
    """The off-diagonal block radius r vanishes, so the eigenbasis is not unique."""


class PureRho(QVoronoiError, ValueError):
    """The evaluation point is pure (r >= 1); log(rho) is undefined."""


class IdenticalSites(QVoronoiError, ValueError):
    pass


class EmptySites(QVoronoiError, ValueError):
    pass


class ImpureSite(QVoronoiError, ValueError):
    pass


class PointSetMismatch(QVoronoiError, ValueError):
    pass


class GridTooCoarse(QVoronoiError, ValueError):
    pass


class ImageOutsideBall(QVoronoiError, ValueError):
    pass


class NonConvergence(QVoronoiError, RuntimeError):
    """Raised in strict mode when the minimax gap is not met; carries the partial result."""

    def __init__(self, result, message=None):
        self.result = result
        super().__init__(message or f"gap {result.gap:.3e} not reached after {result.iterations} iterations")


class ConfigError(QVoronoiError, ValueError):
    pass
