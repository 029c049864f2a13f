"""Exception types shared across the package."""


class PanofovError(Exception):
    """Base class for package errors."""


class DomainError(PanofovError, ValueError):
    """An argument is outside the mathematical domain of an operation."""


class DimensionError(PanofovError, ValueError):
    """Image dimensions violate an operation's requirements."""


class CoverageError(PanofovError, ValueError):
    """Requested angular coordinates fall outside a panorama's coverage."""


class GeometryError(PanofovError, ValueError):
    """A geometric placement is impossible (footprint exceeds canvas, ...)."""


class InputError(PanofovError, ValueError):
    """Invalid or inconsistent user-supplied data."""


class SolverError(PanofovError, RuntimeError):
    """The linear solver failed to converge."""

    def __init__(self, message: str, residual: float, iterations: int):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class ExternalGeneratorError(PanofovError, RuntimeError):
    """An external generator command failed; carries the command transcript."""

    def __init__(self, message: str, transcript: str = ""):
        super().__init__(message)
        self.transcript = transcript


class BatchError(PanofovError, RuntimeError):
    """Every item of a batch run failed."""
