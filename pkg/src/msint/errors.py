"""Exception hierarchy shared across the package."""


class MsintError(Exception):
    """Base class for all package-specific errors."""


class StructureError(MsintError):
    """Coefficients do not carry the structure required by an operation."""


class SingularOperatorError(MsintError):
    """A grid operator (or one of its Fourier-mode blocks) is not invertible."""


class ReconstructionError(MsintError):
    """Auxiliary-variable reconstruction hit a kernel mode with nonzero data."""


class StepFailureError(MsintError):
    """The fixed-point solver of an implicit step did not converge."""

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class ProfileSolveError(MsintError):
    """Newton iteration for a traveling-wave profile failed."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class MeasurementError(MsintError):
    """A numerical frequency could not be extracted from the run."""


class InsufficientDataError(MsintError):
    """Not enough trajectory samples for the requested diagnostic."""


class ConfigError(MsintError):
    """Run configuration is malformed or violates an invariant."""
