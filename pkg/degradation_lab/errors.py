"""
Define the exception hierarchy shared by every subsystem.
"""


class LabError(Exception):
    """Root of all errors raised deliberately by degradation_lab."""


class CovarianceError(LabError):
    """A covariance matrix failed its Cholesky factorisation."""

    def __init__(self, minor: int, message: str = ""):
        self.minor = minor
        super().__init__(
            message or f"matrix is not positive definite: leading minor {minor}"
        )


class KernelError(LabError):
    """A Λ-time kernel has a nonpositive increment."""


class ConditioningError(LabError):
    """A conditional-sampling request is malformed."""


class EstimationError(LabError):
    """The concentrated scale parameters cannot be computed."""


class FitError(LabError):
    """No optimizer start produced a finite profile likelihood."""


class DesignError(LabError):
    """A sampling-design request cannot be satisfied."""


class ScenarioError(LabError):
    """A scenario run was aborted."""


class StoreError(LabError):
    """A flat file could not be read or written."""
