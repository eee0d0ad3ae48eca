"""Exception types shared across the package."""

import numpy as np


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class ShapeError(ValueError):
    """Array arguments have incompatible shapes."""


class NonInvertibleError(ValueError):
    """The requested inverse does not exist (e.g. an affinity entry equal to one)."""


class NonStationaryError(ValueError):
    """A dilation field that must be time independent varies in time."""


class SingularSystemError(np.linalg.LinAlgError):
    """A linear system is singular or numerically too ill-conditioned to solve."""

    def __init__(self, message, rcond=None):
        super().__init__(message)
        self.rcond = rcond


class QuadratureError(RuntimeError):
    """An integral failed to reach the requested accuracy."""
