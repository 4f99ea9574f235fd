"""Exception types shared across the library.

Grouped here so the command-line layer can map each failure mode to a
stable exit status without importing every module.
"""


class DomainError(ValueError):
    """An argument lies outside the operation's mathematical domain."""


class DegenerateBasisError(DomainError):
    """Eigenbasis requested at a level where the eigenvectors do not span."""


class OscillatoryRegimeError(DomainError):
    """Decay-rate formula evaluated where the discriminant is negative."""


class InvalidSegmentError(ValueError):
    """Profile segment endpoints violate the b = 0 requirement."""


class NonConvergenceError(RuntimeError):
    """Integration stopped early (step underflow or step-count cap).

    Carries the partial trajectory accumulated so far.
    """

    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory


class NegativityError(RuntimeError):
    """Active density dipped below the negativity threshold while shooting.

    Expected behavior in the oscillatory regime, where no non-negative
    wave exists. Carries the offending abscissa and value, plus the
    trajectory up to detection.
    """

    def __init__(self, message, z=None, value=None, trajectory=None):
        super().__init__(message)
        self.z = z
        self.value = value
        self.trajectory = trajectory


class BudgetError(RuntimeError):
    """No first maximum (or no convergence) within the z budget."""

    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory


class BlowUpError(RuntimeError):
    """Simulation produced non-finite fields. Carries the last good series."""

    def __init__(self, message, series=None):
        super().__init__(message)
        self.series = series


class ContaminatedMeasurementError(RuntimeError):
    """Front came too close to the domain boundary during measurement."""


class SplittingError(RuntimeError):
    """Eigenvalue splitting margin violated at a spectral parameter."""


class ContourResolutionError(RuntimeError):
    """Winding-number refinement exhausted its subdivision levels."""
