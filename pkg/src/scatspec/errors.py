"""Exception and warning types raised across the package."""


class ScatSpecError(Exception):
    """Base class for all package errors."""


class NotHermitianError(ScatSpecError, ValueError):
    pass


class DimensionMismatchError(ScatSpecError, ValueError):
    pass


class PotentialError(ScatSpecError, ValueError):
    """Potential placement or decay requirements are violated."""


class BandEdgeError(ScatSpecError, ValueError):
    """Energy too close to (or beyond) a threshold of the free spectrum."""


class SpectralIrregularityError(ScatSpecError, ArithmeticError):
    """``I + T(lambda + i0) V0`` is numerically singular at the requested energy."""

    def __init__(self, message, condition_number=None):
        super().__init__(message)
        self.condition_number = condition_number


class ResolutionError(ScatSpecError, ArithmeticError):
    """Step halving changed the result by more than the allowed amount."""


class HankelConvergenceError(ScatSpecError, ArithmeticError):
    """Top singular values moved too much when the truncation was doubled."""

    def __init__(self, message, values_m, values_2m):
        super().__init__(message)
        self.values_m = values_m
        self.values_2m = values_2m


class TruncationError(ScatSpecError, ValueError):
    """A limit-set query falls below the certified truncation level."""


class DegenerateLimitSetError(ScatSpecError, ValueError):
    pass


class StageError(ScatSpecError):
    """Wraps a failure inside a sweep, naming the stage that raised it."""

    def __init__(self, stage, delta, cause):
        super().__init__(f"stage {stage!r} failed at delta={delta}: {cause}")
        self.stage = stage
        self.delta = delta
        self.cause = cause


class UnstableThresholdWarning(RuntimeWarning):
    """A counting threshold sits within the instability band of an eigenvalue."""


class QuadratureWarning(RuntimeWarning):
    pass


class OnsetWarning(RuntimeWarning):
    """A match flag turned false again at a smaller delta."""
