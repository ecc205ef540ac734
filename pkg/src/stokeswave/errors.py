"""Exception types raised across the package."""


class StokesWaveError(Exception):
    """Base class for all package errors."""


class NoConvergence(StokesWaveError):
    """An iterative solve did not reach its tolerance.

    ``last_good`` holds the last converged wave (continuation only), ``height``
    the wave height that failed and ``waves`` any waves converged before it.
    """

    def __init__(self, message, *, last_good=None, height=None, waves=()):
        super().__init__(message)
        self.last_good = last_good
        self.height = height
        self.waves = list(waves)


class DegenerateJacobian(StokesWaveError):
    """|dz/dw| vanished: near-stagnation, the wave is too steep."""


class NotInFluid(StokesWaveError):
    """The physical point lies above the free surface."""


class StepTooLarge(StokesWaveError):
    """A fixed integration step advanced more than an eighth of a period."""


class TooFewPoints(StokesWaveError):
    pass


class NonpositiveValue(StokesWaveError):
    pass


class MissingSurfacePoint(StokesWaveError):
    pass


class FunctionalEvaluationError(StokesWaveError):
    """Wraps a per-point failure inside a sweep with the offending ``p``."""

    def __init__(self, message, p):
        super().__init__(f"{message} (at p={p!r})")
        self.p = p
