"""Exception types raised by the solver."""


class QHDError(Exception):
    """Base class for all package errors."""


class OddResolution(QHDError, ValueError):
    pass


class InsufficientResolution(QHDError, ValueError):
    pass


class ModeAboveCutoff(QHDError, ValueError):
    pass


class InvalidParams(QHDError, ValueError):
    pass


class ConfigError(QHDError, ValueError):
    pass


class VacuumApproach(QHDError, FloatingPointError):
    """Raised when min(1 + rho) drops to the vacuum floor."""


class NonFinite(QHDError, FloatingPointError):
    pass


class DegenerateSample(QHDError, ValueError):
    pass


class MisalignedTrajectories(QHDError, ValueError):
    pass


class InsufficientPoints(QHDError, ValueError):
    pass


class AllBelowNoiseFloor(QHDError, ValueError):
    pass
