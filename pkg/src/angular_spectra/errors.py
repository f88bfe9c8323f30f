"""Exception hierarchy shared by all modules."""


class AngularSpectraError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(AngularSpectraError, ValueError):
    """Invalid experiment configuration."""


class NumericError(AngularSpectraError):
    """Base class for numerical failures."""


class RankDeficient(NumericError):
    pass


class DimensionMismatch(AngularSpectraError, ValueError):
    pass


class SingularMatrix(NumericError):
    pass


class OutOfRange(AngularSpectraError, IndexError):
    pass


class DegenerateWindow(NumericError):
    pass


class RateAmbiguous(NumericError):
    """A finite-time rate sits too close to a spectral gap to assign it a bundle."""


class NotSupported(AngularSpectraError):
    pass


class EmptySet(AngularSpectraError, ValueError):
    pass


class NonIntegralStepCount(AngularSpectraError, ValueError):
    pass


class RationalityUndecided(NumericError):
    """phi/pi is numerically indistinguishable from a low-denominator rational."""


class NewtonDiverged(NumericError):
    pass


class DegenerateStep(NumericError):
    pass
