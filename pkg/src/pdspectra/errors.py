"""Exception hierarchy shared by all modules."""


class PdSpectraError(Exception):
    """Base class for every error raised by the package."""


class NonConvergent(PdSpectraError):
    """A quadrature or series could not certify the requested tolerance."""


class TemperedWithoutCutoff(PdSpectraError):
    """Pointwise evaluation was requested for a tempered (infinite mass) measure."""


class NotHermitian(PdSpectraError):
    pass


class NotPositiveDefinite(PdSpectraError):
    pass


class GridTooCoarse(PdSpectraError):
    """Two successive grid refinements disagree beyond tolerance."""


class GridTooLarge(PdSpectraError):
    pass


class NotDifferentiable(PdSpectraError):
    pass


class KernelMismatch(PdSpectraError):
    pass


class MeasureMismatch(PdSpectraError):
    pass


class TailNotCertified(PdSpectraError):
    pass


class DepthInsufficient(PdSpectraError):
    pass


class DegenerateConfig(PdSpectraError):
    pass


class FactorizationFailure(PdSpectraError):
    pass


class InvalidMeasure(PdSpectraError):
    pass
