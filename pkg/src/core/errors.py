class SpectralError(Exception):
    """Base class for every error raised by the toolkit."""


class InvalidMatrix(SpectralError, ValueError):
    pass


class DimensionMismatch(InvalidMatrix):
    pass


class NotHermitian(SpectralError, ValueError):
    pass


class NotPSD(SpectralError, ValueError):
    pass


class ZeroWeight(SpectralError, ValueError):
    pass


class InvalidRank(SpectralError, ValueError):
    pass


class ConvergenceFailure(SpectralError, ArithmeticError):
    pass


class NotApplicable(SpectralError):
    """The quantity is mathematically undefined for the given input."""


class NotInMA(NotApplicable):
    pass


class NotAInvertible(NotApplicable):
    pass


class UnknownLaw(SpectralError, KeyError):
    pass


class TruncationTooSmall(SpectralError, ValueError):
    pass


class UnderflowRisk(SpectralError, ValueError):
    pass


class IndexOutOfTruncation(SpectralError, ValueError):
    pass


class MatrixFileError(SpectralError):
    pass
