"""Exception and warning classes shared across the package."""


class DichotomyError(ValueError):
    """Base class for domain errors raised by this package."""


class NotHermitian(DichotomyError):
    pass


class NoConvergence(DichotomyError, ArithmeticError):
    def __init__(self, message, iterations=None):
        super().__init__(message)
        self.iterations = iterations


class NegativeEigenvalue(DichotomyError):
    pass


class ZeroMatrix(DichotomyError):
    pass


class InvalidDichotomy(DichotomyError):
    pass


class InvalidState(DichotomyError):
    pass


class InvalidAlpha(DichotomyError):
    pass


class AlphaOutOfRange(InvalidAlpha):
    pass


class InvalidZ(DichotomyError):
    pass


class DegenerateBlock(DichotomyError):
    pass


class RankAmbiguous(DichotomyError):
    pass


class ResidualTooLarge(DichotomyError):
    pass


class NegativeWeight(DichotomyError):
    pass


class NegativeMass(DichotomyError):
    pass


class InvalidSamples(DichotomyError):
    pass


class NotCommuting(DichotomyError):
    pass


class DegenerateSigma(DichotomyError):
    pass


class NotPure(DichotomyError):
    pass


class CertificationError(DichotomyError):
    """A constructed channel failed its residual check."""


class DimTooLarge(DichotomyError):
    pass


class StepUnderflow(DichotomyError):
    pass


class NotMajorized(DichotomyError):
    pass


class OrthogonalPairWarning(RuntimeWarning):
    """p and q have disjoint supports; the divergence is reported as +inf."""


class AmbiguousBasisWarning(RuntimeWarning):
    """sigma has a degenerate eigenspace, so its eigenbasis is not unique."""


class SupportMismatchWarning(RuntimeWarning):
    pass


class LaplaceOverflowWarning(RuntimeWarning):
    pass


class InexactReconstructionWarning(RuntimeWarning):
    """Recovered masses could not be snapped to small-denominator rationals."""
