"""Exception types raised across the package.

Every error carries a message naming the violated bound or input, so
callers (and the CLI) can report failures without guessing.
"""


class TomographyError(Exception):
    """Base class for all package-specific errors."""


class NotHermitian(TomographyError):
    """Matrix is not Hermitian within the required tolerance."""


class NoConvergence(TomographyError):
    """Eigendecomposition failed to converge."""


class DimensionMismatch(TomographyError):
    """Operands have incompatible dimensions."""


class InvalidDimension(TomographyError):
    """Dimension outside the supported range."""


class InvalidRank(TomographyError):
    """Rank outside [1, d]."""


class TraceNotOne(TomographyError):
    """Matrix trace differs from 1 beyond tolerance."""


class NotPSD(TomographyError):
    """Matrix has an eigenvalue below the PSD tolerance."""


class NotPure(TomographyError):
    """State fails the purity-one precondition."""


class IndexOutOfRange(TomographyError, IndexError):
    """Projector index outside [0, d)."""


class NotPrime(TomographyError):
    """Dimension is not a prime number."""


class TooManyBases(TomographyError):
    """Requested more complementary bases than exist for this dimension."""


class InvalidEpsilon(TomographyError):
    """Depolarization strength outside [0, 1]."""


class NotAProbabilityVector(TomographyError):
    """Vector has negative entries or does not sum to 1 within tolerance."""


class LengthMismatch(TomographyError):
    """Probability vectors (or lists of them) differ in length."""


class NegativeProbability(TomographyError):
    """A computed outcome probability is negative beyond round-off scale."""


class RankDegenerate(TomographyError):
    """Rank truncation boundary falls inside a degenerate eigenvalue block."""


class NonPositiveTruncation(TomographyError):
    """Kept spectrum after rank truncation sums to (numerically) nothing."""


class AllNonPositive(TomographyError):
    """No positive spectral weight left after clipping to the PSD cone."""
