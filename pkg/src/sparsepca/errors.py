"""Exception types raised by the sparsepca library.

Every library-specific failure derives from SparsePcaError so callers
(CLI, service) can catch one base class and map it to a diagnostic.
"""


class SparsePcaError(Exception):
    """Base class for all sparsepca errors."""


class NonFiniteInput(SparsePcaError):
    """An input matrix or vector contains NaN or Inf."""


class NonPositiveMu(SparsePcaError):
    """Smoothing temperature must be strictly positive."""


class DimensionMismatch(SparsePcaError):
    """Operands have incompatible shapes."""


class NotPositiveSemidefinite(SparsePcaError):
    """Matrix has an eigenvalue below the PSD tolerance."""


class InfeasiblePrimal(SparsePcaError):
    """Primal matrix is not PSD with unit trace within tolerance."""


class InfeasibleDual(SparsePcaError):
    """Dual matrix violates the entrywise box bound."""


class NonFiniteIterate(SparsePcaError):
    """Solver produced a NaN/Inf iterate."""


class BadCardinality(SparsePcaError):
    """Requested cardinality outside 1..n."""


class EmptyPattern(SparsePcaError):
    """Operation requires a non-empty index set."""


class NotUnitNorm(SparsePcaError):
    """Vector is not unit-norm within tolerance."""


class DegenerateDenominator(SparsePcaError):
    """A certificate denominator is too close to zero to evaluate."""


class EmptyGrid(SparsePcaError):
    """Penalty grid has no entries."""


class TooLarge(SparsePcaError):
    """Exhaustive enumeration would exceed the subset cap."""


class BadShape(SparsePcaError):
    """Generator parameters are inconsistent (e.g. k > n)."""


class ZeroComponent(SparsePcaError):
    """Deflation requires a nonzero component."""


class UnknownMethod(SparsePcaError):
    """Method name not recognised."""


class DegenerateTruth(SparsePcaError):
    """ROC analysis needs a truth set that is neither empty nor full."""


class ParseError(SparsePcaError):
    """CSV cell failed to parse; message carries 1-based row/column."""

    def __init__(self, message, row=None, col=None):
        super().__init__(message)
        self.row = row
        self.col = col


class RaggedRows(SparsePcaError):
    """CSV rows have differing lengths."""


class AsymmetricInput(SparsePcaError):
    """Covariance input asymmetric beyond tolerance."""


class TooFewRows(SparsePcaError):
    """Sample covariance needs at least two observations."""


class NonPositivePrice(SparsePcaError):
    """Log returns require strictly positive prices."""
