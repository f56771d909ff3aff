"""Exception types shared across the package.

Grouped here because several conditions (threshold violations, table range
errors) are raised by more than one module.
"""


class TTSpinError(Exception):
    """Base class for all package-specific errors."""


class InputNotPhysical(TTSpinError):
    """A density matrix fails positive semi-definiteness beyond tolerance."""


class NotPhysicalCoefficients(TTSpinError):
    """Diagonal correlation coefficients violate the physicality bounds."""


class BelowThreshold(TTSpinError):
    """Invariant mass below pair-production threshold 2*m_t."""


class DegenerateAtPole(TTSpinError):
    """Helicity basis undefined at sin(theta) = 0."""


class ZeroLuminosity(TTSpinError):
    """Both channel luminosities (or weighted products) vanish."""


class TableError(TTSpinError):
    """Base class for luminosity-table ingestion errors."""


class ParseError(TableError):
    """Malformed table or config file; carries the offending line number."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class NonMonotonicGrid(TableError):
    """Mass grid not strictly increasing."""


class NegativeLuminosity(TableError):
    """Negative or NaN luminosity value in a table."""


class OutOfRange(TTSpinError):
    """Requested mass outside the tabulated grid."""


class EmptyWindow(TTSpinError):
    """Mass window has non-positive width."""


class NoSignChange(TTSpinError):
    """Root bracketing failed: discriminant does not change sign."""


class QuadratureNoConvergence(TTSpinError):
    """Adaptive quadrature failed to reach the requested tolerance."""


class EnvelopeFailure(TTSpinError):
    """Rejection sampling envelope violated or acceptance collapsed."""


class InsufficientEvents(TTSpinError):
    """Estimator called with too few events."""
