"""Exception types shared across the package."""


class SeirSplineError(Exception):
    """Base class for all package errors."""


class DomainError(SeirSplineError, ValueError):
    """An input value is outside its mathematical domain."""


class LengthError(SeirSplineError, ValueError):
    """Series lengths or date windows do not line up."""


class ThetaValidationError(SeirSplineError, ValueError):
    """A parameter set violates one or more constraints.

    Carries the complete list of violations, not just the first.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class FormatError(SeirSplineError, ValueError):
    """A data file does not conform to the expected format."""


class DataError(SeirSplineError, ValueError):
    """Requested country/window cannot be served from the data."""


class FitError(SeirSplineError, RuntimeError):
    """Calibration could not produce a model."""
