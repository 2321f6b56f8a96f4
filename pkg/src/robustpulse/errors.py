"""Exception types shared across the package."""


class RobustPulseError(Exception):
    """Base class for domain errors."""


class ConstraintError(RobustPulseError):
    """A pulse constraint or grid requirement is violated."""


class ModelError(RobustPulseError):
    """A device or noise model is invalid for the requested operation."""


class CalibrationError(RobustPulseError):
    """A calibration routine could not produce a usable result."""


class FitError(RobustPulseError):
    """A nonlinear fit failed to converge."""
