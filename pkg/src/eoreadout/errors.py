"""Exception hierarchy shared across the package."""


class EOReadoutError(Exception):
    """Base class for all package errors."""


class ConfigError(EOReadoutError):
    """Config file missing, unparsable, or violating a parameter invariant."""

    def __init__(self, message, field=None):
        self.field = field
        if field is not None:
            message = f"{field}: {message}"
        super().__init__(message)


class GridError(EOReadoutError):
    """Time grids of two series do not match, or a grid is non-uniform."""


class StepSizeError(EOReadoutError):
    """Integration step too coarse for the fastest rate in the system."""


class NonFiniteError(EOReadoutError):
    """A non-finite amplitude appeared during integration."""

    def __init__(self, step_index, time):
        self.step_index = step_index
        self.time = time
        super().__init__(
            f"non-finite amplitude at step {step_index} (t = {time:.3e} s)")


class SingularSystemError(EOReadoutError):
    """The drift matrix is singular; no steady state exists."""


class SchemeError(EOReadoutError):
    """Readout scheme and supplied pulses are inconsistent."""


class DegenerateWeightError(EOReadoutError):
    """The two averaged envelopes coincide; no weight function exists."""


class FitError(EOReadoutError):
    """A nonlinear or EM fit failed to converge or is degenerate."""

    def __init__(self, message, trace=None):
        self.trace = trace
        super().__init__(message)
