"""Exception types shared across the toolkit."""


class ForecastToolkitError(Exception):
    """Base class for all toolkit errors."""


class InputError(ForecastToolkitError, ValueError):
    """Invalid argument values or incompatible shapes."""


class NumericError(ForecastToolkitError, ArithmeticError):
    """Non-finite values where finite numbers are required."""


class SolverError(ForecastToolkitError):
    """A weighted linear system stayed singular after regularization."""


class SimulatorError(ForecastToolkitError):
    """A simulated trajectory diverged or turned non-finite."""


class PreprocessingError(ForecastToolkitError):
    """A preprocessing step is undefined for the given series."""


class PostHocGateError(ForecastToolkitError):
    """Tukey HSD requested without a significant ANOVA result."""


class IngestError(ForecastToolkitError):
    """A data file could not be parsed."""
