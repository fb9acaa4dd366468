"""Exception hierarchy. CLI exit codes hang off ``exit_code``."""


class AitError(Exception):
    exit_code = 2


class DataError(AitError, ValueError):
    """Bad input file or malformed columns."""


class ConfigError(AitError, ValueError):
    """Invalid configuration value."""


class SingularDesignError(AitError, ValueError):
    """Regression design is rank deficient (condition number above 1e12)."""


class DegenerateInputError(AitError, ValueError):
    """Input carries no variation where some is required."""


class StatisticalPreconditionError(AitError):
    exit_code = 3


class WeakInstrumentError(StatisticalPreconditionError):
    """Candidate instrument is (nearly) uncorrelated with the treatment."""


class CannotTestError(StatisticalPreconditionError):
    """The residualized instrument is numerically constant."""
