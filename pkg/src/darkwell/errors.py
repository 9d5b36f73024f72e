"""Exception types shared across the package."""


class DarkwellError(Exception):
    """Base class for all package-specific errors."""


class ConfigurationError(DarkwellError):
    """Invalid or inconsistent user configuration."""


class ContractViolation(DarkwellError):
    """An operation was called with arguments violating its preconditions."""


class SolverError(DarkwellError):
    """A numerical routine failed to converge or was used out of range."""


class WindowError(SolverError):
    """An energy window touches a boundary potential; widen or shrink it."""


class SingularParametersError(DarkwellError):
    """Parameter combination puts the susceptibility on a pole."""


class AmbiguityError(DarkwellError):
    """The steady-state problem does not have a unique solution."""
