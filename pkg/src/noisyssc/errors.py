"""Exception hierarchy shared by every module."""


class SSCError(Exception):
    """Base class for all package errors."""


class ValidationError(SSCError, ValueError):
    """Bad input. The CLI maps these to exit code 1."""


class DegenerateInput(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class InvalidParameter(ValidationError):
    pass


class BudgetExceeded(ValidationError):
    """An exhaustive enumeration would exceed its configured budget."""


class SolverError(SSCError, RuntimeError):
    """Numerical failure. The CLI maps these to exit code 2."""


class Infeasible(SolverError):
    pass


class SolverDiverged(SolverError):
    def __init__(self, message, residual=float("nan"), column=None):
        super().__init__(message)
        self.residual = residual
        self.column = column


class StructureInconsistent(SolverError):
    pass


class InsufficientComponents(SolverError):
    pass
