"""Exception types shared across the package."""


class WorkbenchError(Exception):
    """Base class for all package errors."""


class InvalidParamsError(WorkbenchError):
    """Arguments outside an operation's domain (bad family params, bad angles, ...)."""


class ParseError(InvalidParamsError):
    """Malformed input text (edge lists, configs, model files)."""


class SizeLimitError(WorkbenchError):
    """Instance exceeds a documented size cap (memory or enumeration bound)."""


class SearchBudgetError(WorkbenchError):
    """Backtracking search exceeded its node budget; the instance is pathological."""


class NotBijectionError(InvalidParamsError):
    """A supplied bitstring mapping is not a bijection."""


class NotInvariantError(WorkbenchError):
    """A diagonal is not constant on the supplied orbits; the group is not a symmetry."""


class SingularSystemError(WorkbenchError):
    """Kernel system is singular (lambda = 0 with duplicated rows)."""


class InsufficientDataError(WorkbenchError):
    """Too few rows/records for the requested fit."""


class DegenerateLabelsError(WorkbenchError):
    """Labels cannot be split by any requested cutoff."""


class ConstantInputError(WorkbenchError):
    """Correlation is undefined for a constant sequence."""
