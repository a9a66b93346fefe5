"""Exception hierarchy shared by every module.

The CLI maps these onto process exit codes: InputError -> 2,
NumericError -> 3, BudgetError -> 4.
"""


class EquiliResError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


class InputError(EquiliResError):
    """Malformed file, invalid parameter, or violated precondition."""

    exit_code = 2


class NumericError(EquiliResError):
    """Numeric failure at run time: singular system, non-convergence."""

    exit_code = 3


class DivergenceError(NumericError):
    """A simulated trajectory blew up instead of converging."""


class BudgetError(EquiliResError):
    """A perturbation budget is infeasible for the given graph."""

    exit_code = 4
