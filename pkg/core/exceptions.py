"""
Error hierarchy shared by the library and the CLI
"""


class GreedyLabError(Exception):
    """Base class for all greedylab errors"""

    exit_code = 1


class SpecValidationError(GreedyLabError, ValueError):
    """A space, basis, partition or experiment descriptor is invalid"""

    exit_code = 2


class BudgetExceededError(GreedyLabError):
    """An exhaustive enumeration would exceed the configured budget"""

    exit_code = 3

    def __init__(self, what: str, required: int, budget: int):
        self.what = what
        self.required = required
        self.budget = budget
        super().__init__(f"{what}: {required} evaluations exceed the budget of {budget}")


class AcceptanceError(GreedyLabError):
    """A verification or reproduction criterion failed"""

    exit_code = 4


class WitnessMismatchError(GreedyLabError):
    """A stored witness does not reproduce its reported value"""

    exit_code = 4
