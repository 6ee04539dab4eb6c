"""Exception types raised across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the function."""


class ContractError(ValueError):
    """A closed-form formula was called outside the hypotheses it holds under."""


class InfeasibleError(ValueError):
    """No allocation satisfies the budget constraint.

    ``max_budget`` carries the largest feasible spend when it is known.
    """

    def __init__(self, message, max_budget=None):
        super().__init__(message)
        self.max_budget = max_budget
