"""Exception hierarchy and work-budget plumbing."""

from __future__ import annotations

import os

DEFAULT_WORK_BUDGET = 10**8
DEFAULT_SIZE_BUDGET = 10**7


class GapCoverError(Exception):
    """Base class for every error raised by this package."""


class ParseError(GapCoverError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)


class BudgetExceeded(GapCoverError):
    def __init__(self, what: str, required: int, budget: int):
        self.required = required
        self.budget = budget
        super().__init__(f"{what}: needs {required} elementary steps, budget is {budget}")


class ReductionError(GapCoverError):
    """Dimension mismatch or violated precondition in a reduction."""


def work_budget(budget: int | None = None) -> int:
    """Resolve an explicit budget, the GAPCOVER_BUDGET override, or the default."""
    if budget is not None:
        return int(budget)
    env = os.environ.get("GAPCOVER_BUDGET")
    if env:
        return int(env)
    return DEFAULT_WORK_BUDGET


def check_budget(what: str, required: int, budget: int | None = None) -> None:
    limit = work_budget(budget)
    if required > limit:
        raise BudgetExceeded(what, required, limit)
