"""
Exploration budgets for the bpcover searches.

Every search in the toolkit (configuration BFS, print closure, backward
coverability, Karp-Miller) charges work units against an ExplorationBudget.
When the limit is reached the budget trips, raises BudgetExceededError, and
the caller turns that into an UNKNOWN verdict instead of a wrong answer.

States:
- OPEN: work is being charged normally
- EXHAUSTED: the limit was hit; further charges keep raising
"""

import logging
import time
from typing import Optional

from infra.settings import get_settings

logger = logging.getLogger("bpcover.budget")


class BudgetExceededError(Exception):
    """Raised when an exploration budget is exhausted."""

    def __init__(self, name: str, limit: int, used: int):
        self.name = name
        self.limit = limit
        self.used = used
        super().__init__(f"{name} budget exhausted ({used} > {limit})")


class ExplorationBudget:
    """
    Counts work units of one search and trips once the limit is reached.

    Args:
        name: Label used in log lines and UNKNOWN reasons
        limit: Maximum number of units; None means unlimited
        report_every: Log progress every this many units (0 disables)
    """

    def __init__(self, name: str, limit: Optional[int], report_every: int = 10_000):
        self.name = name
        self.limit = limit
        self.report_every = report_every
        self.used = 0
        self.state = "OPEN"
        self.started_at = time.time()

    def charge(self, units: int = 1):
        """Record work; raise BudgetExceededError when the limit is passed."""
        self.used += units
        if self.report_every and self.used % self.report_every < units:
            logger.info("%s: %d units used", self.name, self.used)
        if self.limit is not None and self.used > self.limit:
            if self.state == "OPEN":
                self.state = "EXHAUSTED"
                logger.warning("%s: OPEN -> EXHAUSTED (limit %d)", self.name, self.limit)
            raise BudgetExceededError(self.name, self.limit, self.used)

    def remaining(self) -> Optional[int]:
        if self.limit is None:
            return None
        return max(0, self.limit - self.used)

    def is_exhausted(self) -> bool:
        return self.state == "EXHAUSTED"

    def elapsed(self) -> float:
        return time.time() - self.started_at

    def reset(self):
        self.used = 0
        self.state = "OPEN"
        self.started_at = time.time()


def configuration_budget(limit: Optional[int] = None) -> ExplorationBudget:
    """Budget for brute-force configuration searches."""
    if limit is None:
        limit = get_settings().max_configurations
    return ExplorationBudget("configurations", limit)


def print_budget(limit: Optional[int] = None) -> ExplorationBudget:
    """Budget for the broadcast-print closure."""
    if limit is None:
        limit = get_settings().print_budget
    return ExplorationBudget("prints", limit)


def vass_budget(limit: Optional[int] = None) -> ExplorationBudget:
    """Budget for backward coverability basis elements."""
    if limit is None:
        limit = get_settings().vass_budget
    return ExplorationBudget("vass-basis", limit)


def karp_miller_budget(limit: Optional[int] = None) -> ExplorationBudget:
    """Budget for Karp-Miller tree nodes."""
    if limit is None:
        limit = get_settings().karp_miller_budget
    return ExplorationBudget("karp-miller", limit)


def phase_search_budget(limit: Optional[int] = None) -> ExplorationBudget:
    """Budget for phase-label backtracking."""
    if limit is None:
        limit = get_settings().phase_search_budget
    return ExplorationBudget("phase-search", limit, report_every=0)
