"""
Infrastructure layer for the bpcover toolkit.

Provides:
- Settings loaded from config/settings.json and the environment
- Exploration budgets that turn runaway searches into UNKNOWN verdicts
- Logging setup for the bpcover logger hierarchy
"""

from .settings import Settings, get_settings, load_settings, reset_settings
from .budget import (
    BudgetExceededError,
    ExplorationBudget,
    configuration_budget,
    print_budget,
    vass_budget,
    karp_miller_budget,
    phase_search_budget
)
from .logging_setup import configure_logging, get_logger

__all__ = [
    # Settings
    'Settings',
    'get_settings',
    'load_settings',
    'reset_settings',
    # Budgets
    'BudgetExceededError',
    'ExplorationBudget',
    'configuration_budget',
    'print_budget',
    'vass_budget',
    'karp_miller_budget',
    'phase_search_budget',
    # Logging
    'configure_logging',
    'get_logger'
]
