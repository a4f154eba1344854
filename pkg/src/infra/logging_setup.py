"""
Logging configuration for bpcover.

Library modules log through `logging.getLogger(__name__)` or a `bpcover.*`
child; this module installs the single stderr handler the CLI and the test
scripts use, so stdout stays reserved for verdicts.
"""

import logging
import sys
from typing import Optional

from infra.settings import get_settings

LOG_FORMAT = "[%(levelname)s] %(name)s: %(message)s"

_configured = False


def configure_logging(level: Optional[str] = None) -> logging.Logger:
    """
    Attach a stderr handler to the bpcover logger (idempotent).

    Args:
        level: Level name; defaults to the configured log_level

    Returns:
        The configured `bpcover` logger
    """
    global _configured
    root = logging.getLogger("bpcover")
    level_name = (level or get_settings().log_level).upper()
    root.setLevel(getattr(logging, level_name, logging.WARNING))

    if not _configured:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        root.addHandler(handler)
        root.propagate = False
        _configured = True
    return root


def get_logger(name: str) -> logging.Logger:
    """Logger under the bpcover namespace, e.g. get_logger('semantics')."""
    return logging.getLogger(f"bpcover.{name}")
