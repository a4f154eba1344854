"""
Settings singleton for the bpcover toolkit.

Budgets and the log level are read from config/settings.json and can be
overridden through environment variables (a .env file in the project root
is honoured). Every exploration in the package pulls its default limits
from here, so a single place decides when a search gives up with UNKNOWN.
"""

import json
import logging
import os
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Dict, Optional

from dotenv import load_dotenv

# Load environment variables
load_dotenv()

logger = logging.getLogger("bpcover.settings")

# Path setup
SCRIPT_DIR = Path(__file__).parent
PROJECT_ROOT = SCRIPT_DIR.parent.parent
CONFIG_DIR = PROJECT_ROOT / "config"
SETTINGS_PATH = CONFIG_DIR / "settings.json"

# env name -> settings field
ENV_OVERRIDES: Dict[str, str] = {
    "BPCOVER_SUCCESSOR_CAP": "successor_cap",
    "BPCOVER_MAX_CONFIGURATIONS": "max_configurations",
    "BPCOVER_PRINT_BUDGET": "print_budget",
    "BPCOVER_VASS_BUDGET": "vass_budget",
    "BPCOVER_KARP_MILLER_BUDGET": "karp_miller_budget",
    "BPCOVER_PHASE_SEARCH_BUDGET": "phase_search_budget",
    "BPCOVER_LOG_LEVEL": "log_level",
}


@dataclass(frozen=True)
class Settings:
    """
    Exploration limits shared by every decision procedure.

    Attributes:
        successor_cap: Max successors of a single broadcast step (receiver blowup)
        max_configurations: Max configurations visited by one brute-force search
        print_budget: Max broadcast-prints explored by reachable_prints
        vass_budget: Max basis elements handled by backward coverability
        karp_miller_budget: Max nodes of a Karp-Miller tree
        phase_search_budget: Max labelling attempts during phase inference
        log_level: Level name for the bpcover logger
        slow_tests: Run the full-size acceptance corpora
    """
    successor_cap: int = 1_000_000
    max_configurations: int = 2_000_000
    print_budget: int = 2 ** 20
    vass_budget: int = 200_000
    karp_miller_budget: int = 50_000
    phase_search_budget: int = 100_000
    log_level: str = "WARNING"
    slow_tests: bool = False


# Global settings instance
_settings: Optional[Settings] = None


def _load_file_values(path: Path) -> Dict:
    """Read the JSON settings file; a missing or broken file means defaults."""
    if not path.exists():
        return {}
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        logger.warning("could not read %s: %s; using built-in defaults", path, e)
        return {}
    known = Settings.__dataclass_fields__
    return {k: v for k, v in data.items() if k in known}


def _coerce(field: str, raw: str):
    if field == "log_level":
        return raw.strip().upper()
    return int(raw.strip().replace("_", ""))


def load_settings(path: Path = SETTINGS_PATH) -> Settings:
    """
    Build a Settings object from defaults, the JSON file and the environment.

    Args:
        path: JSON settings file (default config/settings.json)

    Returns:
        Frozen Settings instance
    """
    settings = replace(Settings(), **_load_file_values(path))

    overrides = {}
    for env_name, field in ENV_OVERRIDES.items():
        raw = os.getenv(env_name)
        if raw is None or not raw.strip():
            continue
        try:
            overrides[field] = _coerce(field, raw)
        except ValueError:
            logger.warning("ignoring %s=%r (expected an integer)", env_name, raw)
    overrides["slow_tests"] = os.getenv("BPCOVER_SLOW_TESTS", "").strip().lower() in ("1", "true", "yes")
    return replace(settings, **overrides)


def get_settings() -> Settings:
    """Get or create the settings singleton."""
    global _settings
    if _settings is None:
        _settings = load_settings()
    return _settings


def reset_settings():
    """Forget the cached settings (tests change the environment)."""
    global _settings
    _settings = None
