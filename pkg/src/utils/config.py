# File: src/utils/config.py
# Purpose: Environment-driven defaults (.env supported) and repo-relative paths.

import os
from pathlib import Path

from dotenv import load_dotenv

load_dotenv()

# -------------------------------------------------
# Paths
# -------------------------------------------------
PROJECT_ROOT = Path(__file__).resolve().parents[2]
SCENARIO_DIR = PROJECT_ROOT / "scenarios"
DOCS_DIR = PROJECT_ROOT / "docs"
CANONICAL_SCENARIO = SCENARIO_DIR / "canonical.json"


def _flag(name: str, default: bool) -> bool:
    value = os.getenv(name)
    if value is None:
        return default
    return value.strip().lower() in ("1", "true", "yes", "on")


# -------------------------------------------------
# Runtime switches
# -------------------------------------------------
def default_scenario_path() -> Path:
    """Scenario used when --scenario is omitted."""
    return Path(os.getenv("CDPR_SCENARIO", str(CANONICAL_SCENARIO)))


def progress_enabled() -> bool:
    """tqdm progress bars on stderr."""
    return _flag("CDPR_PROGRESS", False)


def verbose_enabled() -> bool:
    """Echo run-logger records to stderr."""
    return _flag("CDPR_VERBOSE", True)


def log_capacity() -> int:
    """Run-logger records kept in memory."""
    return int(os.getenv("CDPR_LOG_CAPACITY", "10000"))
