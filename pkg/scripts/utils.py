"""
Shared utilities for nilconj.
Handles configuration defaults, JSON loading, status output and progress bars.
"""

import json
import os
import sys
from pathlib import Path
from typing import Any, Iterable, TypeVar

from tqdm import tqdm

T = TypeVar("T")

# Environment defaults
DEFAULT_BUDGET = 10**7
DEFAULT_SEED = 0
DEFAULT_FORMAT = "text"


def env_int(name: str, default: int) -> int:
    """Read an integer setting from the environment."""
    raw = os.environ.get(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        print_status(f"Ignoring non-integer {name}={raw!r}, using {default}", "warning")
        return default


def get_default_budget() -> int:
    """Search budget (nodes) from NILCONJ_BUDGET."""
    return env_int("NILCONJ_BUDGET", DEFAULT_BUDGET)


def get_default_seed() -> int:
    """Seed for randomized subcommands from NILCONJ_SEED."""
    return env_int("NILCONJ_SEED", DEFAULT_SEED)


def get_default_format() -> str:
    """Output format from NILCONJ_FORMAT."""
    return os.environ.get("NILCONJ_FORMAT", DEFAULT_FORMAT)


def is_quiet() -> bool:
    """True when NILCONJ_QUIET is set to a truthy value."""
    return os.environ.get("NILCONJ_QUIET", "").lower() in ("1", "true", "yes")


def load_json_file(json_path: str) -> dict[str, Any]:
    """Load a JSON document from disk."""
    path = Path(json_path)
    if not path.exists():
        raise FileNotFoundError(f"JSON file not found: {json_path}")

    with open(path, encoding="utf-8") as f:
        return json.load(f)


def print_status(message: str, status: str = "info") -> None:
    """Print formatted status message to stderr."""
    if is_quiet() and status in ("info", "progress"):
        return
    icons = {
        "info": "[i]",
        "success": "[+]",
        "error": "[x]",
        "warning": "[!]",
        "progress": "[*]",
    }
    icon = icons.get(status, "-")
    print(f"{icon} {message}", file=sys.stderr)


def format_duration(seconds: float) -> str:
    """Format duration in human-readable format."""
    if seconds < 60:
        return f"{seconds:.1f}s"
    minutes = int(seconds // 60)
    secs = seconds % 60
    return f"{minutes}m {secs:.1f}s"


def progress(items: Iterable[T], desc: str, total: int | None = None) -> Iterable[T]:
    """
    Wrap an iterable in a tqdm bar on stderr.

    The bar is disabled when stderr is not a terminal or NILCONJ_QUIET is set,
    so piped CSV/JSON output stays clean.
    """
    disable = is_quiet() or not sys.stderr.isatty()
    return tqdm(items, desc=desc, total=total, file=sys.stderr, disable=disable, leave=False)


def parse_int_range(text: str) -> tuple[int, int]:
    """
    Parse an inclusive integer range.

    Accepts "a..b" or a single integer "a".

    Returns:
        Tuple (low, high)
    """
    text = text.strip()
    if ".." in text:
        low_text, high_text = text.split("..", 1)
        low, high = int(low_text), int(high_text)
    else:
        low = high = int(text)
    if low > high:
        raise ValueError(f"Empty range: {text}")
    return low, high
