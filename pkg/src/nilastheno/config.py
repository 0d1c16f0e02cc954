"""
Session configuration
Defaults from config.yaml, overridden by environment variables and command-line flags
"""

import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Optional, Tuple

import yaml
from dotenv import load_dotenv

from .errors import InvalidStructure, ParseError

logger = logging.getLogger(__name__)

COMMANDS = (
    "validate",
    "classify",
    "metric-check",
    "integrability",
    "bc",
    "bc-class",
    "harmonic",
    "obstruct",
    "theorem-check",
    "jet-check",
    "pullback",
    "search",
    "fixtures",
)

DEFAULT_CONFIG_PATH = Path(__file__).resolve().parents[2] / "config.yaml"


@dataclass
class SessionConfig:
    """Everything one command run needs"""

    command: str
    algebra: Optional[str] = None
    fixture: Optional[str] = None
    metric: Optional[str] = None
    curve: Optional[str] = None
    vector_form: Optional[str] = None
    output_format: str = "text"
    assignments: Dict[str, str] = field(default_factory=dict)
    mode: str = "astheno"
    bidegree: Optional[Tuple[int, int]] = None
    form: Optional[str] = None
    omega_prime: Optional[str] = None
    pivot_method: str = "GJ"
    progress: bool = False
    search_bound: int = 3
    search_limit: int = 1

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise InvalidStructure(f"Unknown command '{self.command}'")
        if self.algebra and self.fixture:
            raise InvalidStructure("Give either an algebra file or a fixture name, not both")


def load_defaults(path: Optional[Path] = None) -> dict:
    """
    Read config.yaml and apply environment overrides

    Args:
        path: Config file; the repository's config.yaml by default

    Returns:
        Flat mapping of SessionConfig field defaults
    """
    load_dotenv()
    path = Path(path) if path else DEFAULT_CONFIG_PATH
    data = {}
    if path.is_file():
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f) or {}
    else:
        logger.debug(f"No config file at {path}, using built-in defaults")
    session = data.get("session", {}) or {}
    search = data.get("search", {}) or {}
    defaults = {
        "output_format": session.get("output_format", "text"),
        "pivot_method": session.get("pivot_method", "GJ"),
        "progress": bool(session.get("progress", False)),
        "search_bound": int(search.get("bound", 3)),
        "search_limit": int(search.get("limit", 1)),
        "log_level": (data.get("logging", {}) or {}).get("level", "WARNING"),
    }
    defaults["output_format"] = os.getenv("NILASTHENO_OUTPUT_FORMAT", defaults["output_format"])
    defaults["pivot_method"] = os.getenv("NILASTHENO_PIVOT_METHOD", defaults["pivot_method"])
    defaults["log_level"] = os.getenv("NILASTHENO_LOG_LEVEL", defaults["log_level"])
    return defaults


def parse_assignment(items) -> Dict[str, str]:
    """`name=value` strings to a mapping; values stay text for the scalar parser."""
    assignments = {}
    for item in items or []:
        name, sep, value = item.partition("=")
        if not sep or not name.strip() or not value.strip():
            raise ParseError("Substitution must look like name=value", text=item, expected="name=value")
        assignments[name.strip()] = value.strip()
    return assignments


def parse_bidegree(text: Optional[str]) -> Optional[Tuple[int, int]]:
    if text is None:
        return None
    try:
        p, q = (int(part) for part in text.split(","))
    except ValueError as e:
        raise ParseError("Bidegree must look like p,q", text=text, expected="p,q") from e
    return p, q


def read_data_file(path: str) -> dict:
    """Load a JSON or YAML input file as a mapping."""
    file_path = Path(path)
    if not file_path.is_file():
        raise InvalidStructure(f"Input file not found: {path}")
    with open(file_path, "r", encoding="utf-8") as f:
        try:
            data = yaml.safe_load(f)
        except yaml.YAMLError as e:
            mark = getattr(e, "problem_mark", None)
            raise ParseError(f"Cannot parse {path}", position=mark.index if mark else -1) from e
    if not isinstance(data, dict):
        raise ParseError(f"{path} must contain a mapping")
    return data
