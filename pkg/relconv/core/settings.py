"""Process-wide configuration.

Settings are immutable; ``configure`` swaps in a new instance. The only
environment variable read is ``RELCONV_THREADS``.
"""

import logging
import os
import threading
from dataclasses import dataclass, replace
from typing import Any, Optional

from relconv.core.exceptions import InvalidArgumentError

logger = logging.getLogger(__name__)

THREADS_ENV = "RELCONV_THREADS"


@dataclass(frozen=True)
class Settings:
    """Limits and numerics parameters shared by all modules."""

    max_carrier_size: int = 64
    threads: int = 1
    power_tolerance: float = 1e-12
    power_max_iterations: int = 10_000

    def __post_init__(self) -> None:
        if self.max_carrier_size < 1:
            raise InvalidArgumentError("max_carrier_size must be positive", context={"value": self.max_carrier_size})
        if self.threads < 1:
            raise InvalidArgumentError("threads must be positive", context={"value": self.threads})
        if self.power_max_iterations < 1:
            raise InvalidArgumentError("power_max_iterations must be positive")

    @classmethod
    def from_env(cls) -> "Settings":
        raw = os.environ.get(THREADS_ENV)
        if not raw:
            return cls()
        try:
            threads = int(raw)
        except ValueError:
            logger.warning("Ignoring non-integer %s=%r", THREADS_ENV, raw)
            return cls()
        return cls(threads=max(1, threads))


_lock = threading.Lock()
_current: Optional[Settings] = None


def get_settings() -> Settings:
    """Return the active settings, reading the environment on first use."""
    global _current
    if _current is None:
        with _lock:
            if _current is None:
                _current = Settings.from_env()
    return _current


def configure(**changes: Any) -> Settings:
    """Replace fields of the active settings and return the new instance."""
    global _current
    updated = replace(get_settings(), **changes)
    with _lock:
        _current = updated
    logger.debug("Settings updated: %s", updated)
    return updated


def reset_settings() -> None:
    """Forget the active settings so the next access re-reads the environment."""
    global _current
    with _lock:
        _current = None
