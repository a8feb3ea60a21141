"""Disk cache utility for expensive, deterministic computation results.

This module provides a simple interface for caching using diskcache.
Used by the pipeline for critical-point searches and thickening sweeps,
whose results depend only on the run configuration.
"""

import hashlib
import json
import os
from dataclasses import asdict, is_dataclass
from enum import Enum
from typing import Any, Callable, TypeVar

from diskcache import Cache

from app.config import CACHE_PATH

T = TypeVar("T")

# Global cache switch (CONLEY_KIT_CACHE=0 disables at startup)
_cache_enabled = os.getenv("CONLEY_KIT_CACHE", "1").strip().lower() not in ("0", "false", "no")


def enable_cache() -> None:
    """Enable caching globally."""
    global _cache_enabled
    _cache_enabled = True


def disable_cache() -> None:
    """Disable caching globally."""
    global _cache_enabled
    _cache_enabled = False


def is_cache_enabled() -> bool:
    """Check if caching is enabled."""
    return _cache_enabled


# Predefined cache instances
_critical_cache = Cache(str(CACHE_PATH / "critical_points"))
_sweep_cache = Cache(str(CACHE_PATH / "flow_sweeps"))


def get_critical_cache() -> Cache:
    """Get critical-point search cache instance."""
    return _critical_cache


def get_sweep_cache() -> Cache:
    """Get thickening sweep cache instance."""
    return _sweep_cache


def get_or_compute(cache_instance: Cache, key: str, compute: Callable[[], T]) -> T:
    """Look up key, computing and storing the value on a miss.

    Exceptions raised by compute are not cached.
    """
    if not _cache_enabled:
        return compute()
    hit = cache_instance.get(key, default=None)
    if hit is not None:
        return hit
    value = compute()
    cache_instance.set(key, value)
    return value


def generate_cache_key(data: Any) -> str:
    """Generate cache key from data (supports dataclasses, enums, dicts, lists).

    Args:
        data: Data to generate key from

    Returns:
        SHA256 hash of the data
    """

    def _serialize(obj: Any) -> Any:
        """Recursively serialize object to JSON-serializable format"""
        if is_dataclass(obj) and not isinstance(obj, type):
            return _serialize(asdict(obj))  # type: ignore
        elif isinstance(obj, Enum):
            return obj.value
        elif isinstance(obj, (list, tuple)):
            return [_serialize(item) for item in obj]
        elif isinstance(obj, dict):
            return {str(k): _serialize(v) for k, v in obj.items()}
        elif hasattr(obj, "model_dump"):
            return _serialize(obj.model_dump())
        else:
            return obj

    serialized_data = _serialize(data)
    data_str = json.dumps(serialized_data, ensure_ascii=False, sort_keys=True)
    return hashlib.sha256(data_str.encode()).hexdigest()
