"""
Runtime configuration.

Values come from the environment (optionally a `.env` file in the working
directory). Invalid values fall back to the defaults with a warning.
"""

import os
import logging

from dotenv import load_dotenv

load_dotenv()

logger = logging.getLogger(__name__)

# Seed used when `--seed` is omitted
DEFAULT_SEED = 0
DEFAULT_SHARD_SIZE = 262_144
DEFAULT_LOG_LEVEL = "WARNING"

_U64_MAX = 2**64 - 1


def _int_env(name: str, default: int, low: int, high: int) -> int:
    raw = os.getenv(name, "").strip()
    if not raw:
        return default
    try:
        value = int(raw)
    except ValueError:
        logger.warning(f"{name}={raw!r} is not an integer, using {default}")
        return default
    if not low <= value <= high:
        logger.warning(f"{name}={value} outside [{low}, {high}], using {default}")
        return default
    return value


def default_seed() -> int:
    return _int_env("NEGGAMMA_SEED", DEFAULT_SEED, 0, _U64_MAX)


def shard_size() -> int:
    """Pairs drawn per substream shard by the batch sampler."""
    return _int_env("NEGGAMMA_SHARD_SIZE", DEFAULT_SHARD_SIZE, 1, 2**31)


def log_level() -> str:
    level = os.getenv("NEGGAMMA_LOG_LEVEL", DEFAULT_LOG_LEVEL).strip().upper()
    if level not in getattr(logging, "getLevelNamesMapping", lambda: logging._nameToLevel)():
        logger.warning(f"Unknown NEGGAMMA_LOG_LEVEL {level!r}, using {DEFAULT_LOG_LEVEL}")
        return DEFAULT_LOG_LEVEL
    return level
