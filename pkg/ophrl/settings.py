import os
import pathlib
from typing import Optional

import dotenv
from loguru import logger

# .env next to the project root, then the process environment
dotenv.load_dotenv(pathlib.Path(__file__).parent.parent / ".env")


def env_str(key: str, default: Optional[str] = None) -> Optional[str]:
    """Read `key`, treating an empty value as unset."""
    value = os.getenv(key)
    return value if value else default


def env_int(key: str, default: int, minimum: int = 1) -> int:
    """Read `key` as an integer of at least `minimum`; malformed values fall back to `default`."""
    raw = env_str(key)
    if raw is None:
        return default
    try:
        return max(minimum, int(raw))
    except ValueError:
        logger.warning(f"{key}={raw!r} is not an integer, using {default}")
        return default


# Runtime Configuration
OPHRL_THREADS = env_int("OPHRL_THREADS", 1)
OUTPUT_DIR = env_str("OPHRL_OUTPUT_DIR", "runs")
LOG_LEVEL = env_str("OPHRL_LOG_LEVEL", "INFO").upper()
