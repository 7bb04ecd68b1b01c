""" This module contains helper functions for the ska_sdp_double_bubble """

import logging
from pathlib import Path

import numpy as np
import orjson

logger = logging.getLogger(__name__)

JSON_OPTIONS = orjson.OPT_INDENT_2 | orjson.OPT_SERIALIZE_NUMPY | orjson.OPT_NON_STR_KEYS


def write_json(path: Path | str, content) -> Path:
    """Write ``content`` as indented JSON, creating parent directories."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    logger.info("Writing: %s", path)
    path.write_bytes(orjson.dumps(content, option=JSON_OPTIONS))
    return path


def dumps_json(content) -> str:
    """Indented JSON text."""
    return orjson.dumps(content, option=JSON_OPTIONS).decode("utf-8")


def format_significant(value: float, digits: int = 12) -> str:
    """Fixed number of significant digits, general format."""
    return f"{float(value):.{digits}g}"


def relative_change(old: float, new: float) -> float:
    """|new - old| / max(|old|, tiny)."""
    return abs(new - old) / max(abs(old), np.finfo(float).tiny)
