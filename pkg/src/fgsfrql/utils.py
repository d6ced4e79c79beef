"""Utility functions shared across fg-sfrql"""

import hashlib
import os

import numpy as np

from fgsfrql.errors import ConfigurationError
from fgsfrql.validators import validate_hex_color

THREADS_ENV_VAR = "FG_SFRQL_THREADS"


def hex_to_rgb(hex_color: str) -> tuple:
    """Convert a hex color to an RGB tuple of floats in [0, 1]

    Supports both 3-digit (#RGB) and 6-digit (#RRGGBB) hex formats. The
    result can be handed directly to matplotlib.

    Args:
        hex_color (str): Hex color (e.g., "#2ca02c", "#F60")

    Returns:
        tuple: (r, g, b) with each channel in [0, 1]

    Raises:
        ConfigurationError: If hex color format is invalid

    Example:
        >>> hex_to_rgb("#FF0000")
        (1.0, 0.0, 0.0)
        >>> hex_to_rgb("#F60")
        (1.0, 0.4, 0.0)
    """
    validate_hex_color(hex_color)
    digits = hex_color.lstrip('#')

    # Expand 3-digit hex to 6-digit
    if len(digits) == 3:
        digits = ''.join([c*2 for c in digits])

    return tuple(int(digits[i:i + 2], 16) / 255.0 for i in (0, 2, 4))


def format_float(value: float) -> str:
    """Format a float with 17 significant digits

    17 significant digits are enough to round-trip any IEEE double through
    text, which keeps CSV logs lossless.

    Example:
        >>> float(format_float(0.1)) == 0.1
        True
    """
    return format(float(value), '.17g')


def one_hot(index: int, width: int) -> np.ndarray:
    """Return a float64 one-hot vector"""
    vec = np.zeros(width, dtype=np.float64)
    vec[index] = 1.0
    return vec


def array_digest(values) -> str:
    """SHA-256 hex digest of an array's little-endian float64 bytes"""
    data = np.ascontiguousarray(values, dtype='<f8').tobytes()
    return hashlib.sha256(data).hexdigest()


def bytes_digest(data: bytes) -> str:
    """SHA-256 hex digest of raw bytes"""
    return hashlib.sha256(data).hexdigest()


def worker_limit(default: int = 1) -> int:
    """Read the suite parallelism cap from ``FG_SFRQL_THREADS``

    Args:
        default (int): Value used when the variable is unset

    Returns:
        int: Maximum number of worker processes (>= 1)

    Raises:
        ConfigurationError: If the variable is set to anything but a positive
            integer
    """
    raw = os.environ.get(THREADS_ENV_VAR)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ConfigurationError(f"{THREADS_ENV_VAR} must be an integer, got {raw!r}")
    if value < 1:
        raise ConfigurationError(f"{THREADS_ENV_VAR} must be >= 1, got {value}")
    return value
