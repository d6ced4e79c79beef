"""Input validation for configurations, layouts and array shapes"""

import math
import re

import numpy as np

from fgsfrql.errors import ConfigurationError, InputError, ShapeError


def validate_layout(layout):
    """Validate a network layer-size descriptor

    Args:
        layout (sequence of int): Input width, hidden widths, output width

    Returns:
        bool: True if valid

    Raises:
        ConfigurationError: If fewer than two entries or any entry is not a
            positive integer

    Example:
        >>> validate_layout([4, 8, 6])
        True
    """
    try:
        entries = list(layout)
    except TypeError:
        raise ConfigurationError(f"Layout must be a sequence, got {type(layout).__name__}")

    if len(entries) < 2:
        raise ConfigurationError(f"Layout needs at least 2 entries, got {entries}")

    for width in entries:
        if isinstance(width, bool) or not isinstance(width, (int, np.integer)):
            raise ConfigurationError(f"Layout widths must be integers: {entries}")
        if width <= 0:
            raise ConfigurationError(f"Layout widths must be positive: {entries}")
    return True


def validate_probability(name, value):
    """Validate that a value lies in [0, 1]

    Args:
        name (str): Parameter name used in the error message
        value (float): Value to check

    Returns:
        bool: True if valid

    Raises:
        ConfigurationError: If outside [0, 1] or not a number

    Example:
        >>> validate_probability("epsilon", 0.6)
        True
    """
    if not isinstance(value, (int, float, np.floating)) or isinstance(value, bool):
        raise ConfigurationError(f"{name} must be a number, got {type(value).__name__}")
    if not 0.0 <= float(value) <= 1.0:
        raise ConfigurationError(f"{name} must be in [0, 1], got {value}")
    return True


def validate_positive(name, value, allow_zero=False):
    """Validate a positive (or non-negative) finite number

    Args:
        name (str): Parameter name used in the error message
        value (float): Value to check
        allow_zero (bool): Accept exactly zero

    Returns:
        bool: True if valid

    Raises:
        ConfigurationError: If not finite, negative, or zero when not allowed

    Example:
        >>> validate_positive("alpha", 0.001)
        True
        >>> validate_positive("alpha", 0.0, allow_zero=True)
        True
    """
    if not isinstance(value, (int, float, np.integer, np.floating)) or isinstance(value, bool):
        raise ConfigurationError(f"{name} must be a number, got {type(value).__name__}")
    if not math.isfinite(float(value)):
        raise ConfigurationError(f"{name} must be finite, got {value}")
    if value < 0 or (value == 0 and not allow_zero):
        bound = ">= 0" if allow_zero else "> 0"
        raise ConfigurationError(f"{name} must be {bound}, got {value}")
    return True


def validate_choice(name, value, allowed):
    """Validate that a value belongs to a fixed set of choices

    Args:
        name (str): Parameter name used in the error message
        value: Value to check
        allowed (iterable): Accepted values

    Returns:
        bool: True if valid

    Raises:
        ConfigurationError: If the value is not one of the choices

    Example:
        >>> validate_choice("lr_schedule", "constant", ["constant", "robbins_monro"])
        True
    """
    allowed = list(allowed)
    if value not in allowed:
        raise ConfigurationError(f"{name} must be one of {allowed}, got {value!r}")
    return True


def validate_width(name, vector, expected):
    """Validate the trailing width of an array

    Args:
        name (str): Array name used in the error message
        vector (array-like): Array whose last axis is checked
        expected (int): Required width

    Returns:
        bool: True if valid

    Raises:
        ShapeError: If the last axis does not have the expected width
    """
    shape = np.shape(vector)
    if len(shape) == 0 or shape[-1] != expected:
        raise ShapeError(f"{name} must have width {expected}, got shape {shape}")
    return True


def validate_action(action, num_actions):
    """Validate an action index

    Args:
        action (int): Action index
        num_actions (int): Size of the action set

    Returns:
        bool: True if valid

    Raises:
        InputError: If the action is not an integer in [0, num_actions)

    Example:
        >>> validate_action(3, 4)
        True
    """
    if isinstance(action, bool) or not isinstance(action, (int, np.integer)):
        raise InputError(f"Action must be an integer, got {type(action).__name__}")
    if not 0 <= action < num_actions:
        raise InputError(f"Action {action} outside [0, {num_actions})")
    return True


def validate_hex_color(color):
    """Validate a '#RRGGBB' or '#RGB' color string used in chart legends

    Args:
        color (str): Color string

    Returns:
        bool: True if valid

    Raises:
        ConfigurationError: If the string is not a hex color

    Example:
        >>> validate_hex_color("#2ca02c")
        True
    """
    if not isinstance(color, str):
        raise ConfigurationError(f"Color must be a string, got {type(color).__name__}")
    if not re.match(r'^#([0-9a-fA-F]{3}|[0-9a-fA-F]{6})$', color):
        raise ConfigurationError(f"Invalid hex color: {color}. Expected: #RRGGBB")
    return True
