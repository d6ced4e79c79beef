"""Step-size and averaging-size schedules"""

import math

from fgsfrql.models.constants import RM_DECAY_STEPS, LrSchedule
from fgsfrql.validators import validate_choice

# Growing-N schedule: N_k = N_0 + floor(log2(1 + k / GROWING_N_STEPS))
GROWING_N_STEPS = 1_000


def step_size(schedule: str, alpha0: float, k: int) -> float:
    """Step size at update k (0-based)

    ``constant`` keeps alpha0. ``robbins_monro`` decays as
    alpha0 / (1 + k / 10000), whose sum diverges while the sum of squares
    stays below alpha0^2 (1 + 10000).

    Raises:
        ConfigurationError: If the schedule name is unknown

    Example:
        >>> step_size("robbins_monro", 0.001, 10000)
        0.0005
    """
    validate_choice("lr_schedule", schedule, LrSchedule.ALL)
    if schedule == LrSchedule.CONSTANT:
        return alpha0
    return alpha0 / (1.0 + k / RM_DECAY_STEPS)


def averaging_size(n0: int, k: int, growing: bool = False) -> int:
    """Pivot batch size N at iteration k"""
    if not growing:
        return n0
    return n0 + int(math.floor(math.log2(1.0 + k / GROWING_N_STEPS)))
