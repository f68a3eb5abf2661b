"""Training-time temperature scheduling.

The multiplicative kind grows the temperature by a constant factor at a
fixed epoch interval, piecewise constant in between, clamped to
[1, 1000]. The inverse-linear kind walks down from the upper bound to
the lower bound in constant per-epoch steps over a configured horizon.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidParameterError

T_MIN = 1.0
T_MAX = 1000.0

SCHEDULE_KINDS = ("multiplicative", "inverse-linear")


@dataclass
class TemperatureSchedule:
    kind: str = "multiplicative"
    start: float = 1.0
    scale: float = 5.0
    interval_epochs: int = 5
    horizon_epochs: int = 20  # inverse-linear only: epochs to reach t_min
    t_min: float = T_MIN
    t_max: float = T_MAX

    def __post_init__(self):
        if self.kind not in SCHEDULE_KINDS:
            raise InvalidParameterError(f"kind must be one of {SCHEDULE_KINDS}")
        if self.scale <= 1:
            raise InvalidParameterError("scale must be greater than 1")
        if self.interval_epochs < 1:
            raise InvalidParameterError("interval_epochs must be at least 1")
        if self.horizon_epochs < 1:
            raise InvalidParameterError("horizon_epochs must be at least 1")
        if self.start <= 0:
            raise InvalidParameterError("start must be positive")


def temperature_at(schedule: TemperatureSchedule, epoch: int) -> float:
    """Temperature for a given epoch; total over all epoch >= 0."""
    if epoch < 0:
        raise InvalidParameterError("epoch must be non-negative")
    if schedule.kind == "multiplicative":
        steps = epoch // schedule.interval_epochs
        value = schedule.start * schedule.scale**steps
    else:
        frac = min(epoch, schedule.horizon_epochs) / schedule.horizon_epochs
        value = schedule.t_max - (schedule.t_max - schedule.t_min) * frac
    return float(min(max(value, schedule.t_min), schedule.t_max))
