"""Battery and power distribution board models.

The battery is a linear voltage-sag model calibrated against the
measured 30-minute discharge of the prototype (12.6 V -> 11.6 V at
7.5 W). The power board distributes three rails (direct battery for
the computing unit + motor driver, a <7 V buck for the servo, and a
regulated 5 V sensor rail) and latches all of them off when the input
voltage leaves the 9-15 V safety window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from ..errors import ValidationError

# 1.0 V sag over 7.5 W * 1800 s, from the prototype discharge measurement.
DEFAULT_SAG_V_PER_J = 1.0 / 13_500.0
DEFAULT_CAPACITY_J = 2.3 * 11.1 * 3600.0  # 2300 mAh 3S pack, nominal

PROTECTION_MIN_V = 9.0
PROTECTION_MAX_V = 15.0


@dataclass(frozen=True)
class BatteryModel:
    voltage_v: float = 12.6
    capacity_j: float = DEFAULT_CAPACITY_J
    sag_coeff_v_per_j: float = DEFAULT_SAG_V_PER_J

    def __post_init__(self):
        if not math.isfinite(self.voltage_v) or self.voltage_v < 0:
            raise ValidationError(f"battery voltage must be finite and >= 0, got {self.voltage_v!r}")


def battery_step(battery: BatteryModel, load_w: float, dt_s: float) -> BatteryModel:
    """Drain the battery by load_w over dt_s; voltage sags linearly with energy drawn."""
    if load_w < 0:
        raise ValidationError(f"load must be >= 0 W, got {load_w}")
    if dt_s <= 0:
        raise ValidationError(f"dt must be > 0 s, got {dt_s}")
    energy_j = load_w * dt_s
    voltage = max(0.0, battery.voltage_v - battery.sag_coeff_v_per_j * energy_j)
    return replace(battery, voltage_v=voltage, capacity_j=max(0.0, battery.capacity_j - energy_j))


@dataclass
class PowerBoardState:
    """Rail flags plus the latching protection circuit.

    When the input voltage leaves [protection_min_v, protection_max_v]
    all three rails drop together and stay down until the input returns
    in range AND reset() is issued.
    """

    input_v: float = 12.6
    direct_batt_enabled: bool = True
    servo_buck_enabled: bool = True
    sensor_5v_enabled: bool = True
    servo_buck_v: float = 6.0  # fixed buck output, below the 7 V servo limit
    sensor_rail_v: float = 5.0
    protection_min_v: float = PROTECTION_MIN_V
    protection_max_v: float = PROTECTION_MAX_V
    tripped: bool = field(default=False)

    def rails(self) -> dict:
        return {
            "direct_batt": self.direct_batt_enabled,
            "servo_buck": self.servo_buck_enabled,
            "sensor_5v": self.sensor_5v_enabled,
        }

    def input_in_range(self) -> bool:
        return self.protection_min_v <= self.input_v <= self.protection_max_v

    def reset(self) -> bool:
        """Clear the protection latch; only effective once the input is back in range."""
        if self.tripped and self.input_in_range():
            self.tripped = False
            return True
        return not self.tripped

    def _set_rails(self, enabled: bool) -> None:
        self.direct_batt_enabled = enabled
        self.servo_buck_enabled = enabled
        self.sensor_5v_enabled = enabled


def protection_check(board: PowerBoardState, on_change=None) -> dict:
    """Apply the protection rule for the current input voltage.

    Returns the rail state map. `on_change(event_name, payload)` fires
    when the rail state flips (wired to a bus event by the stack).
    """
    if not math.isfinite(board.input_v):
        raise ValidationError("input voltage must be finite")
    was_enabled = board.direct_batt_enabled
    if not board.input_in_range():
        board.tripped = True
    enabled = board.input_in_range() and not board.tripped
    board._set_rails(enabled)
    if enabled != was_enabled and on_change is not None:
        on_change(
            "power.protection",
            {"input_v": board.input_v, "rails_enabled": enabled, "tripped": board.tripped},
        )
    return board.rails()
