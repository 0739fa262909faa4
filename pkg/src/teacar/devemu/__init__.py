"""Register-level emulations of the hardware the software stack touches."""

from .i2c import I2cBusEmu, I2cTransaction
from .pca9685 import (
    LED0_ON_L,
    MODE1,
    OSC_HZ,
    PRESCALE,
    OutputsInactiveError,
    Pca9685Emu,
    duty_of,
    prescale_for,
)
from .power import BatteryModel, PowerBoardState, battery_step, protection_check

__all__ = [
    "I2cBusEmu",
    "I2cTransaction",
    "Pca9685Emu",
    "OutputsInactiveError",
    "prescale_for",
    "duty_of",
    "MODE1",
    "PRESCALE",
    "LED0_ON_L",
    "OSC_HZ",
    "BatteryModel",
    "battery_step",
    "PowerBoardState",
    "protection_check",
]
