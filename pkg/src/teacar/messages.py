"""Typed message set carried on the bus.

All payloads are immutable after construction so they can be handed
between execution contexts without copying. Every message carries a
Header with a nanosecond timestamp (virtual clock in stepped mode,
wall clock in live mode).
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field

from .errors import ValidationError

IMAGE_HEIGHT = 144
IMAGE_WIDTH = 224
IMAGE_CHANNELS = 3
IMAGE_BYTES = IMAGE_HEIGHT * IMAGE_WIDTH * IMAGE_CHANNELS  # 96,768


@dataclass(frozen=True)
class Timestamp:
    nanos: int

    def __post_init__(self):
        if not isinstance(self.nanos, int):
            raise ValidationError(f"timestamp nanos must be an integer, got {type(self.nanos).__name__}")


@dataclass(frozen=True)
class Header:
    stamp: Timestamp

    @classmethod
    def at(cls, nanos: int) -> "Header":
        return cls(stamp=Timestamp(nanos))


@dataclass(frozen=True)
class MotionCmd:
    """Normalized actuator command: value in [-1, +1], +1 = full left / full forward."""

    header: Header
    source: str
    value: float

    def __post_init__(self):
        if not self.source:
            raise ValidationError("MotionCmd source must be non-empty")
        if not math.isfinite(self.value):
            raise ValidationError(f"MotionCmd value must be finite, got {self.value!r}")
        if abs(self.value) > 1.0:
            raise ValidationError(f"MotionCmd value out of [-1, 1]: {self.value!r}")


@dataclass(frozen=True)
class JoyMsg:
    header: Header
    axes: tuple = field(default=())
    buttons: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "axes", tuple(float(a) for a in self.axes))
        object.__setattr__(self, "buttons", tuple(int(b) for b in self.buttons))
        for a in self.axes:
            if not math.isfinite(a) or abs(a) > 1.0:
                raise ValidationError(f"joystick axis out of [-1, 1]: {a!r}")
        for b in self.buttons:
            if b not in (0, 1):
                raise ValidationError(f"joystick button must be 0/1, got {b!r}")


@dataclass(frozen=True)
class ImageMsg:
    """RGB8 camera frame, row-major, fixed 144x224 resolution."""

    header: Header
    data: bytes
    height: int = IMAGE_HEIGHT
    width: int = IMAGE_WIDTH
    channels: int = IMAGE_CHANNELS

    def __post_init__(self):
        if (self.height, self.width, self.channels) != (IMAGE_HEIGHT, IMAGE_WIDTH, IMAGE_CHANNELS):
            raise ValidationError(
                f"image dimensions fixed at {IMAGE_HEIGHT}x{IMAGE_WIDTH}x{IMAGE_CHANNELS}, "
                f"got {self.height}x{self.width}x{self.channels}"
            )
        if not isinstance(self.data, bytes):
            object.__setattr__(self, "data", bytes(self.data))
        if len(self.data) != IMAGE_BYTES:
            raise ValidationError(f"image payload must be exactly {IMAGE_BYTES} bytes, got {len(self.data)}")

    def digest(self) -> str:
        return hashlib.sha256(self.data).hexdigest()


@dataclass(frozen=True)
class ImuMsg:
    header: Header
    accel: tuple = field(default=(0.0, 0.0, 0.0))  # m/s^2
    gyro: tuple = field(default=(0.0, 0.0, 0.0))  # rad/s

    def __post_init__(self):
        object.__setattr__(self, "accel", tuple(float(v) for v in self.accel))
        object.__setattr__(self, "gyro", tuple(float(v) for v in self.gyro))
        if len(self.accel) != 3 or len(self.gyro) != 3:
            raise ValidationError("IMU accel/gyro must be 3-vectors")
        for v in self.accel + self.gyro:
            if not math.isfinite(v):
                raise ValidationError("IMU components must be finite")


@dataclass(frozen=True)
class PwmChannelCmd:
    header: Header
    channel: int
    pulse_width_us: float

    def __post_init__(self):
        if not (0 <= int(self.channel) <= 15):
            raise ValidationError(f"PWM channel must be in 0..15, got {self.channel}")
        if not math.isfinite(self.pulse_width_us) or self.pulse_width_us < 0:
            raise ValidationError(f"pulse width must be >= 0 us, got {self.pulse_width_us!r}")


MESSAGE_KINDS = {
    "MotionCmd": MotionCmd,
    "JoyMsg": JoyMsg,
    "ImageMsg": ImageMsg,
    "ImuMsg": ImuMsg,
    "PwmChannelCmd": PwmChannelCmd,
}
