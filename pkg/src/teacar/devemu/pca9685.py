"""Emulated PCA9685 16-channel, 12-bit PWM controller.

Register map is bit-exact to the datasheet for the subset the stack
uses: MODE1 (0x00), LED0_ON_L..LED15_OFF_H (0x06..0x45) and PRE_SCALE
(0xFE). Each channel outputs a pulse of (OFF - ON mod 4096) counts per
4096-count frame; the frame rate comes from an 8-bit prescaler dividing
the 25 MHz internal oscillator.
"""

from __future__ import annotations

from ..errors import StateError, ValidationError

OSC_HZ = 25_000_000
MODE1 = 0x00
LED0_ON_L = 0x06
PRESCALE = 0xFE

MODE1_SLEEP = 0x10  # bit 4
MODE1_AI = 0x20  # bit 5 (register auto-increment)
MODE1_RESTART = 0x80  # bit 7

FREQ_MIN_HZ = 24.0
FREQ_MAX_HZ = 1526.0
PRESCALE_MIN = 3
PRESCALE_MAX = 255

_LED_LAST = LED0_ON_L + 16 * 4 - 1  # 0x45


class OutputsInactiveError(StateError):
    """Raised when reading a duty cycle while the oscillator is asleep."""


def prescale_for(freq_hz: float) -> int:
    """Datasheet prescaler for a target frame rate: round(osc/(4096*f)) - 1."""
    if not (FREQ_MIN_HZ <= freq_hz <= FREQ_MAX_HZ):
        raise ValidationError(f"PWM frequency {freq_hz} Hz outside device range [{FREQ_MIN_HZ}, {FREQ_MAX_HZ}]")
    prescale = round(OSC_HZ / (4096.0 * freq_hz)) - 1
    return max(PRESCALE_MIN, min(PRESCALE_MAX, prescale))


def effective_freq_hz(prescale: int) -> float:
    """Actual frame rate produced by a prescaler value."""
    return OSC_HZ / (4096.0 * (prescale + 1))


class Pca9685Emu:
    """One emulated device instance, attachable to an I2cBusEmu address."""

    def __init__(self):
        self.regs = bytearray(0x100)
        self.regs[MODE1] = MODE1_SLEEP  # powers up asleep, per datasheet
        self.regs[PRESCALE] = 0x1E
        self.diagnostics: list[str] = []

    # -- register semantics ---------------------------------------------

    @property
    def sleeping(self) -> bool:
        return bool(self.regs[MODE1] & MODE1_SLEEP)

    @property
    def auto_increment(self) -> bool:
        return bool(self.regs[MODE1] & MODE1_AI)

    @property
    def prescale(self) -> int:
        return self.regs[PRESCALE]

    def on_write(self, register: int, data: bytes) -> None:
        reg = register
        for byte in data:
            self._write_one(reg, byte)
            if self.auto_increment:
                reg = (reg + 1) & 0xFF
            # Without AI the device keeps addressing the same register.

    def _write_one(self, reg: int, value: int) -> None:
        if reg == PRESCALE:
            # Datasheet gating: PRE_SCALE writable only while SLEEP = 1.
            if not self.sleeping:
                self.diagnostics.append(f"PRESCALE write {value:#04x} ignored: SLEEP=0")
                return
            self.regs[PRESCALE] = value
            return
        if reg == MODE1:
            was_sleeping = self.sleeping
            self.regs[MODE1] = value
            if was_sleeping and not self.sleeping:
                # Oscillator restarts; flag RESTART as readable state.
                self.regs[MODE1] |= MODE1_RESTART
            return
        self.regs[reg] = value

    def on_read(self, register: int, length: int) -> bytes:
        out = bytearray()
        reg = register
        for _ in range(length):
            out.append(self.regs[reg])
            if self.auto_increment:
                reg = (reg + 1) & 0xFF
        return bytes(out)

    # -- channel state ----------------------------------------------------

    def channel_counts(self, channel: int) -> tuple[int, int]:
        """(on_count, off_count) for a channel, masked to 12 bits."""
        if not (0 <= channel <= 15):
            raise ValidationError(f"channel must be 0..15, got {channel}")
        base = LED0_ON_L + 4 * channel
        on = self.regs[base] | ((self.regs[base + 1] & 0x0F) << 8)
        off = self.regs[base + 2] | ((self.regs[base + 3] & 0x0F) << 8)
        return on, off


def duty_of(device: Pca9685Emu, channel: int) -> float:
    """Pulse width in microseconds currently programmed on a channel.

    Inverse of the count mapping, using the *effective* frame rate of
    the programmed prescaler (one count lasts (prescale+1)/osc seconds).
    """
    if device.sleeping:
        raise OutputsInactiveError("outputs inactive: device is asleep")
    on, off = device.channel_counts(channel)
    counts = (off - on) % 4096
    freq = effective_freq_hz(device.prescale)
    return counts * 1e6 / (freq * 4096.0)
