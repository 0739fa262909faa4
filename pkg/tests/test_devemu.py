import io
import json
import random

import pytest

from teacar.devemu import (
    LED0_ON_L,
    MODE1,
    PRESCALE,
    BatteryModel,
    I2cBusEmu,
    OutputsInactiveError,
    Pca9685Emu,
    PowerBoardState,
    battery_step,
    duty_of,
    prescale_for,
    protection_check,
)
from teacar.devemu.pca9685 import MODE1_AI, MODE1_SLEEP, effective_freq_hz
from teacar.errors import ValidationError


@pytest.fixture
def dev():
    bus = I2cBusEmu()
    device = Pca9685Emu()
    bus.attach(0x40, device)
    return bus, device


# -- prescaler -----------------------------------------------------------


def test_prescale_values():
    assert prescale_for(50) == 121
    assert prescale_for(60) == 101
    assert prescale_for(1526) == 3


def test_prescale_range_validated():
    with pytest.raises(ValidationError):
        prescale_for(23.9)
    with pytest.raises(ValidationError):
        prescale_for(1527)


def test_frequency_accuracy_quantization_bound():
    # Rounding a freq to an 8-bit prescaler p bounds the relative error by
    # 0.5/(p+1); that works out to 1/244 at the 50 Hz servo operating point.
    f = 24.0
    while f <= 1526.0:
        p = prescale_for(f)
        eff = effective_freq_hz(p)
        assert abs(eff - f) / f <= 0.5 / (p + 1) + 1e-12, f
        if f <= 51.0:
            assert abs(eff - f) / f <= 1.0 / 244.0, f
        f += 1.37


# -- register semantics ----------------------------------------------------


def test_prescale_write_gated_by_sleep(dev):
    bus, device = dev
    assert bus.write(0x40, MODE1, bytes([0x11]))  # SLEEP=1
    assert bus.write(0x40, PRESCALE, bytes([121]))
    assert device.prescale == 121


def test_prescale_write_ignored_when_awake(dev):
    bus, device = dev
    bus.write(0x40, MODE1, bytes([0x00]))  # wake
    before = device.prescale
    bus.write(0x40, PRESCALE, bytes([200]))
    assert device.prescale == before
    assert any("SLEEP=0" in d for d in device.diagnostics)


def test_write_to_empty_address_nacks(dev):
    bus, _ = dev
    assert bus.write(0x55, MODE1, bytes([0x00])) is False
    assert bus.read(0x55, MODE1, 1) is None


def test_register_roundtrip_with_auto_increment(dev):
    bus, device = dev
    bus.write(0x40, MODE1, bytes([MODE1_AI | MODE1_SLEEP]))
    payload = bytes([0x12, 0x03, 0x45, 0x06])
    bus.write(0x40, LED0_ON_L, payload)
    assert bus.read(0x40, LED0_ON_L, 4) == payload


def test_register_roundtrip_without_auto_increment(dev):
    bus, device = dev
    bus.write(0x40, MODE1, bytes([MODE1_SLEEP]))  # AI off
    bus.write(0x40, LED0_ON_L, bytes([0x11, 0x22]))  # second byte overwrites
    assert bus.read(0x40, LED0_ON_L, 1) == bytes([0x22])
    assert device.regs[LED0_ON_L + 1] == 0


def test_transaction_log_order_and_export(dev):
    bus, _ = dev
    bus.write(0x40, MODE1, bytes([0x11]))
    bus.write(0x40, PRESCALE, bytes([121]))
    bus.read(0x40, PRESCALE, 1)
    fh = io.StringIO()
    assert bus.export_log(fh) == 3
    lines = [json.loads(line) for line in fh.getvalue().splitlines()]
    assert [rec["kind"] for rec in lines] == ["write", "write", "read"]
    assert lines[1]["reg"] == PRESCALE


# -- duty readback ---------------------------------------------------------


def write_channel(bus, channel, on, off):
    base = LED0_ON_L + 4 * channel
    bus.write(0x40, base, bytes([on & 0xFF, (on >> 8) & 0x0F, off & 0xFF, (off >> 8) & 0x0F]))


def test_duty_of_formula(dev):
    bus, device = dev
    bus.write(0x40, MODE1, bytes([MODE1_AI | MODE1_SLEEP]))
    bus.write(0x40, PRESCALE, bytes([121]))
    bus.write(0x40, MODE1, bytes([MODE1_AI]))
    write_channel(bus, 0, 0, 307)
    # One count lasts (prescale+1)/25 MHz = 4.88 us -> 307 counts = 1498.16 us.
    assert duty_of(device, 0) == pytest.approx(307 * 122 / 25.0, abs=1e-9)


def test_duty_of_zero(dev):
    bus, device = dev
    bus.write(0x40, MODE1, bytes([MODE1_AI]))
    write_channel(bus, 3, 0, 0)
    assert duty_of(device, 3) == 0.0


def test_duty_of_requires_awake(dev):
    _, device = dev
    with pytest.raises(OutputsInactiveError):
        duty_of(device, 0)


# -- battery ---------------------------------------------------------------


def test_battery_matches_measured_discharge():
    b = BatteryModel(voltage_v=12.6)
    b = battery_step(b, load_w=7.5, dt_s=1800.0)
    assert b.voltage_v == pytest.approx(11.6, abs=1e-9)


def test_battery_zero_load_holds_voltage():
    b = BatteryModel(voltage_v=12.6)
    assert battery_step(b, load_w=0.0, dt_s=60.0).voltage_v == 12.6


def test_battery_large_profile_within_rounding():
    b = battery_step(BatteryModel(voltage_v=12.6), load_w=7.6, dt_s=1800.0)
    assert abs(b.voltage_v - 11.5) <= 0.1


def test_battery_voltage_monotone_under_load():
    rng = random.Random(7)
    b = BatteryModel(voltage_v=12.6)
    prev = b.voltage_v
    for _ in range(200):
        b = battery_step(b, load_w=rng.uniform(0, 20), dt_s=rng.uniform(0.01, 30))
        assert b.voltage_v <= prev
        prev = b.voltage_v


def test_battery_floors_at_zero():
    b = BatteryModel(voltage_v=0.5)
    b = battery_step(b, load_w=100.0, dt_s=36_000.0)
    assert b.voltage_v == 0.0


# -- protection --------------------------------------------------------------


def test_protection_nominal_enabled():
    board = PowerBoardState(input_v=12.6)
    rails = protection_check(board)
    assert all(rails.values())


@pytest.mark.parametrize("v,expect", [(8.9, False), (9.0, True), (15.0, True), (15.1, False)])
def test_protection_bounds_inclusive(v, expect):
    board = PowerBoardState(input_v=v)
    rails = protection_check(board)
    assert all(rails.values()) is expect


def test_protection_latches_until_reset():
    board = PowerBoardState(input_v=8.0)
    assert not any(protection_check(board).values())
    board.input_v = 12.0  # back in range, but latch holds
    assert not any(protection_check(board).values())
    assert board.reset()
    assert all(protection_check(board).values())


def test_protection_reset_refused_out_of_range():
    board = PowerBoardState(input_v=8.0)
    protection_check(board)
    assert board.reset() is False
    assert not any(protection_check(board).values())


def test_rails_never_partially_enabled():
    rng = random.Random(3)
    board = PowerBoardState(input_v=12.6)
    for _ in range(300):
        board.input_v = rng.uniform(5.0, 18.0)
        rails = protection_check(board)
        assert len(set(rails.values())) == 1
        if rng.random() < 0.3:
            board.reset()


def test_protection_trip_emits_event():
    events = []
    board = PowerBoardState(input_v=12.6)
    protection_check(board, on_change=lambda n, p: events.append((n, p)))
    board.input_v = 8.5
    protection_check(board, on_change=lambda n, p: events.append((n, p)))
    assert len(events) == 1
    name, payload = events[0]
    assert name == "power.protection" and payload["rails_enabled"] is False
