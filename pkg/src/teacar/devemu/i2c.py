"""Emulated I2C bus: 7-bit addressed devices plus an append-only transaction log."""

from __future__ import annotations

import json
from dataclasses import dataclass

from ..errors import ValidationError


@dataclass(frozen=True)
class I2cTransaction:
    address: int
    register: int
    data: bytes
    kind: str  # "write" | "read"
    acked: bool


class I2cBusEmu:
    """Single-initiator I2C bus. At most one device per address; the log
    order equals execution order."""

    def __init__(self):
        self._devices = {}
        self.log: list[I2cTransaction] = []

    def attach(self, address: int, device) -> None:
        if not (0 <= address <= 0x7F):
            raise ValidationError(f"I2C address must be 7-bit, got {address:#x}")
        if address in self._devices:
            raise ValidationError(f"address {address:#x} already occupied")
        self._devices[address] = device

    def write(self, address: int, register: int, data: bytes) -> bool:
        """Write `data` starting at `register`. Returns True (ack) when a
        device is present, False (nack) otherwise."""
        device = self._devices.get(address)
        acked = device is not None
        self.log.append(I2cTransaction(address, register, bytes(data), "write", acked))
        if acked:
            device.on_write(register, bytes(data))
        return acked

    def read(self, address: int, register: int, length: int) -> bytes | None:
        """Read `length` bytes starting at `register`; None on nack."""
        device = self._devices.get(address)
        if device is None:
            self.log.append(I2cTransaction(address, register, b"", "read", False))
            return None
        data = device.on_read(register, length)
        self.log.append(I2cTransaction(address, register, data, "read", True))
        return data

    def export_log(self, fh) -> int:
        """Dump the transaction log as JSON Lines; returns line count."""
        for t in self.log:
            fh.write(
                json.dumps(
                    {
                        "addr": t.address,
                        "reg": t.register,
                        "data": t.data.hex(),
                        "kind": t.kind,
                        "acked": t.acked,
                    },
                    sort_keys=True,
                )
                + "\n"
            )
        return len(self.log)
