"""Binary weight file format.

Little-endian layout:

    magic   4 bytes  "TEAW"
    version u16      1
    arch    u8       0 small / 1 medium / 2 large
    preproc u8       0 = byte/255
    then per parameter layer, in architecture order:
        kernel f32[...]   (conv OxCxkxk or fc OxI, row-major)
        bias   f32[O]

The preprocessing id rides in the header so training and inference
cannot diverge on normalization.
"""

from __future__ import annotations

import struct

import numpy as np

from ..errors import FormatError
from .arch import ARCH_IDS, ARCH_NAMES, build_network, get_arch
from .layers import Network

MAGIC = b"TEAW"
VERSION = 1
PREPROC_BYTE_OVER_255 = 0


def save_weights(net: Network, path) -> None:
    if net.arch_name not in ARCH_IDS:
        raise FormatError(f"network has no storable architecture tag: {net.arch_name!r}")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<HBB", VERSION, ARCH_IDS[net.arch_name], PREPROC_BYTE_OVER_255))
        for layer in net.param_layers():
            fh.write(np.ascontiguousarray(layer.weight, dtype="<f4").tobytes())
            fh.write(np.ascontiguousarray(layer.bias, dtype="<f4").tobytes())


def load_weights(path, expect_arch: str | None = None) -> Network:
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < 8 or blob[:4] != MAGIC:
        raise FormatError("not a TEAW weight file (bad magic)")
    version, arch_id, preproc = struct.unpack("<HBB", blob[4:8])
    if version != VERSION:
        raise FormatError(f"unsupported weight file version {version}")
    if arch_id not in ARCH_NAMES:
        raise FormatError(f"unknown architecture id {arch_id}")
    if preproc != PREPROC_BYTE_OVER_255:
        raise FormatError(f"unknown preprocessing id {preproc}")
    arch_name = ARCH_NAMES[arch_id]
    if expect_arch is not None and arch_name != expect_arch:
        raise FormatError(f"weight file is for {arch_name!r}, run configured for {expect_arch!r}")

    net = build_network(get_arch(arch_name))
    offset = 8
    for layer in net.param_layers():
        for param in (layer.weight, layer.bias):
            nbytes = param.size * 4
            if offset + nbytes > len(blob):
                raise FormatError("weight file truncated mid-array")
            param[...] = np.frombuffer(blob, dtype="<f4", count=param.size, offset=offset).reshape(param.shape)
            offset += nbytes
    if offset != len(blob):
        raise FormatError(f"{len(blob) - offset} trailing bytes after last array")
    return net
