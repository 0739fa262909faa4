"""The three steering-controller architectures (small / medium / large).

All share the same topology: five valid-padding conv+relu stages
(5x5 stride 2 three times, then 3x3 stride 1 twice), flatten, four
fully connected layers, tanh head producing one steering value from a
3x144x224 RGB input. They differ only in channel/feature widths.

Valid padding with floor division is forced by the flatten sizes: the
spatial trace 70x110 -> 33x53 -> 15x25 -> 13x23 -> 11x21 leaves 231
positions per channel, and 48*231 = 11,088 matches the small FC1 input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import ValidationError
from .layers import Conv2d, Flatten, Linear, Network, ReLU, Tanh

INPUT_SHAPE = (3, 144, 224)


@dataclass(frozen=True)
class LayerSpec:
    kind: str  # conv | relu | fc | tanh | flatten
    in_ch: int = 0
    out_ch: int = 0
    k: int = 0
    stride: int = 1
    in_features: int = 0
    out_features: int = 0


def _conv(i, o, k, s):
    return LayerSpec(kind="conv", in_ch=i, out_ch=o, k=k, stride=s)


def _fc(i, o):
    return LayerSpec(kind="fc", in_features=i, out_features=o)


_RELU = LayerSpec(kind="relu")
_TANH = LayerSpec(kind="tanh")
_FLAT = LayerSpec(kind="flatten")


@dataclass(frozen=True)
class ModelArch:
    name: str
    layers: tuple = field(default_factory=tuple)


def _stack(convs, fcs):
    layers = []
    for i, o, k, s in convs:
        layers += [_conv(i, o, k, s), _RELU]
    layers.append(_FLAT)
    for i, o in fcs[:-1]:
        layers += [_fc(i, o), _RELU]
    layers += [_fc(*fcs[-1]), _TANH]
    return tuple(layers)


ARCHS = {
    "small": ModelArch(
        "small",
        _stack(
            [(3, 24, 5, 2), (24, 24, 5, 2), (24, 36, 5, 2), (36, 48, 3, 1), (48, 48, 3, 1)],
            [(11_088, 64), (64, 32), (32, 8), (8, 1)],
        ),
    ),
    "medium": ModelArch(
        "medium",
        _stack(
            [(3, 24, 5, 2), (24, 36, 5, 2), (36, 48, 5, 2), (48, 64, 3, 1), (64, 64, 3, 1)],
            [(14_784, 100), (100, 50), (50, 10), (10, 1)],
        ),
    ),
    "large": ModelArch(
        "large",
        _stack(
            [(3, 36, 5, 2), (36, 48, 5, 2), (48, 64, 5, 2), (64, 96, 3, 1), (96, 96, 3, 1)],
            [(22_176, 200), (200, 100), (100, 20), (20, 1)],
        ),
    ),
}

ARCH_IDS = {"small": 0, "medium": 1, "large": 2}
ARCH_NAMES = {v: k for k, v in ARCH_IDS.items()}


def get_arch(name: str) -> ModelArch:
    try:
        return ARCHS[name]
    except KeyError:
        raise ValidationError(f"unknown architecture {name!r}; choose from {sorted(ARCHS)}") from None


def output_shapes(arch: ModelArch) -> list:
    """Shape trace through the conv stack, ending with the flatten size."""
    c, h, w = INPUT_SHAPE
    trace = []
    for spec in arch.layers:
        if spec.kind == "conv":
            h = (h - spec.k) // spec.stride + 1
            w = (w - spec.k) // spec.stride + 1
            c = spec.out_ch
            trace.append((c, h, w))
        elif spec.kind == "flatten":
            trace.append(c * h * w)
    return trace


def param_count(arch: ModelArch) -> int:
    total = 0
    for spec in arch.layers:
        if spec.kind == "conv":
            total += spec.out_ch * spec.in_ch * spec.k * spec.k + spec.out_ch
        elif spec.kind == "fc":
            total += spec.in_features * spec.out_features + spec.out_features
    return total


def build_network(arch: ModelArch, seed=None, dtype=np.float32) -> Network:
    """Instantiate layers; Kaiming-uniform weights when seeded, zeros otherwise."""
    rng = np.random.default_rng(seed) if seed is not None else None
    layers = []
    for spec in arch.layers:
        if spec.kind == "conv":
            layer = Conv2d(spec.in_ch, spec.out_ch, spec.k, spec.stride, dtype=dtype)
            if rng is not None:
                bound = math.sqrt(6.0 / (spec.in_ch * spec.k * spec.k))
                layer.weight[...] = rng.uniform(-bound, bound, layer.weight.shape)
            layers.append(layer)
        elif spec.kind == "fc":
            layer = Linear(spec.in_features, spec.out_features, dtype=dtype)
            if rng is not None:
                bound = math.sqrt(6.0 / spec.in_features)
                layer.weight[...] = rng.uniform(-bound, bound, layer.weight.shape)
            layers.append(layer)
        elif spec.kind == "relu":
            layers.append(ReLU())
        elif spec.kind == "tanh":
            layers.append(Tanh())
        elif spec.kind == "flatten":
            layers.append(Flatten())
        else:
            raise ValidationError(f"unknown layer kind {spec.kind!r}")
    return Network(layers, arch_name=arch.name)


def image_to_input(image_hwc_u8: np.ndarray, dtype=np.float32) -> np.ndarray:
    """HWC uint8 frame -> normalized (1,C,H,W) batch (byte/255 preprocessing)."""
    if image_hwc_u8.shape != (144, 224, 3):
        raise ValidationError(f"expected 144x224x3 image, got {image_hwc_u8.shape}")
    x = image_hwc_u8.astype(dtype) / dtype(255.0)
    return np.ascontiguousarray(x.transpose(2, 0, 1))[None, :, :, :]


def forward(net: Network, image_hwc_u8: np.ndarray) -> float:
    """Single-image steering inference; output in (-1, 1)."""
    dtype = net.param_layers()[0].weight.dtype
    return float(net.forward(image_to_input(image_hwc_u8, dtype=dtype))[0, 0])
