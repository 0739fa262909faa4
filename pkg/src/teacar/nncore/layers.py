"""Layer zoo and network container for the steering CNNs.

Layers operate on NCHW float batches and cache what backward needs.
Conv/Linear hold their parameters and gradients; the optimizer walks
Network.param_layers().
"""

from __future__ import annotations

import numpy as np

from ..errors import ValidationError
from . import backend


class Conv2d:
    def __init__(self, in_ch, out_ch, k, stride=1, dtype=np.float32):
        self.in_ch = in_ch
        self.out_ch = out_ch
        self.k = k
        self.stride = stride
        self.weight = np.zeros((out_ch, in_ch, k, k), dtype=dtype)
        self.bias = np.zeros(out_ch, dtype=dtype)
        self.grad_weight = np.zeros_like(self.weight)
        self.grad_bias = np.zeros_like(self.bias)
        self._x = None

    def forward(self, x):
        if x.ndim != 4 or x.shape[1] != self.in_ch:
            raise ValidationError(
                f"conv expects (N,{self.in_ch},H,W), got {x.shape}"
            )
        if x.shape[2] < self.k or x.shape[3] < self.k:
            raise ValidationError(f"input {x.shape} smaller than kernel {self.k}")
        self._x = np.ascontiguousarray(x)
        return backend.conv2d_forward(self._x, self.weight, self.bias, self.stride)

    def backward(self, gy):
        gx, gw, gb = backend.conv2d_backward(
            self._x, self.weight, np.ascontiguousarray(gy), self.stride
        )
        self.grad_weight = gw
        self.grad_bias = gb
        return gx


class Linear:
    def __init__(self, in_features, out_features, dtype=np.float32):
        self.in_features = in_features
        self.out_features = out_features
        self.weight = np.zeros((out_features, in_features), dtype=dtype)
        self.bias = np.zeros(out_features, dtype=dtype)
        self.grad_weight = np.zeros_like(self.weight)
        self.grad_bias = np.zeros_like(self.bias)
        self._x = None

    def forward(self, x):
        if x.ndim != 2 or x.shape[1] != self.in_features:
            raise ValidationError(f"linear expects (N,{self.in_features}), got {x.shape}")
        self._x = x
        return x @ self.weight.T + self.bias

    def backward(self, gy):
        self.grad_weight = gy.T @ self._x
        self.grad_bias = gy.sum(axis=0)
        return gy @ self.weight


class ReLU:
    def forward(self, x):
        self._mask = x > 0
        return np.where(self._mask, x, 0)

    def backward(self, gy):
        return np.where(self._mask, gy, 0)


class Tanh:
    def forward(self, x):
        self._y = np.tanh(x)
        return self._y

    def backward(self, gy):
        return gy * (1.0 - self._y * self._y)


class Flatten:
    def forward(self, x):
        self._shape = x.shape
        return x.reshape(x.shape[0], -1)

    def backward(self, gy):
        return gy.reshape(self._shape)


class Network:
    """Ordered layer stack with a single forward/backward pass."""

    def __init__(self, layers, arch_name=None):
        self.layers = list(layers)
        self.arch_name = arch_name

    def forward(self, x):
        for layer in self.layers:
            x = layer.forward(x)
        return x

    def backward(self, gy):
        for layer in reversed(self.layers):
            gy = layer.backward(gy)
        return gy

    def param_layers(self):
        return [l for l in self.layers if isinstance(l, (Conv2d, Linear))]

    def param_count(self):
        return sum(l.weight.size + l.bias.size for l in self.param_layers())
