"""Convolution backend selection: compiled extension vs numpy fallback.

The compiled module is optional; when it failed to build or import the
numpy kernels take over transparently. TEACAR_BACKEND=numpy|cython|auto
overrides the choice (auto picks the default preference order).

On small-core machines the batched im2col/BLAS path usually wins, so
`auto` prefers numpy; the compiled kernels stay one env var away and
benchmarks/kernel_bench.py compares both.
"""

from __future__ import annotations

import os

from . import kernels_numpy

_BACKENDS = {"numpy": kernels_numpy}

try:
    from . import _kernels  # compiled

    _BACKENDS["cython"] = _kernels
except ImportError:  # extension not built; numpy fallback stays
    _kernels = None

_AUTO_ORDER = ("numpy", "cython")
_active: list = []


def available_backends() -> tuple:
    return tuple(sorted(_BACKENDS))


def resolve(name: str = "auto"):
    if name in (None, "auto"):
        env = os.environ.get("TEACAR_BACKEND", "auto")
        name = env if env else "auto"
    if name == "auto":
        for candidate in _AUTO_ORDER:
            if candidate in _BACKENDS:
                return _BACKENDS[candidate]
    if name not in _BACKENDS:
        raise ValueError(f"unknown conv backend {name!r}; available: {available_backends()}")
    return _BACKENDS[name]


def set_backend(name: str) -> None:
    _active.clear()
    _active.append(resolve(name))


def get_backend():
    if not _active:
        _active.append(resolve("auto"))
    return _active[0]


def conv2d_forward(x, w, b, stride):
    return get_backend().conv2d_forward(x, w, b, stride)


def conv2d_backward(x, w, gy, stride):
    return get_backend().conv2d_backward(x, w, gy, stride)
