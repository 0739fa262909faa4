"""Pure-numpy convolution kernels (im2col + BLAS matmul).

Fallback backend used when the compiled extension is unavailable; also
selectable explicitly (TEACAR_BACKEND=numpy). Shapes are NCHW, valid
(zero) padding, square kernels.
"""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

NAME = "numpy"


def out_size(n: int, k: int, stride: int) -> int:
    return (n - k) // stride + 1


def _windows(x: np.ndarray, kh: int, kw: int, stride: int) -> np.ndarray:
    # (N, C, OH, OW, kh, kw) strided view, no copy
    w = sliding_window_view(x, (kh, kw), axis=(2, 3))
    return w[:, :, ::stride, ::stride]


def conv2d_forward(x: np.ndarray, w: np.ndarray, b: np.ndarray, stride: int) -> np.ndarray:
    windows = _windows(x, w.shape[2], w.shape[3], stride)
    y = np.tensordot(windows, w, axes=([1, 4, 5], [1, 2, 3]))  # (N, OH, OW, O)
    y += b
    return np.ascontiguousarray(y.transpose(0, 3, 1, 2))


def conv2d_backward(x: np.ndarray, w: np.ndarray, gy: np.ndarray, stride: int):
    """Gradients (gx, gw, gb) of the valid cross-correlation."""
    o, _, kh, kw = w.shape
    oh, ow = gy.shape[2], gy.shape[3]

    windows = _windows(x, kh, kw, stride)
    gb = gy.sum(axis=(0, 2, 3))
    gw = np.tensordot(gy, windows, axes=([0, 2, 3], [0, 2, 3]))

    # Input gradient, scattered per kernel offset: one flat (N*OH*OW, O) x
    # (O, C) matmul per tap keeps the cost equal to the forward pass.
    gx = np.zeros_like(x)
    n = x.shape[0]
    gy_flat = np.ascontiguousarray(gy.transpose(0, 2, 3, 1)).reshape(-1, o)
    for ky in range(kh):
        for kx in range(kw):
            contrib = (gy_flat @ w[:, :, ky, kx]).reshape(n, oh, ow, -1)
            gx[:, :, ky : ky + stride * oh : stride, kx : kx + stride * ow : stride] += (
                contrib.transpose(0, 3, 1, 2)
            )
    return gx, gw, gb
