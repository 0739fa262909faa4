# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled convolution kernels: im2col in C + BLAS GEMM.

Same NCHW contract as kernels_numpy; float32/float64 via fused types.
Column buffers are built per image so memory stays bounded; BLAS
(sgemm/dgemm) does the arithmetic. This is the hot path for both
training batches and single-frame inference.
"""

import numpy as np

cimport cython
from libc.stdlib cimport free, malloc
from scipy.linalg.cython_blas cimport dgemm, sgemm

NAME = "cython"

ctypedef fused floating:
    float
    double


cdef inline void _gemm(bint is_float, char ta, char tb, int m, int n, int k,
                       void *a, int lda, void *b, int ldb, double beta,
                       void *c, int ldc) nogil:
    cdef float f_one = 1.0, f_beta
    cdef double d_one = 1.0, d_beta
    if is_float:
        f_beta = <float> beta
        sgemm(&ta, &tb, &m, &n, &k, &f_one, <float *> a, &lda,
              <float *> b, &ldb, &f_beta, <float *> c, &ldc)
    else:
        d_beta = beta
        dgemm(&ta, &tb, &m, &n, &k, &d_one, <double *> a, &lda,
              <double *> b, &ldb, &d_beta, <double *> c, &ldc)


cdef void _im2col(const floating *xn, floating *cols,
                  Py_ssize_t C, Py_ssize_t H, Py_ssize_t W,
                  Py_ssize_t KH, Py_ssize_t KW, Py_ssize_t OH, Py_ssize_t OW,
                  int stride) nogil:
    # cols is (C*KH*KW, OH*OW) row-major
    cdef Py_ssize_t c, ky, kx, oy, ox
    cdef const floating *src
    cdef floating *dst
    for c in range(C):
        for ky in range(KH):
            for kx in range(KW):
                dst = cols + (((c * KH) + ky) * KW + kx) * (OH * OW)
                for oy in range(OH):
                    src = xn + (c * H + oy * stride + ky) * W + kx
                    for ox in range(OW):
                        dst[oy * OW + ox] = src[ox * stride]


cdef void _col2im_add(const floating *cols, floating *gxn,
                      Py_ssize_t C, Py_ssize_t H, Py_ssize_t W,
                      Py_ssize_t KH, Py_ssize_t KW, Py_ssize_t OH, Py_ssize_t OW,
                      int stride) nogil:
    cdef Py_ssize_t c, ky, kx, oy, ox
    cdef const floating *src
    cdef floating *dst
    for c in range(C):
        for ky in range(KH):
            for kx in range(KW):
                src = cols + (((c * KH) + ky) * KW + kx) * (OH * OW)
                for oy in range(OH):
                    dst = gxn + (c * H + oy * stride + ky) * W + kx
                    for ox in range(OW):
                        dst[ox * stride] += src[oy * OW + ox]


def conv2d_forward(floating[:, :, :, ::1] x, floating[:, :, :, ::1] w,
                   floating[::1] b, int stride):
    cdef Py_ssize_t N = x.shape[0], C = x.shape[1], H = x.shape[2], W = x.shape[3]
    cdef Py_ssize_t O = w.shape[0], KH = w.shape[2], KW = w.shape[3]
    cdef Py_ssize_t OH = (H - KH) // stride + 1
    cdef Py_ssize_t OW = (W - KW) // stride + 1
    cdef Py_ssize_t P = OH * OW, K = C * KH * KW
    cdef bint is_float = (floating is float)

    y_arr = np.empty((N, O, OH, OW), dtype=np.float32 if is_float else np.float64)
    cdef floating[:, :, :, ::1] y = y_arr

    cdef floating *cols = <floating *> malloc(K * P * sizeof(floating))
    if cols == NULL:
        raise MemoryError()
    cdef const floating *xp = &x[0, 0, 0, 0]
    cdef const floating *wp = &w[0, 0, 0, 0]
    cdef floating *yp = &y[0, 0, 0, 0]
    cdef floating *yn
    cdef Py_ssize_t n, o, p
    try:
        with nogil:
            for n in range(N):
                _im2col(xp + n * C * H * W, cols, C, H, W, KH, KW, OH, OW, stride)
                yn = yp + n * O * P
                # row-major y_n (O,P) = w (O,K) @ cols (K,P)
                _gemm(is_float, b'N', b'N', <int> P, <int> O, <int> K,
                      cols, <int> P, <void *> wp, <int> K, 0.0, yn, <int> P)
                for o in range(O):
                    for p in range(P):
                        yn[o * P + p] += b[o]
    finally:
        free(cols)
    return y_arr


def conv2d_backward(floating[:, :, :, ::1] x, floating[:, :, :, ::1] w,
                    floating[:, :, :, ::1] gy, int stride):
    cdef Py_ssize_t N = x.shape[0], C = x.shape[1], H = x.shape[2], W = x.shape[3]
    cdef Py_ssize_t O = w.shape[0], KH = w.shape[2], KW = w.shape[3]
    cdef Py_ssize_t OH = gy.shape[2], OW = gy.shape[3]
    cdef Py_ssize_t P = OH * OW, K = C * KH * KW
    cdef bint is_float = (floating is float)

    dtype = np.float32 if is_float else np.float64
    gx_arr = np.zeros((N, C, H, W), dtype=dtype)
    gw_arr = np.zeros((O, C, KH, KW), dtype=dtype)
    gb_arr = np.zeros(O, dtype=dtype)
    cdef floating[:, :, :, ::1] gx = gx_arr
    cdef floating[:, :, :, ::1] gw = gw_arr
    cdef floating[::1] gb = gb_arr

    cdef floating *cols = <floating *> malloc(K * P * sizeof(floating))
    cdef floating *gcols = <floating *> malloc(K * P * sizeof(floating))
    if cols == NULL or gcols == NULL:
        free(cols)
        free(gcols)
        raise MemoryError()

    cdef const floating *xp = &x[0, 0, 0, 0]
    cdef const floating *wp = &w[0, 0, 0, 0]
    cdef const floating *gyp = &gy[0, 0, 0, 0]
    cdef floating *gxp = &gx[0, 0, 0, 0]
    cdef floating *gwp = &gw[0, 0, 0, 0]
    cdef const floating *gyn
    cdef Py_ssize_t n, o, p
    try:
        with nogil:
            for n in range(N):
                gyn = gyp + n * O * P
                for o in range(O):
                    for p in range(P):
                        gb[o] += gyn[o * P + p]
                _im2col(xp + n * C * H * W, cols, C, H, W, KH, KW, OH, OW, stride)
                # gw (O,K) += gy_n (O,P) @ cols^T (P,K)
                _gemm(is_float, b'T', b'N', <int> K, <int> O, <int> P,
                      cols, <int> P, <void *> gyn, <int> P, 1.0, gwp, <int> K)
                # gcols (K,P) = w^T (K,O) @ gy_n (O,P)
                _gemm(is_float, b'N', b'T', <int> P, <int> K, <int> O,
                      <void *> gyn, <int> P, <void *> wp, <int> K, 0.0, gcols, <int> P)
                _col2im_add(gcols, gxp + n * C * H * W, C, H, W, KH, KW, OH, OW, stride)
    finally:
        free(cols)
        free(gcols)
    return gx_arr, gw_arr, gb_arr
