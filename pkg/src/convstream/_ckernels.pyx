# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled fire kernels: the per-fire inner loops of the streaming engine.

float32 storage, float64 accumulation, channel-major tap order; identical
results to ``_pykernels`` up to summation-order rounding.
"""

import numpy as np

BACKEND = "cython"


def conv_fire(const float[:, ::1] bank, Py_ssize_t tail,
              const float[:, :, ::1] weights, const float[::1] bias,
              bint relu):
    """Evaluate every filter on the full ring windows in ``bank``.

    ``bank`` holds one row of ring storage per input channel; the logical
    window starts at ``tail`` and wraps. Only called on full buffers, so the
    window spans the whole row.
    """
    cdef Py_ssize_t nf = weights.shape[0]
    cdef Py_ssize_t nc = weights.shape[1]
    cdef Py_ssize_t m = weights.shape[2]
    out_arr = np.empty(nf, dtype=np.float32)
    cdef float[::1] out = out_arr
    cdef Py_ssize_t f, c, j, idx
    cdef double acc
    for f in range(nf):
        acc = 0.0
        for c in range(nc):
            idx = tail
            for j in range(m):
                acc += <double> bank[c, idx] * <double> weights[f, c, j]
                idx += 1
                if idx == m:
                    idx = 0
        acc += <double> bias[f]
        if relu and acc < 0.0:
            acc = 0.0
        out[f] = <float> acc
    return out_arr


def pool_fire(const float[:, ::1] bank, Py_ssize_t tail, bint take_max):
    """Per-channel max or mean of the full ring windows in ``bank``."""
    cdef Py_ssize_t nc = bank.shape[0]
    cdef Py_ssize_t p = bank.shape[1]
    out_arr = np.empty(nc, dtype=np.float32)
    cdef float[::1] out = out_arr
    cdef Py_ssize_t c, j, idx
    cdef double acc
    cdef float best
    for c in range(nc):
        if take_max:
            best = bank[c, tail]
            idx = tail
            for j in range(1, p):
                idx += 1
                if idx == p:
                    idx = 0
                if bank[c, idx] > best:
                    best = bank[c, idx]
            out[c] = best
        else:
            acc = 0.0
            idx = tail
            for j in range(p):
                acc += <double> bank[c, idx]
                idx += 1
                if idx == p:
                    idx = 0
            out[c] = <float> (acc / p)
    return out_arr
