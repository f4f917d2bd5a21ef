"""Numpy fallback for the fire kernels.

Same contract as the compiled versions in ``_ckernels``: float32 storage,
float64 accumulation, channel-major tap order.
"""

import numpy as np

BACKEND = "python"


def _window(bank, tail):
    # bank rows are per-channel ring storage; the logical window starts at
    # tail and wraps. Kernels only fire on full buffers, so the window spans
    # the whole row.
    if tail == 0:
        return bank
    return np.concatenate((bank[:, tail:], bank[:, :tail]), axis=1)


def conv_fire(bank, tail, weights, bias, relu):
    win = _window(bank, tail).astype(np.float64).ravel()
    flat = weights.reshape(weights.shape[0], -1).astype(np.float64)
    acc = flat @ win + bias.astype(np.float64)
    if relu:
        np.maximum(acc, 0.0, out=acc)
    return acc.astype(np.float32)


def pool_fire(bank, tail, take_max):
    win = _window(bank, tail)
    if take_max:
        return win.max(axis=1)
    return win.astype(np.float64).mean(axis=1).astype(np.float32)
