"""Streaming convolution and pooling stages.

Each stage owns one ring buffer per input channel. A ``step`` pushes one
multi-channel sample into the buffers; when they fill, the stage fires: it
evaluates its kernel over the buffered window, discards the ``stride`` oldest
samples from every buffer, and hands the result downstream. Because every
channel buffer receives exactly one value per step, their occupancies stay in
lockstep and a single index check decides whether the stage fires.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ShapeError
from .ringbuf import StridedRingBuffer


@dataclass
class StepOutcome:
    """Result of pushing one sample into a stage.

    ``mac_count`` is the compute cost of this step: multiply-accumulates for
    convolution fires, per-element compare/add operations for pooling fires,
    zero when the stage did not fire.
    """

    fired: bool
    output: np.ndarray | None
    mac_count: int


def output_count(n: int, window: int, stride: int) -> int:
    """How many times a window of size ``window`` advancing by ``stride``
    fits into ``n`` samples (valid padding)."""
    if n < window:
        return 0
    return (n - window) // stride + 1


class _BufferedStage:
    """Common buffer plumbing: a contiguous (channels, capacity) bank whose
    rows are the per-channel ring buffers."""

    def __init__(self, channels: int, capacity: int, stride: int):
        if stride < 1 or stride > capacity:
            raise ValueError(
                f"stride must be in [1, {capacity}], got {stride}"
            )
        self.in_channels = channels
        self.capacity = capacity
        self.stride = stride
        self._bank = np.zeros((channels, capacity), dtype=np.float32)
        self.buffers = [
            StridedRingBuffer(capacity, storage=self._bank[c])
            for c in range(channels)
        ]
        self.fires = 0

    def _push(self, sample) -> bool:
        sample = np.asarray(sample, dtype=np.float32)
        if sample.shape != (self.in_channels,):
            raise ShapeError(
                f"expected sample of {self.in_channels} channel(s), "
                f"got shape {sample.shape}"
            )
        for c, buf in enumerate(self.buffers):
            buf.write(sample[c])
        return self.buffers[0].is_full

    def _advance(self) -> None:
        for buf in self.buffers:
            buf.stride(self.stride)
        self.fires += 1

    @property
    def occupancy(self) -> int:
        return self.buffers[0].count

    def reset(self) -> None:
        for buf in self.buffers:
            buf.clear()
        self.fires = 0


class ConvStage(_BufferedStage):
    """One streaming 1-D convolution layer.

    ``weights`` is indexed [filter][in_channel][tap]; a fire computes, for
    each filter f, act(sum_c sum_j x_c[j] * w[f][c][j] + b[f]) over the
    buffered window and costs filters * in_channels * kernel MACs.
    """

    def __init__(self, in_channels, filters, kernel, stride, weights, bias,
                 activation="relu"):
        super().__init__(in_channels, kernel, stride)
        if activation not in ("relu", "identity"):
            raise ValueError(f"unsupported activation {activation!r}")
        weights = np.ascontiguousarray(weights, dtype=np.float32)
        bias = np.ascontiguousarray(bias, dtype=np.float32)
        if weights.shape != (filters, in_channels, kernel):
            raise ShapeError(
                f"weights must have shape ({filters}, {in_channels}, {kernel}), "
                f"got {weights.shape}"
            )
        if bias.shape != (filters,):
            raise ShapeError(f"bias must have shape ({filters},), got {bias.shape}")
        self.filters = filters
        self.kernel = kernel
        self.weights = weights
        self.bias = bias
        self.activation = activation
        self.fire_macs = filters * in_channels * kernel

    @property
    def out_width(self) -> int:
        return self.filters

    def step(self, sample) -> StepOutcome:
        if not self._push(sample):
            return StepOutcome(False, None, 0)
        out = kernels.conv_fire(
            self._bank,
            self.buffers[0].tail,
            self.weights,
            self.bias,
            self.activation == "relu",
        )
        self._advance()
        return StepOutcome(True, out, self.fire_macs)


class PoolStage(_BufferedStage):
    """One streaming pooling layer (max or average) over a window of ``window``
    samples per channel."""

    def __init__(self, channels, window, stride=None, kind="max"):
        if kind not in ("max", "avg"):
            raise ValueError(f"unsupported pool kind {kind!r}")
        super().__init__(channels, window, window if stride is None else stride)
        self.window = window
        self.kind = kind
        self.fire_macs = channels * window

    @property
    def out_width(self) -> int:
        return self.in_channels

    def step(self, sample) -> StepOutcome:
        if not self._push(sample):
            return StepOutcome(False, None, 0)
        out = kernels.pool_fire(self._bank, self.buffers[0].tail, self.kind == "max")
        self._advance()
        return StepOutcome(True, out, self.fire_macs)
