"""Streaming network executor and the batch reference path.

StreamingNetwork consumes one multi-channel sample per step and drives the
stage cascade: a stage fires only when its ring buffers fill, and its output
is immediately pushed into the next stage within the same step. Work per
step is therefore one of a small set of values (a prefix of the stages
fired), never the whole-sequence cost.

batch_infer is the conventional whole-sequence path, written against plain
numpy arrays rather than the stage machinery. The two routes must agree to
float32 resolution; keeping them structurally separate is what makes that
check meaningful.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    IncompleteSequenceError,
    SequenceOverrunError,
    ShapeError,
)
from .layers import ConvStage, PoolStage, output_count
from .modelio import ConvLayer, DenseLayer, ModelSpec, PoolLayer


@dataclass(frozen=True)
class StepReport:
    """Outcome of feeding one sample: how deep the cascade ran and what it
    cost. ``stages_fired`` counts stages evaluated this step."""

    stages_fired: int
    macs: int


class DenseHead:
    """Fully-connected tail: zero or more dense layers, then the softmax
    classifier. Accumulates in float64, stores float32 between layers."""

    def __init__(self, model: ModelSpec):
        self.layers = model.head_layers
        self.feature_dim = model.feature_dim

    def forward(self, features: np.ndarray) -> np.ndarray:
        if features.shape != (self.feature_dim,):
            raise ShapeError(
                f"head expects {self.feature_dim} features, got {features.shape}"
            )
        h = features.astype(np.float64)
        for layer in self.layers[:-1]:
            h = layer.weights.astype(np.float64) @ h + layer.bias
            if layer.activation == "relu":
                h = np.maximum(h, 0.0)
            h = h.astype(np.float32).astype(np.float64)
        last = self.layers[-1]
        logits = last.weights.astype(np.float64) @ h + last.bias
        logits -= logits.max()
        e = np.exp(logits)
        return e / e.sum()


def _build_stages(model: ModelSpec):
    stages = []
    channels = model.input_channels
    for layer in model.stages:
        if isinstance(layer, ConvLayer):
            stages.append(ConvStage(
                in_channels=channels,
                filters=layer.filters,
                kernel=layer.kernel,
                stride=layer.stride,
                weights=layer.weights,
                bias=layer.bias,
                activation=layer.activation,
            ))
            channels = layer.filters
        else:
            stages.append(PoolStage(
                channels=channels,
                window=layer.window,
                stride=layer.stride,
                kind="max" if layer.kind == "maxpool" else "avg",
            ))
    return stages


class StreamingNetwork:
    """Sample-at-a-time executor for a validated model."""

    def __init__(self, model: ModelSpec):
        self.model = model
        self.stages = _build_stages(model)
        self.collector = np.zeros(model.feature_dim, dtype=np.float32)
        self.head = DenseHead(model)
        self.samples_seen = 0
        self._collected = 0

    @classmethod
    def from_model(cls, model: ModelSpec) -> "StreamingNetwork":
        return cls(model)

    @property
    def expected_samples(self) -> int:
        return self.model.input_length

    def step(self, sample) -> StepReport:
        """Feed one sample (one value per input channel); cascade as far as
        the fill states allow."""
        if self.samples_seen >= self.model.input_length:
            raise SequenceOverrunError(
                f"sequence already complete after {self.model.input_length} samples"
            )
        data = np.asarray(sample, dtype=np.float32).reshape(-1)
        fired = 0
        macs = 0
        for stage in self.stages:
            outcome = stage.step(data)
            if not outcome.fired:
                break
            fired += 1
            macs += outcome.mac_count
            data = outcome.output
        else:
            # final stage fired: one time step of features, channel-minor
            width = self.stages[-1].out_width
            self.collector[self._collected:self._collected + width] = data
            self._collected += width
        self.samples_seen += 1
        return StepReport(stages_fired=fired, macs=macs)

    def finalize(self) -> np.ndarray:
        """Class probabilities once the declared sequence length has been
        consumed."""
        if self.samples_seen < self.model.input_length:
            raise IncompleteSequenceError(
                f"saw {self.samples_seen} of {self.model.input_length} samples"
            )
        return self.head.forward(self.collector)

    def reset(self) -> None:
        for stage in self.stages:
            stage.reset()
        self.collector[:] = 0.0
        self.samples_seen = 0
        self._collected = 0


# ---------------------------------------------------------------------------
# batch reference path (independent of the stage machinery)


def _check_input(model: ModelSpec, x) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float32)
    want = (model.input_length, model.input_channels)
    if arr.ndim != 2 or arr.shape != want:
        raise ShapeError(
            f"expected {want[0]} samples x {want[1]} channels, got {arr.shape}"
        )
    return arr


def _batch_forward(model: ModelSpec, x: np.ndarray):
    """Whole-sequence forward pass. Activations are materialized as float32
    (time, channels) arrays between stages; accumulation is float64."""
    act = x
    for layer in model.stages:
        n = act.shape[0]
        if isinstance(layer, ConvLayer):
            fires = output_count(n, layer.kernel, layer.stride)
            out = np.zeros((fires, layer.filters), dtype=np.float64)
            for j in range(layer.kernel):
                taps = act[j:j + fires * layer.stride:layer.stride, :]
                out += taps.astype(np.float64) @ layer.weights[:, :, j].T.astype(np.float64)
            out += layer.bias.astype(np.float64)
            if layer.activation == "relu":
                np.maximum(out, 0.0, out=out)
            act = out.astype(np.float32)
        else:
            fires = output_count(n, layer.window, layer.stride)
            out = np.empty((fires, act.shape[1]), dtype=np.float32)
            for t in range(fires):
                win = act[t * layer.stride:t * layer.stride + layer.window, :]
                if layer.kind == "maxpool":
                    out[t] = win.max(axis=0)
                else:
                    out[t] = win.astype(np.float64).mean(axis=0).astype(np.float32)
            act = out
    features = act.reshape(-1)  # time-major: [t0c0, t0c1, ...]

    h = features.astype(np.float64)
    head = model.head_layers
    for layer in head[:-1]:
        h = layer.weights.astype(np.float64) @ h + layer.bias
        if layer.activation == "relu":
            h = np.maximum(h, 0.0)
        h = h.astype(np.float32).astype(np.float64)
    last = head[-1]
    logits = last.weights.astype(np.float64) @ h + last.bias
    logits -= logits.max()
    e = np.exp(logits)
    return features, e / e.sum()


def batch_features(model: ModelSpec, x) -> np.ndarray:
    """Flattened feature vector for a full sequence (float32)."""
    features, _ = _batch_forward(model, _check_input(model, x))
    return features


def batch_infer(model: ModelSpec, x) -> np.ndarray:
    """Class probabilities for a full sequence (float64)."""
    _, probs = _batch_forward(model, _check_input(model, x))
    return probs


def stream_infer(model: ModelSpec, x):
    """Run the streaming path over a full sequence. Returns (probs, reports)."""
    arr = _check_input(model, x)
    net = StreamingNetwork(model)
    reports = [net.step(row) for row in arr]
    return net.finalize(), reports
