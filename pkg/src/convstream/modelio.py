"""Model document format: loader, validator, and static accounting.

A model is a JSON document, ``format_version: 1``::

    {
      "format_version": 1,
      "input": {"length": 460, "channels": 3},
      "layers": [
        {"kind": "conv1d", "filters": 8, "kernel": 8, "stride": 1,
         "activation": "relu", "weights": [[[...]]], "bias": [...]},
        {"kind": "maxpool", "window": 3, "stride": 3},
        {"kind": "flatten", "size": 16},
        {"kind": "dense", "units": 16, "activation": "relu",
         "weights": [[...]], "bias": [...]},
        {"kind": "softmax", "classes": 2, "weights": [[...]], "bias": [...]}
      ]
    }

Conv weights are nested [filter][channel][tap], dense and softmax weights
[out][in]. Layer order is (conv1d|maxpool|avgpool)* flatten dense* softmax.
Only valid padding is supported; pool stride defaults to the window. Unknown
fields anywhere are rejected. All capacities are known once the document is
loaded, which is what makes the static memory plan possible.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import ParseError, ValidationError
from .layers import output_count

FORMAT_VERSION = 1
BYTES_PER_SCALAR = 4  # float32 throughout

STREAMING = "streaming"
BATCH = "batch"


# ---------------------------------------------------------------------------
# layer descriptors


@dataclass(frozen=True)
class ConvLayer:
    filters: int
    kernel: int
    stride: int
    activation: str
    weights: np.ndarray  # [filter][channel][tap]
    bias: np.ndarray  # [filter]
    kind: str = "conv1d"


@dataclass(frozen=True)
class PoolLayer:
    window: int
    stride: int
    kind: str = "maxpool"  # or "avgpool"


@dataclass(frozen=True)
class FlattenLayer:
    size: int
    kind: str = "flatten"


@dataclass(frozen=True)
class DenseLayer:
    units: int
    activation: str
    weights: np.ndarray  # [out][in]
    bias: np.ndarray
    kind: str = "dense"


@dataclass(frozen=True)
class SoftmaxLayer:
    classes: int
    weights: np.ndarray  # [classes][in]
    bias: np.ndarray
    kind: str = "softmax"


@dataclass(frozen=True)
class ModelSpec:
    """Validated, immutable description of one classifier pipeline."""

    format_version: int
    input_length: int
    input_channels: int
    layers: tuple

    @property
    def stages(self) -> tuple:
        return tuple(
            l for l in self.layers if isinstance(l, (ConvLayer, PoolLayer))
        )

    @property
    def head_layers(self) -> tuple:
        return tuple(
            l for l in self.layers if isinstance(l, (DenseLayer, SoftmaxLayer))
        )

    @property
    def feature_dim(self) -> int:
        return next(l for l in self.layers if isinstance(l, FlattenLayer)).size

    @property
    def classes(self) -> int:
        return self.layers[-1].classes


# ---------------------------------------------------------------------------
# document parsing

_INT = (int,)
_NUM = (int, float)


def _require(obj, field, kinds, where):
    if field not in obj:
        raise ValidationError(f"{where}: missing field {field!r}")
    value = obj[field]
    if isinstance(value, bool) or not isinstance(value, kinds):
        raise ValidationError(f"{where}: field {field!r} has the wrong type")
    return value


def _check_keys(obj, allowed, where):
    unknown = set(obj) - allowed
    if unknown:
        raise ValidationError(f"{where}: unknown field(s) {sorted(unknown)}")


def _as_array(value, shape, where):
    try:
        arr = np.asarray(value, dtype=np.float64)
    except (TypeError, ValueError):
        raise ValidationError(f"{where}: weights are ragged or non-numeric") from None
    if arr.shape != shape:
        raise ValidationError(
            f"{where}: expected array of shape {shape}, got {arr.shape}"
        )
    if not np.isfinite(arr).all():
        raise ValidationError(f"{where}: non-finite value in array")
    return _freeze(arr.astype(np.float32))


def _freeze(arr):
    arr.setflags(write=False)
    return arr


def _parse_layer(obj, index, in_len, in_ch):
    """Parse and shape-check one layer dict against the propagated shape."""
    where = f"layers[{index}]"
    if not isinstance(obj, dict):
        raise ValidationError(f"{where}: layer must be an object")
    kind = _require(obj, "kind", (str,), where)
    where = f"{where} ({kind})"

    if kind == "conv1d":
        _check_keys(
            obj,
            {"kind", "filters", "kernel", "stride", "activation", "weights",
             "bias", "padding"},
            where,
        )
        if obj.get("padding", "valid") != "valid":
            raise ValidationError(f"{where}: only valid padding is supported")
        filters = _require(obj, "filters", _INT, where)
        kernel = _require(obj, "kernel", _INT, where)
        stride = _require(obj, "stride", _INT, where)
        activation = _require(obj, "activation", (str,), where)
        if filters < 1 or kernel < 1:
            raise ValidationError(f"{where}: filters and kernel must be positive")
        if stride < 1 or stride > kernel:
            raise ValidationError(
                f"{where}: stride must be in [1, kernel={kernel}], got {stride}"
            )
        if activation not in ("relu", "identity"):
            raise ValidationError(f"{where}: unsupported activation {activation!r}")
        weights = _as_array(obj["weights"], (filters, in_ch, kernel), where)
        bias = _as_array(obj["bias"], (filters,), where)
        layer = ConvLayer(filters, kernel, stride, activation, weights, bias)
        return layer, output_count(in_len, kernel, stride), filters

    if kind in ("maxpool", "avgpool"):
        _check_keys(obj, {"kind", "window", "stride"}, where)
        window = _require(obj, "window", _INT, where)
        stride = obj.get("stride", window)
        if isinstance(stride, bool) or not isinstance(stride, int):
            raise ValidationError(f"{where}: field 'stride' has the wrong type")
        if window < 1:
            raise ValidationError(f"{where}: window must be positive")
        if stride < 1 or stride > window:
            raise ValidationError(
                f"{where}: stride must be in [1, window={window}], got {stride}"
            )
        layer = PoolLayer(window, stride, kind=kind)
        return layer, output_count(in_len, window, stride), in_ch

    if kind == "flatten":
        _check_keys(obj, {"kind", "size"}, where)
        size = _require(obj, "size", _INT, where)
        return FlattenLayer(size), None, None

    if kind == "dense":
        _check_keys(obj, {"kind", "units", "activation", "weights", "bias"}, where)
        units = _require(obj, "units", _INT, where)
        activation = _require(obj, "activation", (str,), where)
        if units < 1:
            raise ValidationError(f"{where}: units must be positive")
        if activation not in ("relu", "identity"):
            raise ValidationError(f"{where}: unsupported activation {activation!r}")
        weights = _as_array(obj["weights"], (units, in_ch), where)
        bias = _as_array(obj["bias"], (units,), where)
        return DenseLayer(units, activation, weights, bias), None, units

    if kind == "softmax":
        _check_keys(obj, {"kind", "classes", "weights", "bias"}, where)
        classes = _require(obj, "classes", _INT, where)
        if classes < 2:
            raise ValidationError(f"{where}: need at least 2 classes")
        weights = _as_array(obj["weights"], (classes, in_ch), where)
        bias = _as_array(obj["bias"], (classes,), where)
        return SoftmaxLayer(classes, weights, bias), None, classes

    raise ValidationError(f"{where}: unsupported layer kind {kind!r}")


def load_model(data) -> ModelSpec:
    """Parse and validate a model document (bytes or str)."""
    if isinstance(data, bytes):
        data = data.decode("utf-8", errors="replace")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParseError(f"model document is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ValidationError("model document must be a JSON object")
    _check_keys(doc, {"format_version", "input", "layers"}, "document")
    version = _require(doc, "format_version", _INT, "document")
    if version != FORMAT_VERSION:
        raise ValidationError(f"unsupported format_version {version}")
    inp = _require(doc, "input", (dict,), "document")
    _check_keys(inp, {"length", "channels"}, "input")
    length = _require(inp, "length", _INT, "input")
    channels = _require(inp, "channels", _INT, "input")
    if length < 1 or channels < 1:
        raise ValidationError("input length and channels must be positive")
    raw_layers = _require(doc, "layers", (list,), "document")

    # walk the shape chain: (conv|pool)* flatten dense* softmax
    layers = []
    cur_len, cur_ch = length, channels
    phase = "stages"
    for i, obj in enumerate(raw_layers):
        layer, out_len, out_ch = _parse_layer(obj, i, cur_len, cur_ch)
        where = f"layers[{i}] ({layer.kind})"
        if isinstance(layer, (ConvLayer, PoolLayer)):
            if phase != "stages":
                raise ValidationError(f"{where}: stage layer after flatten")
            if out_len < 1:
                raise ValidationError(
                    f"{where}: window {getattr(layer, 'kernel', getattr(layer, 'window', '?'))} "
                    f"never fills on a length-{cur_len} sequence"
                )
            cur_len, cur_ch = out_len, out_ch
        elif isinstance(layer, FlattenLayer):
            if phase != "stages":
                raise ValidationError(f"{where}: duplicate flatten")
            if layer.size != cur_len * cur_ch:
                raise ValidationError(
                    f"{where}: declared size {layer.size} does not match "
                    f"propagated {cur_len} x {cur_ch} = {cur_len * cur_ch}"
                )
            phase = "head"
            cur_ch = layer.size
        elif isinstance(layer, DenseLayer):
            if phase != "head":
                raise ValidationError(f"{where}: dense before flatten")
            cur_ch = layer.units
        else:  # softmax
            if phase != "head":
                raise ValidationError(f"{where}: softmax before flatten")
            phase = "done"
            cur_ch = layer.classes
        if phase == "done" and i != len(raw_layers) - 1:
            raise ValidationError("softmax must be the final layer")
        layers.append(layer)
    if phase != "done":
        raise ValidationError("model must end with flatten/dense/softmax head")
    return ModelSpec(version, length, channels, tuple(layers))


def load_model_file(path) -> ModelSpec:
    with open(path, "rb") as fh:
        return load_model(fh.read())


# ---------------------------------------------------------------------------
# serialization


def to_document(model: ModelSpec) -> dict:
    layers = []
    for layer in model.layers:
        if isinstance(layer, ConvLayer):
            layers.append({
                "kind": "conv1d",
                "filters": layer.filters,
                "kernel": layer.kernel,
                "stride": layer.stride,
                "activation": layer.activation,
                "weights": layer.weights.tolist(),
                "bias": layer.bias.tolist(),
            })
        elif isinstance(layer, PoolLayer):
            layers.append({
                "kind": layer.kind,
                "window": layer.window,
                "stride": layer.stride,
            })
        elif isinstance(layer, FlattenLayer):
            layers.append({"kind": "flatten", "size": layer.size})
        elif isinstance(layer, DenseLayer):
            layers.append({
                "kind": "dense",
                "units": layer.units,
                "activation": layer.activation,
                "weights": layer.weights.tolist(),
                "bias": layer.bias.tolist(),
            })
        else:
            layers.append({
                "kind": "softmax",
                "classes": layer.classes,
                "weights": layer.weights.tolist(),
                "bias": layer.bias.tolist(),
            })
    return {
        "format_version": model.format_version,
        "input": {"length": model.input_length, "channels": model.input_channels},
        "layers": layers,
    }


def dump_model(model: ModelSpec) -> str:
    return json.dumps(to_document(model), indent=1)


def save_model_file(model: ModelSpec, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dump_model(model))
        fh.write("\n")


# ---------------------------------------------------------------------------
# shape propagation and accounting


def stage_shapes(model: ModelSpec, n: int | None = None):
    """Output (length, channels) after each conv/pool stage for an input of
    ``n`` samples (defaults to the model's declared length)."""
    cur_len = model.input_length if n is None else n
    cur_ch = model.input_channels
    shapes = []
    for layer in model.stages:
        window = layer.kernel if isinstance(layer, ConvLayer) else layer.window
        cur_len = output_count(cur_len, window, layer.stride)
        if cur_len < 1:
            raise ValidationError(
                f"sequence of {n} sample(s) is too short for this pipeline"
            )
        if isinstance(layer, ConvLayer):
            cur_ch = layer.filters
        shapes.append((cur_len, cur_ch))
    return shapes


def param_count(model: ModelSpec) -> int:
    """Trainable parameters: conv and dense weights plus biases; pooling and
    flatten contribute nothing."""
    total = 0
    for layer in model.layers:
        if isinstance(layer, (ConvLayer, DenseLayer, SoftmaxLayer)):
            total += layer.weights.size + layer.bias.size
    return total


def weight_storage_bytes(model: ModelSpec) -> int:
    return param_count(model) * BYTES_PER_SCALAR


# ---------------------------------------------------------------------------
# MAC cost model


@dataclass(frozen=True)
class StageCost:
    index: int
    kind: str
    per_fire: int
    fires: int

    @property
    def total(self) -> int:
        return self.per_fire * self.fires


@dataclass(frozen=True)
class MacCostModel:
    stages: tuple
    total: int


def mac_cost_model(model: ModelSpec, n: int | None = None) -> MacCostModel:
    """Per-stage compute costs for one full sequence.

    Conv stages cost filters * in_channels * kernel MACs per fire, pooling
    stages channels * window element operations per fire; fire counts chain
    through the pipeline.
    """
    cur_len = model.input_length if n is None else n
    cur_ch = model.input_channels
    stages = []
    for i, layer in enumerate(model.stages):
        if isinstance(layer, ConvLayer):
            per_fire = layer.filters * cur_ch * layer.kernel
            fires = output_count(cur_len, layer.kernel, layer.stride)
            cur_ch = layer.filters
        else:
            per_fire = cur_ch * layer.window
            fires = output_count(cur_len, layer.window, layer.stride)
        stages.append(StageCost(i, layer.kind, per_fire, fires))
        cur_len = fires
    return MacCostModel(tuple(stages), sum(s.total for s in stages))


# ---------------------------------------------------------------------------
# memory planner


@dataclass(frozen=True)
class PlanEntry:
    owner: str
    channels: int
    capacity: int
    bytes: int


@dataclass(frozen=True)
class MemoryPlan:
    """Byte accounting for one execution mode.

    Streaming totals stage ring buffers, the feature collector, and the head
    scratch; none of these depend on the sequence length. Batch totals the
    raw input buffer, a two-buffer ping-pong sized by the largest adjacent
    activation pair (a deliberately favorable baseline), and the head
    scratch. Weight storage is reported separately in both modes.
    """

    mode: str
    entries: tuple
    input_bytes: int
    activation_bytes: int
    collector_bytes: int
    head_scratch_bytes: int
    weight_bytes: int
    total_bytes: int


def _head_scratch_bytes(model: ModelSpec) -> int:
    widths = [l.units if isinstance(l, DenseLayer) else l.classes
              for l in model.head_layers]
    return sum(widths) * BYTES_PER_SCALAR


def plan_memory(model: ModelSpec, mode: str, n: int | None = None) -> MemoryPlan:
    """Static memory plan for ``mode`` (``streaming`` or ``batch``).

    ``n`` overrides the planning-time sequence length; the streaming plan is
    sized by window geometry alone and ignores it, which is the footprint
    argument this planner exists to make.
    """
    if mode not in (STREAMING, BATCH):
        raise ValueError(f"unknown mode {mode!r}")
    head_scratch = _head_scratch_bytes(model)
    weight_bytes = weight_storage_bytes(model)

    if mode == STREAMING:
        entries = []
        cur_ch = model.input_channels
        for i, layer in enumerate(model.stages):
            capacity = layer.kernel if isinstance(layer, ConvLayer) else layer.window
            entries.append(PlanEntry(
                owner=f"stage{i} {layer.kind}",
                channels=cur_ch,
                capacity=capacity,
                bytes=cur_ch * capacity * BYTES_PER_SCALAR,
            ))
            if isinstance(layer, ConvLayer):
                cur_ch = layer.filters
        collector = model.feature_dim * BYTES_PER_SCALAR
        buffer_total = sum(e.bytes for e in entries)
        return MemoryPlan(
            mode=STREAMING,
            entries=tuple(entries),
            input_bytes=0,
            activation_bytes=0,
            collector_bytes=collector,
            head_scratch_bytes=head_scratch,
            weight_bytes=weight_bytes,
            total_bytes=buffer_total + collector + head_scratch,
        )

    length = model.input_length if n is None else n
    input_bytes = length * model.input_channels * BYTES_PER_SCALAR
    acts = [l * c * BYTES_PER_SCALAR for l, c in stage_shapes(model, length)]
    if not acts:
        pingpong = 0
    elif len(acts) == 1:
        pingpong = acts[0]
    else:
        pingpong = max(acts[i] + acts[i + 1] for i in range(len(acts) - 1))
    entries = [
        PlanEntry("input", model.input_channels, length, input_bytes),
        PlanEntry("activations (ping-pong pair)", 1,
                  pingpong // BYTES_PER_SCALAR, pingpong),
    ]
    return MemoryPlan(
        mode=BATCH,
        entries=tuple(entries),
        input_bytes=input_bytes,
        activation_bytes=pingpong,
        collector_bytes=0,
        head_scratch_bytes=head_scratch,
        weight_bytes=weight_bytes,
        total_bytes=input_bytes + pingpong + head_scratch,
    )
