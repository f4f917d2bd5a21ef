"""Synthetic model construction.

A compact layer DSL describes a pipeline, e.g.::

    input:460x3,conv:8x8,maxpool:3,conv:8x8,maxpool:3,conv:8x8,maxpool:3,conv:8x8,maxpool:3,flatten,dense:16,dense:16,softmax:2

Conv and pool tokens take an optional /stride suffix (conv defaults to 1,
pools default to their window). Weights are drawn uniformly from
+-1/sqrt(fan_in) with a seeded generator, so a (spec, seed) pair is fully
reproducible. Generation goes through the document loader, so anything this
module emits is valid by construction.
"""

from __future__ import annotations

import json

import numpy as np

from .errors import ConfigError
from .layers import output_count
from .modelio import ModelSpec, load_model


def parse_layer_spec(text: str):
    """Parse the DSL into (input_length, input_channels, descs)."""
    tokens = [t.strip() for t in text.split(",")]
    if not tokens or not tokens[0]:
        raise ConfigError("empty layer spec")

    def bad(tok, why):
        return ConfigError(f"bad layer token {tok!r}: {why}")

    def positive_int(tok, text, what):
        try:
            value = int(text)
        except ValueError:
            raise bad(tok, f"{what} must be an integer") from None
        if value < 1:
            raise bad(tok, f"{what} must be positive")
        return value

    def split_stride(tok, arg):
        if "/" in arg:
            arg, s = arg.split("/", 1)
            return arg, positive_int(tok, s, "stride")
        return arg, None

    head, sep, rest = tokens[0].partition(":")
    if head != "input" or not sep:
        raise ConfigError(f"layer spec must start with input:LxC, got {tokens[0]!r}")
    dims = rest.split("x")
    if len(dims) != 2:
        raise bad(tokens[0], "expected input:LxC")
    length = positive_int(tokens[0], dims[0], "input length")
    channels = positive_int(tokens[0], dims[1], "input channels")

    descs = []
    for tok in tokens[1:]:
        name, sep, arg = tok.partition(":")
        if name == "flatten":
            if sep:
                raise bad(tok, "flatten takes no argument")
            descs.append(("flatten",))
            continue
        if not sep or not arg:
            raise bad(tok, "missing argument")
        if name == "conv":
            arg, stride = split_stride(tok, arg)
            dims = arg.split("x")
            if len(dims) != 2:
                raise bad(tok, "expected conv:FILTERSxKERNEL[/STRIDE]")
            filters = positive_int(tok, dims[0], "filters")
            kernel = positive_int(tok, dims[1], "kernel")
            descs.append(("conv", filters, kernel, stride or 1))
        elif name in ("maxpool", "avgpool"):
            arg, stride = split_stride(tok, arg)
            window = positive_int(tok, arg, "window")
            descs.append((name, window, stride or window))
        elif name == "dense":
            descs.append(("dense", positive_int(tok, arg, "units")))
        elif name == "softmax":
            descs.append(("softmax", positive_int(tok, arg, "classes")))
        else:
            raise bad(tok, "unknown layer")
    if not descs:
        raise ConfigError("layer spec has no layers after input")
    return length, channels, descs


def _uniform(rng, shape, fan_in):
    limit = 1.0 / np.sqrt(fan_in)
    return rng.uniform(-limit, limit, size=shape).astype(np.float32)


def build_model(input_length, input_channels, descs, seed=0) -> ModelSpec:
    """Materialize a parsed layer spec with seeded random weights."""
    rng = np.random.default_rng(seed)
    layers = []
    cur_len, cur_ch = input_length, input_channels
    flat = None
    for desc in descs:
        name = desc[0]
        if name == "conv":
            _, filters, kernel, stride = desc
            fan_in = cur_ch * kernel
            layers.append({
                "kind": "conv1d",
                "filters": filters,
                "kernel": kernel,
                "stride": stride,
                "activation": "relu",
                "weights": _uniform(rng, (filters, cur_ch, kernel), fan_in).tolist(),
                "bias": _uniform(rng, (filters,), fan_in).tolist(),
            })
            cur_len = output_count(cur_len, kernel, stride)
            cur_ch = filters
        elif name in ("maxpool", "avgpool"):
            _, window, stride = desc
            layers.append({"kind": name, "window": window, "stride": stride})
            cur_len = output_count(cur_len, window, stride)
        elif name == "flatten":
            flat = cur_len * cur_ch
            layers.append({"kind": "flatten", "size": flat})
            cur_ch = flat
        elif name == "dense":
            _, units = desc
            layers.append({
                "kind": "dense",
                "units": units,
                "activation": "relu",
                "weights": _uniform(rng, (units, cur_ch), cur_ch).tolist(),
                "bias": _uniform(rng, (units,), cur_ch).tolist(),
            })
            cur_ch = units
        else:
            _, classes = desc
            layers.append({
                "kind": "softmax",
                "classes": classes,
                "weights": _uniform(rng, (classes, cur_ch), cur_ch).tolist(),
                "bias": _uniform(rng, (classes,), cur_ch).tolist(),
            })
        if cur_len < 1 and flat is None:
            raise ConfigError(
                f"layer {name!r} leaves no output on a length-{input_length} input"
            )
    doc = {
        "format_version": 1,
        "input": {"length": input_length, "channels": input_channels},
        "layers": layers,
    }
    return load_model(json.dumps(doc))


def model_from_spec(text: str, seed=0) -> ModelSpec:
    length, channels, descs = parse_layer_spec(text)
    return build_model(length, channels, descs, seed=seed)


REFERENCE_SPEC = (
    "input:460x3,"
    "conv:8x8,maxpool:3,conv:8x8,maxpool:3,conv:8x8,maxpool:3,conv:8x8,maxpool:3,"
    "flatten,dense:16,dense:16,softmax:2"
)

POOL_FREE_SPEC = (
    "input:460x3,conv:8x8,conv:8x8,conv:8x8,conv:8x8,flatten,dense:16,softmax:2"
)


def reference_model(seed=0) -> ModelSpec:
    """The stock 460x3 four-stage classifier (2338 parameters)."""
    return model_from_spec(REFERENCE_SPEC, seed=seed)


def pool_free_model(seed=0) -> ModelSpec:
    """Four stride-1 convs, no pooling: every step past warmup fires a
    whole-pipeline prefix, giving exactly four distinct step costs."""
    return model_from_spec(POOL_FREE_SPEC, seed=seed)


def random_input(model: ModelSpec, seed=0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    shape = (model.input_length, model.input_channels)
    return rng.uniform(-1.0, 1.0, size=shape).astype(np.float32)
