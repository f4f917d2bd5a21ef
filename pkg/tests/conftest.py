"""Shared helpers for the randomized campaigns."""

import numpy as np

from convstream import build_model


def random_stage_descs(rng):
    """1-4 conv stages, each optionally followed by a pool."""
    descs = []
    for _ in range(int(rng.integers(1, 5))):
        kernel = int(rng.integers(2, 17))
        stride = int(rng.integers(1, kernel + 1))
        filters = int(rng.integers(1, 9))
        descs.append(("conv", filters, kernel, stride))
        if rng.random() < 0.5:
            window = int(rng.integers(2, 5))
            descs.append((rng.choice(["maxpool", "avgpool"]), window, window))
    return descs


def min_input_length(descs):
    # walk backwards: each stage needs window + (need-1)*stride inputs
    need = 1
    for desc in reversed(descs):
        if desc[0] == "conv":
            _, _, window, stride = desc
        else:
            _, window, stride = desc
        need = window + (need - 1) * stride
    return need


def random_model(rng):
    """A random valid pipeline with seeded weights."""
    descs = random_stage_descs(rng)
    head = [("flatten",)]
    for _ in range(int(rng.integers(0, 3))):
        head.append(("dense", int(rng.integers(2, 17))))
    head.append(("softmax", int(rng.integers(2, 6))))
    length = min_input_length(descs) + int(rng.integers(0, 41))
    channels = int(rng.integers(1, 9))
    return build_model(length, channels, descs + head,
                       seed=int(rng.integers(0, 2**31)))


def random_input_for(model, rng):
    shape = (model.input_length, model.input_channels)
    return rng.uniform(-1.0, 1.0, size=shape).astype(np.float32)
